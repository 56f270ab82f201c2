#include "torwalk/intmat.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <sstream>

#include "torwalk/errors.hpp"

namespace torwalk {

IntMat IntMat::identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<long long>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
    IntMat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw ParseError("ragged matrix rows");
        for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

IntMat IntMat::transpose() const {
    IntMat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

IntMat IntMat::operator*(const IntMat& o) const {
    if (cols_ != o.rows_) throw DomainError("matrix product shape mismatch");
    IntMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Int& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < o.cols_; ++j) r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

std::vector<Int> IntMat::operator*(const std::vector<Int>& v) const {
    if (static_cast<int>(v.size()) != cols_) throw DomainError("matrix-vector shape mismatch");
    std::vector<Int> r(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r[i] += at(i, j) * v[j];
    return r;
}

void IntMat::swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void IntMat::swap_cols(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

std::string IntMat::str() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j);
    }
    os << "]";
    return os.str();
}

IntMat mat_pow(const IntMat& A, unsigned k) {
    if (!A.square()) throw DomainError("power of non-square matrix");
    IntMat r = IntMat::identity(A.rows());
    IntMat base = A;
    while (k) {
        if (k & 1u) r = r * base;
        k >>= 1u;
        if (k) base = base * base;
    }
    return r;
}

Int determinant(const IntMat& A) {
    if (!A.square()) throw DomainError("determinant of non-square matrix");
    int n = A.rows();
    if (n == 0) return 1;
    IntMat m = A;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int t = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = t / prev; // exact by Bareiss identity
            }
        prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

bool is_unimodular(const IntMat& A) {
    if (!A.square()) return false;
    Int d = determinant(A);
    return d == 1 || d == -1;
}

IntMat inverse_unimodular(const IntMat& A) {
    Int det = determinant(A);
    if (det != 1 && det != -1) throw DomainError("matrix is not unimodular");
    int n = A.rows();
    // Rational Gauss-Jordan; entries of the result are integers because
    // |det| = 1.
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(2 * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i][j] = Rational(A.at(i, j));
        m[i][n + i] = 1;
    }
    for (int k = 0; k < n; ++k) {
        int p = -1;
        for (int i = k; i < n; ++i)
            if (m[i][k] != 0) { p = i; break; }
        if (p < 0) throw DomainError("singular matrix");
        std::swap(m[k], m[p]);
        Rational piv = m[k][k];
        for (int j = 0; j < 2 * n; ++j) m[k][j] /= piv;
        for (int i = 0; i < n; ++i) {
            if (i == k || m[i][k] == 0) continue;
            Rational f = m[i][k];
            for (int j = 0; j < 2 * n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    IntMat inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational& q = m[i][n + j];
            if (denominator(q) != 1) throw DomainError("inverse is not integral");
            inv.at(i, j) = numerator(q);
        }
    return inv;
}

IntMat mod_reduce(const IntMat& A, long long n) {
    if (n <= 0) throw DomainError("modulus must be positive");
    IntMat r(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            Int v = A.at(i, j) % n;
            if (v < 0) v += n;
            r.at(i, j) = v;
        }
    return r;
}

IntPoly characteristic_polynomial(const IntMat& A) {
    if (!A.square()) throw DomainError("characteristic polynomial of non-square matrix");
    int d = A.rows();
    IntPoly coeff(d + 1);
    coeff[d] = 1;
    IntMat M = IntMat::identity(d); // M_0
    for (int k = 1; k <= d; ++k) {
        IntMat N = A * M;
        Int tr = 0;
        for (int i = 0; i < d; ++i) tr += N.at(i, i);
        Int c = -tr / k; // exact
        coeff[d - k] = c;
        M = N;
        for (int i = 0; i < d; ++i) M.at(i, i) += c;
    }
    return coeff;
}

namespace {

using RatPoly = std::vector<Rational>;

RatPoly trim(RatPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

RatPoly monic(RatPoly p) {
    p = trim(std::move(p));
    if (p.empty()) return p;
    Rational lead = p.back();
    for (auto& c : p) c /= lead;
    return p;
}

RatPoly poly_mod(RatPoly a, const RatPoly& b) {
    a = trim(std::move(a));
    while (a.size() >= b.size() && !a.empty()) {
        Rational f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a = trim(std::move(a));
    }
    return a;
}

// Monic gcd over Q.
RatPoly poly_gcd(RatPoly a, RatPoly b) {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
        RatPoly r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a));
}

} // namespace

std::vector<std::pair<double, double>> polynomial_roots(const IntPoly& p) {
    IntPoly q = p;
    while (!q.empty() && q.back() == 0) q.pop_back();
    if (q.size() <= 1) return {};
    int deg = static_cast<int>(q.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    double lead = static_cast<double>(q[deg]);
    for (int i = 0; i < deg; ++i) {
        comp(i, deg - 1) = -static_cast<double>(q[i]) / lead;
        if (i + 1 < deg) comp(i + 1, i) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<std::pair<double, double>> roots;
    for (int i = 0; i < deg; ++i)
        roots.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    return roots;
}

bool is_hyperbolic(const IntMat& A, double tau_eig) {
    IntPoly p = characteristic_polynomial(A);
    // Strip x^k factors (zero eigenvalues are harmless here) so the
    // reciprocal polynomial is well defined.
    size_t low = 0;
    while (low < p.size() && p[low] == 0) ++low;
    RatPoly pq, rq;
    for (size_t i = low; i < p.size(); ++i) pq.push_back(Rational(p[i]));
    rq.assign(pq.rbegin(), pq.rend());
    RatPoly g = poly_gcd(pq, rq);
    if (g.size() <= 1) return true; // no eigenvalue can pair with its inverse

    IntPoly gi;
    Int scale = 1;
    for (const auto& c : g) scale = scale * denominator(c) / gcd(scale, Int(denominator(c)));
    for (const auto& c : g) gi.push_back(numerator(c) * (scale / denominator(c)));

    for (const auto& [re, im] : polynomial_roots(gi)) {
        double dist = std::abs(std::hypot(re, im) - 1.0);
        if (dist < tau_eig) return false;
        if (dist < 10.0 * tau_eig)
            throw AmbiguousSpectrum("eigenvalue within " + std::to_string(dist) +
                                    " of the unit circle; cannot certify");
    }
    return true;
}

} // namespace torwalk
