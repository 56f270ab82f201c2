#include "torwalk/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torwalk/errors.hpp"
#include "torwalk/smith.hpp"

namespace torwalk {

namespace {

Eigen::MatrixXd to_double(const IntMat& A) {
    Eigen::MatrixXd M(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) M(i, j) = static_cast<double>(A.at(i, j));
    return M;
}

// Real polynomial with the given subset of roots (conjugates arrive in pairs).
std::vector<double> real_factor(const std::vector<std::pair<double, double>>& roots) {
    std::vector<double> c{1.0};
    auto mul = [&c](const std::vector<double>& f) {
        std::vector<double> out(c.size() + f.size() - 1, 0.0);
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < f.size(); ++j) out[i + j] += c[i] * f[j];
        c = std::move(out);
    };
    for (const auto& [re, im] : roots) {
        if (im > 1e-9) mul({re * re + im * im, -2.0 * re, 1.0});
        else if (im >= -1e-9) mul({-re, 1.0});
        // negative-imaginary roots are covered by their conjugates
    }
    return c;
}

Eigen::MatrixXd eval_poly(const std::vector<double>& c, const Eigen::MatrixXd& A) {
    const int d = static_cast<int>(A.rows());
    Eigen::MatrixXd R = c.back() * Eigen::MatrixXd::Identity(d, d);
    for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k)
        R = R * A + c[static_cast<size_t>(k)] * Eigen::MatrixXd::Identity(d, d);
    return R;
}

double op_norm(const Eigen::MatrixXd& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

// Visit every nonzero integer vector with |v|_inf <= R.
template <typename F>
void for_each_lattice(int d, int R, F&& body) {
    std::vector<int> v(static_cast<size_t>(d), -R);
    Eigen::VectorXd x(d);
    while (true) {
        bool zero = true;
        for (int i = 0; i < d; ++i) {
            x(i) = v[static_cast<size_t>(i)];
            zero = zero && v[static_cast<size_t>(i)] == 0;
        }
        if (!zero) body(x);
        int i = 0;
        while (i < d && v[static_cast<size_t>(i)] == R) v[static_cast<size_t>(i++)] = -R;
        if (i == d) break;
        ++v[static_cast<size_t>(i)];
    }
}

} // namespace

Splitting stable_unstable_split(const IntMat& A, double tau_eig) {
    if (A.rows() != A.cols()) throw DomainError("splitting needs a square matrix");
    if (!is_hyperbolic(A, tau_eig)) throw NotHyperbolic("matrix has an eigenvalue of modulus one");
    const int d = A.rows();

    Splitting s;
    s.d = d;
    s.map = to_double(A);
    if (is_unimodular(A)) s.map_inv = to_double(inverse_unimodular(A));
    else {
        if (determinant(A) == 0) throw DomainError("singular matrix has no inverse dynamics");
        s.map_inv = s.map.inverse();
    }

    std::vector<std::pair<double, double>> stable_roots, unstable_roots;
    for (const auto& z : polynomial_roots(characteristic_polynomial(A))) {
        const double mod = std::hypot(z.first, z.second);
        (mod < 1.0 ? stable_roots : unstable_roots).push_back(z);
    }
    s.stable_dim = static_cast<int>(stable_roots.size());
    s.unstable_dim = static_cast<int>(unstable_roots.size());

    auto kernel_of = [&](const std::vector<std::pair<double, double>>& roots, int dim) {
        if (dim == 0) return Eigen::MatrixXd(d, 0);
        if (dim == d) {
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
            return I;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(eval_poly(real_factor(roots), s.map),
                                              Eigen::ComputeFullV);
        return Eigen::MatrixXd(svd.matrixV().rightCols(dim));
    };
    s.stable_basis = kernel_of(stable_roots, s.stable_dim);
    s.unstable_basis = kernel_of(unstable_roots, s.unstable_dim);

    Eigen::MatrixXd B(d, d);
    B << s.stable_basis, s.unstable_basis;
    Eigen::MatrixXd Binv = B.inverse();
    if (s.stable_dim == 0) s.proj_stable = Eigen::MatrixXd::Zero(d, d);
    else s.proj_stable = s.stable_basis * Binv.topRows(s.stable_dim);
    s.proj_unstable = Eigen::MatrixXd::Identity(d, d) - s.proj_stable;
    return s;
}

double AdaptedNorm::stable_part(const Eigen::VectorXd& v) const {
    if (split.stable_dim == 0) return 0.0;
    Eigen::VectorXd w = split.proj_stable * v;
    double acc = w.norm();
    for (int k = 1; k < power; ++k) {
        w = split.map * w;
        acc += w.norm();
    }
    return acc;
}

double AdaptedNorm::unstable_part(const Eigen::VectorXd& v) const {
    if (split.unstable_dim == 0) return 0.0;
    Eigen::VectorXd w = split.proj_unstable * v;
    double acc = w.norm();
    for (int k = 1; k < power; ++k) {
        w = split.map_inv * w;
        acc += w.norm();
    }
    return acc;
}

double AdaptedNorm::operator()(const Eigen::VectorXd& v) const {
    return std::max(stable_part(v), unstable_part(v));
}

AdaptedNorm adapted_norm(const Splitting& split) {
    AdaptedNorm nrm;
    nrm.split = split;
    const int d = split.d;

    // Coordinate matrices of the two restrictions in their orthonormal bases.
    Eigen::MatrixXd S = split.stable_basis.transpose() * split.map * split.stable_basis;
    Eigen::MatrixXd T =
        split.unstable_basis.transpose() * split.map_inv * split.unstable_basis;

    int l = 1;
    {
        Eigen::MatrixXd Sp = S, Tp = T;
        while (op_norm(Sp) >= 1.0 || op_norm(Tp) >= 1.0) {
            if (++l > 4096) throw NotHyperbolic("no contracting power found");
            Sp = Sp * S;
            Tp = Tp * T;
        }
    }
    nrm.power = l;

    // Operator norm of a restriction under its sum norm: exact for a
    // one-dimensional factor, else the certified bound
    // 1 - (1 - |M^l|) / sum_{k<l} |M^k|.
    auto rate_of = [l](const Eigen::MatrixXd& M) {
        if (M.rows() == 0) return 0.0;
        if (M.rows() == 1) return std::abs(M(0, 0));
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(M.rows(), M.cols());
        double sum = 0.0;
        for (int k = 0; k < l; ++k) {
            sum += op_norm(P);
            P = P * M;
        }
        return 1.0 - (1.0 - op_norm(P)) / sum;
    };
    nrm.stable_rate = rate_of(S);
    nrm.unstable_rate = rate_of(T);
    nrm.lambda = std::max(nrm.stable_rate, nrm.unstable_rate);

    // ||A||': stable side contracts at stable_rate; unstable side expands by
    // |eigenvalue| exactly in one dimension, else bounded via the k = 0 term.
    auto growth_of = [](const Eigen::MatrixXd& M) {
        if (M.rows() == 0) return 0.0;
        if (M.rows() == 1) return std::abs(M(0, 0));
        return 1.0 + op_norm(M);
    };
    Eigen::MatrixXd Au = split.unstable_basis.transpose() * split.map * split.unstable_basis;
    Eigen::MatrixXd As_inv = split.stable_basis.transpose() * split.map_inv * split.stable_basis;
    nrm.norm_of_map = std::max(nrm.stable_rate, growth_of(Au));
    nrm.norm_of_map_inv = std::max(nrm.unstable_rate, growth_of(As_inv));

    double up_s = 0.0, up_u = 0.0;
    {
        Eigen::MatrixXd P = split.proj_stable;
        for (int k = 0; k < l; ++k) {
            up_s += op_norm(P);
            P = split.map * P;
        }
        P = split.proj_unstable;
        for (int k = 0; k < l; ++k) {
            up_u += op_norm(P);
            P = split.map_inv * P;
        }
    }
    nrm.equiv_upper = std::max({up_s, up_u, 1e-300});
    nrm.equiv_lower = 0.5;

    // Shortest nonzero lattice vector: the minimizer satisfies
    // |v|_2 <= ||v||'/equiv_lower <= ||e_1||'/equiv_lower <= 2*equiv_upper.
    const int R = static_cast<int>(std::ceil(2.0 * nrm.equiv_upper)) + 1;
    double box = std::pow(2.0 * R + 1.0, d);
    if (box > 5e7) throw BudgetExceeded("lattice enumeration box too large");
    double best = std::numeric_limits<double>::infinity();
    for_each_lattice(d, R, [&](const Eigen::VectorXd& v) { best = std::min(best, nrm(v)); });
    nrm.shortest_vector = best;
    return nrm;
}

Eigen::VectorXd torus_representative(const Eigen::VectorXd& diff, const AdaptedNorm& nrm) {
    const int d = nrm.split.d;
    Eigen::VectorXd base = diff;
    for (int i = 0; i < d; ++i) base(i) -= std::round(base(i));
    // ||v*||' <= ||base||' <= equiv_upper*sqrt(d)/2, so |v*|_2 <= equiv_upper*sqrt(d)
    // and the integer shift is within that plus the base offset.
    const int R =
        static_cast<int>(std::ceil(nrm.equiv_upper * std::sqrt(static_cast<double>(d)) + 0.5));
    Eigen::VectorXd best = base;
    double best_norm = nrm(base);
    for_each_lattice(d, R, [&](const Eigen::VectorXd& k) {
        Eigen::VectorXd cand = base + k;
        const double nv = nrm(cand);
        if (nv < best_norm) {
            best_norm = nv;
            best = cand;
        }
    });
    return best;
}

double torus_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const AdaptedNorm& nrm) {
    return nrm(torus_representative(x - y, nrm));
}

HyperbolicConstants hyperbolic_constants(const AdaptedNorm& nrm, const Int& max_factor) {
    if (max_factor <= 0) throw DomainError("invariant factor must be positive");
    HyperbolicConstants c;
    c.shortest_vector = nrm.shortest_vector;
    c.expansiveness_constant =
        nrm.shortest_vector / (2.0 * std::max(nrm.norm_of_map, nrm.norm_of_map_inv));
    c.gap_exponent = 1.0 + std::log(nrm.norm_of_map) / std::log(1.0 / nrm.lambda);
    c.gap_scale = std::min(0.999, nrm.equiv_lower / static_cast<double>(max_factor));
    return c;
}

HyperbolicConstants hyperbolic_constants(const AdaptedNorm& nrm, const SubgroupBasis& H) {
    if (H.rank < H.d) throw RankDeficient("increment subgroup does not span the lattice");
    Int a_max = H.factors.empty() ? Int(1) : H.factors.back();
    return hyperbolic_constants(nrm, a_max);
}

ExpansivenessReport expansiveness_report(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                         const AdaptedNorm& nrm, double eps, long long cap) {
    if (eps <= 0.0) throw DomainError("eps must be positive");
    ExpansivenessReport rep;
    Eigen::VectorXd v = torus_representative(y - x, nrm);
    rep.distance = nrm(v);
    rep.stable_norm = nrm.stable_part(v);
    rep.unstable_norm = nrm.unstable_part(v);
    rep.within_eps = rep.distance < eps;
    if (!rep.within_eps) {
        rep.forward_horizon = rep.backward_horizon = -1; // never eps-close
        rep.unstable_bound = rep.stable_bound = std::numeric_limits<double>::infinity();
        return rep;
    }
    auto horizon = [&](const Eigen::MatrixXd& step) {
        Eigen::VectorXd w = v;
        long long h = 0;
        while (h < cap) {
            w = torus_representative(step * w, nrm);
            if (nrm(w) >= eps) break;
            ++h;
        }
        return h;
    };
    rep.forward_horizon = horizon(nrm.split.map);
    rep.backward_horizon = horizon(nrm.split.map_inv);
    rep.unstable_bound = std::pow(nrm.lambda, static_cast<double>(rep.forward_horizon)) * eps;
    rep.stable_bound = std::pow(nrm.lambda, static_cast<double>(rep.backward_horizon)) * eps;
    return rep;
}

Eigen::VectorXd local_product(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const AdaptedNorm& nrm, double eps) {
    Eigen::VectorXd v = torus_representative(y - x, nrm);
    if (nrm(v) >= eps) throw TooFar("points are not within eps of each other");
    Eigen::VectorXd z = x + nrm.split.proj_stable * v;
    for (int i = 0; i < z.size(); ++i) z(i) -= std::floor(z(i));
    return z;
}

ShadowResult shadow_orbit(const std::vector<Eigen::VectorXd>& orbit, const AdaptedNorm& nrm,
                          double alpha) {
    if (orbit.empty()) throw DomainError("empty orbit");
    if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
    const size_t m = orbit.size();
    const double lambda = nrm.lambda;
    if (alpha * (1.0 + nrm.norm_of_map) / (1.0 - lambda) >= 0.5 * nrm.shortest_vector)
        throw DomainError("alpha too large for the injectivity radius");

    const double tol = std::max(alpha, 1e-12);
    std::vector<Eigen::VectorXd> dev; // representative of x_{k+1} - A x_k
    dev.reserve(m - 1);
    for (size_t k = 0; k + 1 < m; ++k) {
        Eigen::VectorXd v = torus_representative(orbit[k + 1] - nrm.split.map * orbit[k], nrm);
        if (nrm(v) >= tol && alpha > 0.0) throw NotPseudoOrbit("step deviation exceeds alpha");
        if (nrm(v) > 1e-9 && alpha == 0.0) throw NotPseudoOrbit("not a true orbit");
        dev.push_back(std::move(v));
    }

    // Corrections, each propagated only through contracting directions:
    // stable anchored at the first point, unstable at the last.
    std::vector<Eigen::VectorXd> ds(m), du(m);
    ds[0] = Eigen::VectorXd::Zero(nrm.split.d);
    for (size_t k = 0; k + 1 < m; ++k)
        ds[k + 1] = nrm.split.map * ds[k] - nrm.split.proj_stable * dev[k];
    du[m - 1] = Eigen::VectorXd::Zero(nrm.split.d);
    for (size_t k = m - 1; k-- > 0;)
        du[k] = nrm.split.map_inv * (du[k + 1] + nrm.split.proj_unstable * dev[k]);

    ShadowResult res;
    res.observed = 0.0;
    for (size_t k = 0; k < m; ++k) res.observed = std::max(res.observed, nrm(ds[k] + du[k]));
    double diam = 0.0;
    for (size_t k = 1; k < m; ++k) diam = std::max(diam, torus_distance(orbit[k], orbit[0], nrm));
    res.beta = alpha / (1.0 - lambda) +
               std::pow(lambda, static_cast<double>(m - 1)) * diam;
    Eigen::VectorXd z = orbit[0] + ds[0] + du[0];
    for (int i = 0; i < z.size(); ++i) z(i) -= std::floor(z(i));
    res.point = z;
    return res;
}

} // namespace torwalk
