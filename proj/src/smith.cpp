#include "torwalk/smith.hpp"

#include <sstream>

#include "torwalk/errors.hpp"

namespace torwalk {

IntMat SmithDecomposition::diagonal(int rows, int cols) const {
    IntMat d(rows, cols);
    for (size_t i = 0; i < factors.size(); ++i) d.at(static_cast<int>(i), static_cast<int>(i)) = factors[i];
    return d;
}

namespace {

Int int_abs(const Int& x) { return x < 0 ? -x : x; }

} // namespace

SmithDecomposition smith_normal_form(const IntMat& Min) {
    int r = Min.rows(), c = Min.cols();
    IntMat M = Min;
    IntMat U = IntMat::identity(r);
    IntMat V = IntMat::identity(c);

    auto add_row = [&](int dst, int src, const Int& f) {
        for (int j = 0; j < c; ++j) M.at(dst, j) += f * M.at(src, j);
        for (int j = 0; j < r; ++j) U.at(dst, j) += f * U.at(src, j);
    };
    auto add_col = [&](int dst, int src, const Int& f) {
        for (int i = 0; i < r; ++i) M.at(i, dst) += f * M.at(i, src);
        for (int i = 0; i < c; ++i) V.at(i, dst) += f * V.at(i, src);
    };
    auto swap_row = [&](int i, int j) { M.swap_rows(i, j); U.swap_rows(i, j); };
    auto swap_col = [&](int i, int j) { M.swap_cols(i, j); V.swap_cols(i, j); };

    int t = 0;
    int lim = std::min(r, c);
    while (t < lim) {
        // Pivot: smallest |entry| in the trailing submatrix.
        int pi = -1, pj = -1;
        for (int i = t; i < r; ++i)
            for (int j = t; j < c; ++j)
                if (M.at(i, j) != 0 &&
                    (pi < 0 || int_abs(M.at(i, j)) < int_abs(M.at(pi, pj)))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break; // all zero
        swap_row(t, pi);
        swap_col(t, pj);

        bool clean = true;
        for (int i = t + 1; i < r; ++i) {
            if (M.at(i, t) == 0) continue;
            Int q = M.at(i, t) / M.at(t, t);
            add_row(i, t, -q);
            if (M.at(i, t) != 0) clean = false;
        }
        for (int j = t + 1; j < c; ++j) {
            if (M.at(t, j) == 0) continue;
            Int q = M.at(t, j) / M.at(t, t);
            add_col(j, t, -q);
            if (M.at(t, j) != 0) clean = false;
        }
        if (!clean) continue; // remainders became new, smaller pivot candidates

        // Divisibility fix: pivot must divide every remaining entry.
        bool fixed = true;
        for (int i = t + 1; i < r && fixed; ++i)
            for (int j = t + 1; j < c && fixed; ++j)
                if (M.at(i, j) % M.at(t, t) != 0) {
                    add_row(t, i, 1);
                    fixed = false;
                }
        if (!fixed) continue;
        ++t;
    }

    SmithDecomposition out;
    for (int i = 0; i < t; ++i) {
        Int v = M.at(i, i);
        if (v < 0) {
            // flip sign via the corresponding row of U
            for (int j = 0; j < c; ++j) M.at(i, j) = -M.at(i, j);
            for (int j = 0; j < r; ++j) U.at(i, j) = -U.at(i, j);
            v = -v;
        }
        out.factors.push_back(v);
    }
    out.rank = t;
    out.U = std::move(U);
    out.V = std::move(V);
    return out;
}

bool SubgroupBasis::contains(const std::vector<Int>& x) const {
    if (static_cast<int>(x.size()) != d) throw DomainError("vector dimension mismatch");
    std::vector<Int> coord = U * x;
    for (int i = 0; i < d; ++i) {
        if (i < rank) {
            if (coord[i] % factors[i] != 0) return false;
        } else if (coord[i] != 0) {
            return false;
        }
    }
    return true;
}

SubgroupBasis invariant_subgroup(const IntMat& A,
                                 const std::vector<std::vector<long long>>& support) {
    if (!A.square()) throw DomainError("map must be square");
    int d = A.rows();
    if (!is_unimodular(A)) throw DomainError("map must have determinant +-1");

    std::vector<std::vector<Int>> gens;
    std::vector<IntMat> powers(static_cast<size_t>(d));
    powers[0] = IntMat::identity(d);
    for (int k = 1; k < d; ++k) powers[k] = powers[k - 1] * A;

    for (const auto& x : support)
        for (const auto& y : support) {
            std::vector<Int> diff(d);
            bool zero = true;
            for (int i = 0; i < d; ++i) {
                diff[i] = Int(x[i]) - Int(y[i]);
                if (diff[i] != 0) zero = false;
            }
            if (zero) continue;
            for (int k = 0; k < d; ++k) gens.push_back(powers[k] * diff);
        }

    IntMat G(d, static_cast<int>(gens.size()));
    for (size_t j = 0; j < gens.size(); ++j)
        for (int i = 0; i < d; ++i) G.at(i, static_cast<int>(j)) = gens[j][i];

    SmithDecomposition snf = smith_normal_form(G);

    SubgroupBasis H;
    H.d = d;
    H.rank = snf.rank;
    H.factors = snf.factors;
    H.U = snf.U;
    IntMat Uinv = inverse_unimodular(snf.U);
    for (int i = 0; i < snf.rank; ++i) {
        std::vector<Int> col(d);
        for (int j = 0; j < d; ++j) col[j] = Uinv.at(j, i);
        H.basis.push_back(std::move(col));
    }
    return H;
}

ConvergenceReport convergence_check(const SubgroupBasis& H, long long n) {
    if (n < 2) throw DomainError("modulus must be at least 2");
    ConvergenceReport rep;
    if (H.rank < H.d) {
        std::ostringstream os;
        os << "increment subgroup has rank " << H.rank << " < " << H.d
           << "; the walk stays on a union of proper cosets";
        rep.diagnostic = os.str();
        return rep;
    }
    for (int i = 0; i < H.rank; ++i) {
        Int g = gcd(H.factors[i], Int(n));
        if (g != 1) {
            std::ostringstream os;
            os << "invariant factor " << H.factors[i] << " shares divisor " << g
               << " with n = " << n << "; the walk misses residue classes";
            rep.diagnostic = os.str();
            return rep;
        }
    }
    rep.converges = true;
    rep.diagnostic = "full rank and all invariant factors coprime to n";
    return rep;
}

} // namespace torwalk
