#pragma once

#include <string>
#include <vector>

#include "torwalk/intmat.hpp"

namespace torwalk {

// U * M * V = diag(factors..., 0...) with U, V unimodular and
// factors[i] | factors[i+1]. Only the nonzero invariant factors are kept;
// rank == factors.size().
struct SmithDecomposition {
    IntMat U;  // rows(M) x rows(M)
    IntMat V;  // cols(M) x cols(M)
    std::vector<Int> factors;
    int rank = 0;

    IntMat diagonal(int rows, int cols) const;
};

SmithDecomposition smith_normal_form(const IntMat& M);

// Smallest subgroup of Z^d containing a generating set and stable under an
// integer matrix with |det| = 1. Stored through a Smith decomposition of the
// generator stack: the subgroup is { sum_i c_i * factors[i] * basis[i] }, and
// basis extends to a basis of Z^d.
struct SubgroupBasis {
    int d = 0;
    int rank = 0;
    std::vector<Int> factors;                 // nonzero invariant factors
    std::vector<std::vector<Int>> basis;      // rank columns of U^-1
    IntMat U;                                 // coordinate map: coords(x) = U*x

    bool contains(const std::vector<Int>& x) const;
};

// Subgroup generated by A^k(x - y) for x, y in the support and
// 0 <= k <= d-1; higher powers add nothing since A satisfies its own
// characteristic polynomial and |det A| = 1.
SubgroupBasis invariant_subgroup(const IntMat& A,
                                 const std::vector<std::vector<long long>>& support);

struct ConvergenceReport {
    bool converges = false;
    std::string diagnostic;
};

// The walk equidistributes on (Z/nZ)^d iff the increment subgroup has full
// rank and every invariant factor is coprime to n.
ConvergenceReport convergence_check(const SubgroupBasis& H, long long n);

} // namespace torwalk
