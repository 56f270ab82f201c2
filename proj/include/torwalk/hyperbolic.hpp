#pragma once

#include <Eigen/Dense>
#include <vector>

#include "torwalk/intmat.hpp"
#include "torwalk/smith.hpp"

namespace torwalk {

// Invariant splitting R^d = E_s + E_u of a hyperbolic integer matrix:
// E_s spans the eigenvalues inside the unit circle, E_u the ones outside.
struct Splitting {
    int d = 0;
    int stable_dim = 0;
    int unstable_dim = 0;
    Eigen::MatrixXd map;            // A
    Eigen::MatrixXd map_inv;        // A^-1
    Eigen::MatrixXd stable_basis;   // d x stable_dim, orthonormal columns
    Eigen::MatrixXd unstable_basis; // d x unstable_dim, orthonormal columns
    Eigen::MatrixXd proj_stable;    // projection onto E_s along E_u
    Eigen::MatrixXd proj_unstable;  // complementary projection
};

// Throws NotHyperbolic when some eigenvalue has modulus one.
Splitting stable_unstable_split(const IntMat& A, double tau_eig = 1e-9);

// Norm ||x||' = max( sum_{k<l} |A^k x_s|_2 , sum_{k<l} |A^-k x_u|_2 ) where
// l is the least power contracting both factors in the Euclidean norm.
// Under it the map contracts E_s and its inverse contracts E_u by the same
// factor lambda < 1.
struct AdaptedNorm {
    Splitting split;
    int power = 1;              // l
    double lambda = 0.0;        // max of the two restricted operator norms, < 1
    double stable_rate = 0.0;   // ||A restricted to E_s||'
    double unstable_rate = 0.0; // ||A^-1 restricted to E_u||'
    double norm_of_map = 0.0;     // ||A||' (exact for 1-dim factors, else upper bound)
    double norm_of_map_inv = 0.0; // ||A^-1||'
    double equiv_upper = 0.0;   // ||x||' <= equiv_upper * |x|_2
    double equiv_lower = 0.5;   // ||x||' >= equiv_lower * |x|_2 (certified)
    double shortest_vector = 0.0; // min ||v||' over nonzero v in Z^d

    double stable_part(const Eigen::VectorXd& v) const;   // sum_{k<l} |A^k P_s v|
    double unstable_part(const Eigen::VectorXd& v) const; // sum_{k<l} |A^-k P_u v|
    double operator()(const Eigen::VectorXd& v) const;
};

AdaptedNorm adapted_norm(const Splitting& split);

// Lift of a point difference with minimal adapted norm, and the induced
// quotient metric on the torus.
Eigen::VectorXd torus_representative(const Eigen::VectorXd& diff, const AdaptedNorm& nrm);
double torus_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const AdaptedNorm& nrm);

// Derived geometric constants. max_factor is the largest invariant factor of
// the increment subgroup in play (1 for the full lattice): rational points
// ρ/n not in the degenerate set have some coordinate at least 1/(max_factor*n)
// away from it, which the lower equivalence constant converts to an adapted
// distance, giving gap_scale / n^gap_exponent after at most
// gap_exponent * log n expanding steps.
struct HyperbolicConstants {
    double shortest_vector = 0.0;
    double expansiveness_constant = 0.0; // radius below which orbits separate
    double gap_scale = 0.0;              // reported as c1
    double gap_exponent = 0.0;           // reported as c2
};

HyperbolicConstants hyperbolic_constants(const AdaptedNorm& nrm, const Int& max_factor = 1);

// Convenience overload taking the increment subgroup; throws RankDeficient
// when it does not span the full lattice.
HyperbolicConstants hyperbolic_constants(const AdaptedNorm& nrm, const SubgroupBasis& H);

// Orbit-separation report for a pair of torus points within eps:
// while the forward orbits stay eps-close up to time K+, the unstable part
// of the difference is at most lambda^{K+} * eps; backward likewise for the
// stable part.
struct ExpansivenessReport {
    bool within_eps = false;      // d(x, y) < eps at time 0
    long long forward_horizon = 0;  // largest k <= cap with all forward steps eps-close
    long long backward_horizon = 0;
    double stable_norm = 0.0;     // ||v_s||'
    double unstable_norm = 0.0;   // ||v_u||'
    double distance = 0.0;        // d(x, y)
    double unstable_bound = 0.0;  // lambda^{forward_horizon} * eps
    double stable_bound = 0.0;    // lambda^{backward_horizon} * eps
};

ExpansivenessReport expansiveness_report(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                         const AdaptedNorm& nrm, double eps, long long cap);

// Canonical intersection point [x, y] = x + P_s(rep(y - x)): lies on the
// stable set of x and the unstable set of y. Throws TooFar when
// d(x, y) >= eps.
Eigen::VectorXd local_product(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              const AdaptedNorm& nrm, double eps);

struct ShadowResult {
    Eigen::VectorXd point;   // start of the true orbit
    double beta = 0.0;       // certified shadowing radius
    double observed = 0.0;   // max adapted distance actually seen
};

// Finite-orbit shadowing: given points with d(A x_k, x_{k+1}) < alpha, finds
// a true orbit within alpha/(1-lambda). The stable component is anchored at
// the first point, the unstable one at the last, and the correction sequence
// is propagated through the contracting directions only, so no quantity is
// ever iterated through an expanding map.
ShadowResult shadow_orbit(const std::vector<Eigen::VectorXd>& orbit,
                          const AdaptedNorm& nrm, double alpha);

} // namespace torwalk
