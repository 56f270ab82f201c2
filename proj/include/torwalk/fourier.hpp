#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "torwalk/hyperbolic.hpp"
#include "torwalk/intmat.hpp"
#include "torwalk/measure.hpp"
#include "torwalk/smith.hpp"

namespace torwalk {

// Character of the increment measure at a dual lattice point:
// sum_x mu(x) e^{2 pi i <x, rho> / n}.
std::complex<double> mu_hat(const IncrementMeasure& mu, const std::vector<long long>& rho,
                            long long n);

// Product formula for the walk character after t steps:
// prod_{j<t} mu_hat((A^T)^j rho mod n). Equals the DFT of the exact
// t-step distribution at rho.
std::complex<double> walk_character(const IncrementMeasure& mu, const IntMat& A,
                                    std::vector<long long> rho, long long n, long long t);

struct L2Bound {
    double sum_sq = 0.0;  // sum over rho != 0 of |walk character|^2
    double tv_bound = 0.0; // half the square root of sum_sq
};

// Computes the l2 character sum by decomposing the dual lattice into
// A^T-orbit cycles and sliding length-t windows along each cycle with
// cyclic log-prefix sums (zero factors short-circuited), so the cost is
// linear in n^d instead of n^d * t.
L2Bound l2_bound(const IncrementMeasure& mu, const IntMat& A, long long n, long long t,
                 long long max_states = 1LL << 27, int threads = 1);

// f(xi) = min over k < d of |sum_x mu(x) e^{2 pi i <A^k x, xi>}|^2 on the
// continuous torus.
double f_min(const Eigen::VectorXd& xi, const IncrementMeasure& mu, const IntMat& A);

// Rational torus points where every character of the increment subgroup is
// trivial; the only places the factors of the walk character can sit at
// modulus one.
struct BadSetW {
    int d = 0;
    std::vector<Int> factors;
    std::vector<std::vector<Rational>> points;  // exact coordinates in [0,1)
    std::vector<Eigen::VectorXd> points_double;
};

// Enumerates W = { U^T (k_i / a_i) mod 1 } from the Smith data of the
// increment subgroup and verifies closure under A^T exactly. Throws
// RankDeficient when the subgroup does not span the lattice.
BadSetW bad_set_W(const SubgroupBasis& H, const IntMat& A);

struct GammaCertificate {
    double eta = 0.0;
    double gamma = 0.0;           // certified sup of f outside the eta-neighbourhood of W
    double grid_step = 0.0;
    double lipschitz_bound = 0.0; // Lipschitz constant used for the slack
    long long grid_points = 0;
    long long excluded = 0;       // near-W grid points that would have raised the max
    double max_f_retained = 0.0;  // raw grid maximum before the slack
};

// Certified bound gamma >= sup { f(xi) : d'(xi, W) >= eta } via an offset
// grid of step h: every such xi lies within sqrt(d) h / 2 of a grid point
// whose distance to W is at least eta minus the norm-equivalence slack, so
// gamma = (max f over those grid points) + L sqrt(d) h / 2 is an upper
// bound. Issued only when gamma + L h < 1; otherwise NotContractive.
// h = 0 selects the default step eta / (8 max_k L_k).
GammaCertificate certified_gamma(const IncrementMeasure& mu, const IntMat& A, const BadSetW& W,
                                 double eta, const AdaptedNorm& nrm, double h = 0.0,
                                 int threads = 1);

// Closed-form tail bound (exp(m0 m1 k gamma^r) - 1) / 4.
double theoretical_bound(long long m0, long long m1, long long k, double gamma, long long r);

} // namespace torwalk
