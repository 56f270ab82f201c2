#pragma once

#include <cstdint>
#include <vector>

#include "torwalk/intmat.hpp"
#include "torwalk/measure.hpp"

namespace torwalk {

// Distribution on (Z/nZ)^d, dense, indexed little-endian:
// index(x) = sum_c x_c * n^c.
struct TorusDistribution {
    long long n = 0;
    int d = 0;
    std::vector<double> probs;

    long long states() const { return static_cast<long long>(probs.size()); }
    long long index_of(const std::vector<long long>& x) const;
    std::vector<long long> point_of(long long index) const;
};

struct WalkConfig {
    IntMat A;
    IncrementMeasure mu;
    long long n = 0;
    long long horizon = 0;
    std::uint64_t seed = 0;
    long long replicates = 1;
};

// End states of `replicates` independent runs of X <- A X + B mod n started
// at 0. Replicate r is deterministic given (seed, r) regardless of the
// thread count.
std::vector<std::vector<long long>> simulate_walk(const WalkConfig& cfg, int threads = 1);

// Exact law of X_t via t push-forward steps (a permutation of the state
// space followed by a |supp|-term convolution). Throws BudgetExceeded when
// n^d exceeds max_states.
TorusDistribution exact_distribution(const IntMat& A, const IncrementMeasure& mu,
                                     long long n, long long t,
                                     long long max_states = (1LL << 27));

// Empirical law of X_t from Monte Carlo replicates.
TorusDistribution empirical_distribution(const IntMat& A, const IncrementMeasure& mu,
                                         long long n, long long t, long long replicates,
                                         std::uint64_t seed, int threads = 1);

// One push-forward step of an existing law; same semantics as one iteration
// inside exact_distribution.
TorusDistribution step_distribution(const TorusDistribution& p, const IntMat& A,
                                    const IncrementMeasure& mu);

// Total variation distances (compensated summation).
double tv_to_uniform(const TorusDistribution& p);
double tv_distance(const TorusDistribution& p, const TorusDistribution& q);

enum class LowerBoundMode {
    kDerived,      // gap normalized by log of the state count, d*log n
    kLiteral  // gap normalized by log n
};

struct LowerBoundValue {
    double raw = 0.0;      // may be negative once the walk has mixed
    double clamped = 0.0;  // max(raw, 0)
};

// Entropy-production lower bound on the distance to uniform at time t:
// the walk's entropy grows at most t*H(mu), so while t*H(mu) + log 2 is
// short of log(states) the distribution must still be far from uniform.
LowerBoundValue entropy_lower_bound(const IncrementMeasure& mu, long long n, int d,
                                    long long t, LowerBoundMode mode = LowerBoundMode::kDerived);

// Smallest e in [0,1] with e*log(N-1) + H_b(e) >= entropy_gap, i.e. the
// minimal total variation compatible with an entropy gap under the
// continuity bound for entropy on N states. Bisection on [0, (N-1)/N]: the
// left side increases there from 0 to exactly log N (and decreases beyond),
// so the first crossing is found. DomainError if gap is outside [0, log N].
double fannes_audenaert_gap(double entropy_gap, long long N);

} // namespace torwalk
