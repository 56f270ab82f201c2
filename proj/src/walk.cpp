#include "torwalk/walk.hpp"

#include <cmath>
#include <cstring>

#include "torwalk/errors.hpp"
#include "torwalk/parallel.hpp"
#include "torwalk/rng.hpp"

namespace torwalk {

long long TorusDistribution::index_of(const std::vector<long long>& x) const {
    long long idx = 0, stride = 1;
    for (int c = 0; c < d; ++c) {
        long long v = ((x[c] % n) + n) % n;
        idx += v * stride;
        stride *= n;
    }
    return idx;
}

std::vector<long long> TorusDistribution::point_of(long long index) const {
    std::vector<long long> x(d);
    for (int c = 0; c < d; ++c) {
        x[c] = index % n;
        index /= n;
    }
    return x;
}

namespace {

long long checked_state_count(long long n, int d, long long max_states) {
    long long count = 1;
    for (int i = 0; i < d; ++i) {
        if (count > max_states / n)
            throw BudgetExceeded("state space n^d exceeds the configured budget");
        count *= n;
    }
    if (count > max_states)
        throw BudgetExceeded("state space n^d exceeds the configured budget");
    return count;
}

std::vector<std::vector<long long>> mod_matrix(const IntMat& A, long long n) {
    std::vector<std::vector<long long>> m(A.rows(), std::vector<long long>(A.cols()));
    IntMat r = mod_reduce(A, n);
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) m[i][j] = static_cast<long long>(r.at(i, j));
    return m;
}

// index(M x mod n) for every state index, built incrementally: stepping the
// little-endian odometer by one adds column c of M (mod n) to the value,
// and a digit wrap adds the column once more since -(n-1) == 1 (mod n).
std::vector<long long> linear_index_table(const std::vector<std::vector<long long>>& M,
                                          long long n, int d, long long count) {
    std::vector<long long> table(static_cast<size_t>(count));
    std::vector<long long> digit(d, 0), value(d, 0), stride(d, 1);
    for (int c = 1; c < d; ++c) stride[c] = stride[c - 1] * n;
    for (long long idx = 0;; ++idx) {
        long long vi = 0;
        for (int c = 0; c < d; ++c) vi += value[c] * stride[c];
        table[static_cast<size_t>(idx)] = vi;
        if (idx + 1 == count) break;
        for (int c = 0; c < d; ++c) {
            for (int r = 0; r < d; ++r) {
                value[r] += M[r][c];
                if (value[r] >= n) value[r] -= n;
            }
            if (++digit[c] < n) break;
            digit[c] = 0; // wrap: loop continues and the next column is added
        }
    }
    return table;
}

// One convolution push-forward: next[y] = sum_b mu(b) cur[A^-1 (y - b)],
// with index(y - b) tracked by a per-b odometer walker.
void pushforward(const std::vector<double>& cur, std::vector<double>& next,
                 const std::vector<long long>& ainv_idx, const IncrementMeasure& mu,
                 const std::vector<double>& w, long long n, int d, long long count) {
    std::vector<long long> stride(d, 1);
    for (int c = 1; c < d; ++c) stride[c] = stride[c - 1] * n;
    std::fill(next.begin(), next.end(), 0.0);
    std::vector<long long> digit(d), wdigit(d);
    for (size_t b = 0; b < mu.size(); ++b) {
        // start: y = 0, w = -b mod n
        std::fill(digit.begin(), digit.end(), 0);
        long long widx = 0;
        for (int c = 0; c < d; ++c) {
            wdigit[c] = ((-mu.points[b][c]) % n + n) % n;
            widx += wdigit[c] * stride[c];
        }
        double wb = w[b];
        for (long long y = 0;; ++y) {
            next[static_cast<size_t>(y)] +=
                wb * cur[static_cast<size_t>(ainv_idx[static_cast<size_t>(widx)])];
            if (y + 1 == count) break;
            for (int c = 0; c < d; ++c) {
                if (++wdigit[c] < n) {
                    widx += stride[c];
                } else {
                    wdigit[c] = 0;
                    widx -= stride[c] * (n - 1);
                }
                if (++digit[c] < n) break;
                digit[c] = 0;
            }
        }
    }
}

// Sampling thresholds: replicate category = first i with r64 < t[i].
std::vector<std::uint64_t> sampling_thresholds(const IncrementMeasure& mu) {
    std::vector<std::uint64_t> t(mu.size());
    Rational cum = 0;
    Int two64 = Int(1) << 64;
    for (size_t i = 0; i < mu.size(); ++i) {
        cum += mu.weights[i];
        Int scaled = (numerator(cum) * two64) / denominator(cum);
        if (scaled >= two64) scaled = two64 - 1;
        t[i] = scaled.convert_to<std::uint64_t>();
    }
    t.back() = ~0ULL; // the last category absorbs the top of the range
    return t;
}

} // namespace

std::vector<std::vector<long long>> simulate_walk(const WalkConfig& cfg, int threads) {
    cfg.mu.validate();
    if (cfg.n < 2) throw DomainError("modulus must be at least 2");
    if (cfg.A.rows() != cfg.mu.d) throw DomainError("matrix/measure dimension mismatch");
    if (!is_unimodular(cfg.A)) throw DomainError("map must have determinant +-1");
    int d = cfg.mu.d;
    long long n = cfg.n;
    auto Amod = mod_matrix(cfg.A, n);
    auto thresholds = sampling_thresholds(cfg.mu);

    std::vector<std::vector<long long>> out(static_cast<size_t>(cfg.replicates));
    parallel_chunks(cfg.replicates, threads, [&](long long lo, long long hi) {
        std::vector<long long> x(d), y(d);
        for (long long r = lo; r < hi; ++r) {
            Rng rng = replicate_rng(cfg.seed, static_cast<std::uint64_t>(r));
            std::fill(x.begin(), x.end(), 0);
            for (long long s = 0; s < cfg.horizon; ++s) {
                std::uint64_t u = rng.next();
                size_t b = 0;
                while (u >= thresholds[b]) ++b;
                for (int i = 0; i < d; ++i) {
                    long long acc = cfg.mu.points[b][i] % n;
                    for (int j = 0; j < d; ++j) acc += Amod[i][j] * x[j];
                    y[i] = ((acc % n) + n) % n;
                }
                std::swap(x, y);
            }
            out[static_cast<size_t>(r)] = x;
        }
    });
    return out;
}

TorusDistribution exact_distribution(const IntMat& A, const IncrementMeasure& mu,
                                     long long n, long long t, long long max_states) {
    mu.validate();
    if (n < 2) throw DomainError("modulus must be at least 2");
    if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
    if (!is_unimodular(A)) throw DomainError("map must have determinant +-1");
    int d = mu.d;
    long long count = checked_state_count(n, d, max_states);

    TorusDistribution dist;
    dist.n = n;
    dist.d = d;
    dist.probs.assign(static_cast<size_t>(count), 0.0);
    dist.probs[0] = 1.0;
    if (t == 0) return dist;

    auto AinvMod = mod_matrix(inverse_unimodular(A), n);
    auto ainv_idx = linear_index_table(AinvMod, n, d, count);

    std::vector<double> w(mu.size());
    for (size_t b = 0; b < mu.size(); ++b) w[b] = static_cast<double>(mu.weights[b]);

    std::vector<double> next(static_cast<size_t>(count));
    for (long long step = 0; step < t; ++step) {
        pushforward(dist.probs, next, ainv_idx, mu, w, n, d, count);
        std::swap(dist.probs, next);
    }
    return dist;
}

TorusDistribution step_distribution(const TorusDistribution& p, const IntMat& A,
                                    const IncrementMeasure& mu) {
    mu.validate();
    if (p.n < 2 || p.d != mu.d) throw DomainError("distribution/measure mismatch");
    if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
    if (!is_unimodular(A)) throw DomainError("map must have determinant +-1");
    long long count = p.states();
    auto AinvMod = mod_matrix(inverse_unimodular(A), p.n);
    auto ainv_idx = linear_index_table(AinvMod, p.n, p.d, count);
    std::vector<double> w(mu.size());
    for (size_t b = 0; b < mu.size(); ++b) w[b] = static_cast<double>(mu.weights[b]);
    TorusDistribution out = p;
    pushforward(p.probs, out.probs, ainv_idx, mu, w, p.n, p.d, count);
    return out;
}

TorusDistribution empirical_distribution(const IntMat& A, const IncrementMeasure& mu,
                                         long long n, long long t, long long replicates,
                                         std::uint64_t seed, int threads) {
    WalkConfig cfg{A, mu, n, t, seed, replicates};
    auto ends = simulate_walk(cfg, threads);
    TorusDistribution dist;
    dist.n = n;
    dist.d = mu.d;
    long long count = checked_state_count(n, mu.d, 1LL << 27);
    std::vector<long long> hist(static_cast<size_t>(count), 0);
    for (const auto& x : ends) {
        long long idx = 0, stride = 1;
        for (int c = 0; c < mu.d; ++c) {
            idx += x[c] * stride;
            stride *= n;
        }
        hist[static_cast<size_t>(idx)]++;
    }
    dist.probs.resize(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i)
        dist.probs[static_cast<size_t>(i)] =
            static_cast<double>(hist[static_cast<size_t>(i)]) / static_cast<double>(replicates);
    return dist;
}

namespace {

// Neumaier compensated sum.
double stable_sum(const std::vector<double>& v) {
    double s = 0.0, comp = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            comp += (s - t) + x;
        else
            comp += (x - t) + s;
        s = t;
    }
    return s + comp;
}

} // namespace

double tv_to_uniform(const TorusDistribution& p) {
    double u = 1.0 / static_cast<double>(p.states());
    std::vector<double> diff(p.probs.size());
    for (size_t i = 0; i < p.probs.size(); ++i) diff[i] = std::abs(p.probs[i] - u);
    return 0.5 * stable_sum(diff);
}

double tv_distance(const TorusDistribution& p, const TorusDistribution& q) {
    if (p.n != q.n || p.d != q.d) throw DomainError("distribution shape mismatch");
    std::vector<double> diff(p.probs.size());
    for (size_t i = 0; i < p.probs.size(); ++i) diff[i] = std::abs(p.probs[i] - q.probs[i]);
    return 0.5 * stable_sum(diff);
}

LowerBoundValue entropy_lower_bound(const IncrementMeasure& mu, long long n, int d,
                                    long long t, LowerBoundMode mode) {
    if (n < 2) throw DomainError("modulus must be at least 2");
    double h = shannon_entropy(mu);
    double denom = mode == LowerBoundMode::kDerived ? d * std::log(static_cast<double>(n))
                                                    : std::log(static_cast<double>(n));
    LowerBoundValue v;
    v.raw = 1.0 - (static_cast<double>(t) * h + std::log(2.0)) / denom;
    v.clamped = std::max(v.raw, 0.0);
    return v;
}

double fannes_audenaert_gap(double entropy_gap, long long N) {
    if (N < 4) throw DomainError("state count must be at least 4");
    double logN = std::log(static_cast<double>(N));
    if (entropy_gap < 0.0 || entropy_gap > logN + 1e-12)
        throw DomainError("entropy gap outside [0, log N]");
    if (entropy_gap <= 0.0) return 0.0;
    double logNm1 = std::log(static_cast<double>(N - 1));
    auto phi = [&](double e) {
        double hb = 0.0;
        if (e > 0.0 && e < 1.0) hb = -e * std::log(e) - (1.0 - e) * std::log(1.0 - e);
        return e * logNm1 + hb;
    };
    double lo = 0.0, hi = static_cast<double>(N - 1) / static_cast<double>(N);
    if (entropy_gap >= phi(hi)) return hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (phi(mid) >= entropy_gap)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace torwalk
