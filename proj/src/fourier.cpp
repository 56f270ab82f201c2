#include "torwalk/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "torwalk/errors.hpp"
#include "torwalk/parallel.hpp"

namespace torwalk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kZeroModulus = 1e-300; // moduli below this are exact zeros

long long checked_pow(long long n, int d, long long limit, const char* what) {
    long long count = 1;
    for (int i = 0; i < d; ++i) {
        if (count > limit / n) throw BudgetExceeded(what);
        count *= n;
    }
    return count;
}

std::vector<std::vector<long long>> mod_matrix(const IntMat& A, long long n) {
    std::vector<std::vector<long long>> M(static_cast<size_t>(A.rows()),
                                          std::vector<long long>(static_cast<size_t>(A.cols())));
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            Int r = A.at(i, j) % n;
            if (r < 0) r += n;
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<long long>(r);
        }
    return M;
}

// Support points A^k x as double vectors with their weights, for k < d.
struct PushedSupport {
    std::vector<std::vector<Eigen::VectorXd>> points; // [k][support index]
    std::vector<double> weights;
};

PushedSupport push_support(const IncrementMeasure& mu, const IntMat& A) {
    const int d = A.rows();
    PushedSupport out;
    out.weights.reserve(mu.weights.size());
    for (const auto& w : mu.weights) out.weights.push_back(static_cast<double>(w));
    out.points.resize(static_cast<size_t>(d));
    std::vector<std::vector<Int>> cur;
    for (const auto& p : mu.points) {
        std::vector<Int> v(p.begin(), p.end());
        cur.push_back(std::move(v));
    }
    for (int k = 0; k < d; ++k) {
        auto& slot = out.points[static_cast<size_t>(k)];
        slot.reserve(cur.size());
        for (const auto& v : cur) {
            Eigen::VectorXd pv(d);
            for (int i = 0; i < d; ++i) pv(i) = static_cast<double>(v[static_cast<size_t>(i)]);
            slot.push_back(std::move(pv));
        }
        if (k + 1 < d)
            for (auto& v : cur) v = A * v;
    }
    return out;
}

} // namespace

std::complex<double> mu_hat(const IncrementMeasure& mu, const std::vector<long long>& rho,
                            long long n) {
    if (n < 1) throw DomainError("modulus must be positive");
    if (static_cast<int>(rho.size()) != mu.d) throw DomainError("dual point dimension mismatch");
    double re = 0.0, im = 0.0;
    for (size_t s = 0; s < mu.points.size(); ++s) {
        unsigned long long dot = 0;
        for (int i = 0; i < mu.d; ++i) {
            long long x = mu.points[s][static_cast<size_t>(i)] % n;
            if (x < 0) x += n;
            long long r = rho[static_cast<size_t>(i)] % n;
            if (r < 0) r += n;
            dot = (dot + static_cast<unsigned long long>(
                             static_cast<unsigned __int128>(x) * static_cast<unsigned long long>(r) %
                             static_cast<unsigned long long>(n))) %
                  static_cast<unsigned long long>(n);
        }
        const double w = static_cast<double>(mu.weights[s]);
        const double angle = kTwoPi * static_cast<double>(dot) / static_cast<double>(n);
        re += w * std::cos(angle);
        im += w * std::sin(angle);
    }
    return {re, im};
}

std::complex<double> walk_character(const IncrementMeasure& mu, const IntMat& A,
                                    std::vector<long long> rho, long long n, long long t) {
    if (t < 0) throw DomainError("negative horizon");
    const auto At = mod_matrix(A.transpose(), n);
    const int d = mu.d;
    std::complex<double> prod{1.0, 0.0};
    std::vector<long long> next(static_cast<size_t>(d));
    for (long long j = 0; j < t; ++j) {
        const std::complex<double> factor = mu_hat(mu, rho, n);
        if (std::abs(factor) < kZeroModulus) return {0.0, 0.0};
        prod *= factor;
        for (int i = 0; i < d; ++i) {
            unsigned long long acc = 0;
            for (int c = 0; c < d; ++c)
                acc = (acc + static_cast<unsigned long long>(
                                 static_cast<unsigned __int128>(At[static_cast<size_t>(i)]
                                                                  [static_cast<size_t>(c)]) *
                                 static_cast<unsigned long long>(rho[static_cast<size_t>(c)]) %
                                 static_cast<unsigned long long>(n))) %
                      static_cast<unsigned long long>(n);
            next[static_cast<size_t>(i)] = static_cast<long long>(acc);
        }
        rho = next;
    }
    return prod;
}

L2Bound l2_bound(const IncrementMeasure& mu, const IntMat& A, long long n, long long t,
                 long long max_states, int threads) {
    if (n < 2) throw DomainError("modulus must be at least 2");
    if (t < 0) throw DomainError("negative horizon");
    const int d = mu.d;
    const long long count = checked_pow(n, d, max_states, "dual lattice exceeds the state budget");
    const auto At = mod_matrix(A.transpose(), n);

    // Index-level permutation rho -> A^T rho mod n (little-endian mixed radix).
    std::vector<long long> rho(static_cast<size_t>(d)), img(static_cast<size_t>(d));
    std::vector<long long> perm(static_cast<size_t>(count));
    for (long long idx = 0; idx < count; ++idx) {
        long long rem = idx;
        for (int i = 0; i < d; ++i) {
            rho[static_cast<size_t>(i)] = rem % n;
            rem /= n;
        }
        for (int i = 0; i < d; ++i) {
            unsigned long long acc = 0;
            for (int c = 0; c < d; ++c)
                acc = (acc + static_cast<unsigned long long>(
                                 static_cast<unsigned __int128>(At[static_cast<size_t>(i)]
                                                                  [static_cast<size_t>(c)]) *
                                 static_cast<unsigned long long>(rho[static_cast<size_t>(c)]) %
                                 static_cast<unsigned long long>(n))) %
                      static_cast<unsigned long long>(n);
            img[static_cast<size_t>(i)] = static_cast<long long>(acc);
        }
        long long out = 0;
        for (int i = d - 1; i >= 0; --i) out = out * n + img[static_cast<size_t>(i)];
        perm[static_cast<size_t>(idx)] = out;
    }

    // Squared character moduli at every dual point.
    std::vector<double> mod_sq(static_cast<size_t>(count));
    parallel_chunks(count, threads, [&](long long lo, long long hi) {
        std::vector<long long> r(static_cast<size_t>(d));
        for (long long idx = lo; idx < hi; ++idx) {
            long long rem = idx;
            for (int i = 0; i < d; ++i) {
                r[static_cast<size_t>(i)] = rem % n;
                rem /= n;
            }
            mod_sq[static_cast<size_t>(idx)] = std::norm(mu_hat(mu, r, n));
        }
    });

    // Orbit cycles of the permutation, skipping the fixed point 0.
    std::vector<std::vector<long long>> cycles;
    std::vector<char> seen(static_cast<size_t>(count), 0);
    seen[0] = 1;
    for (long long idx = 1; idx < count; ++idx) {
        if (seen[static_cast<size_t>(idx)]) continue;
        std::vector<long long> cyc;
        long long cur = idx;
        while (!seen[static_cast<size_t>(cur)]) {
            seen[static_cast<size_t>(cur)] = 1;
            cyc.push_back(cur);
            cur = perm[static_cast<size_t>(cur)];
        }
        cycles.push_back(std::move(cyc));
    }

    // All length-t windowed products along each cycle from log-prefix sums.
    std::vector<double> partial(cycles.size(), 0.0);
    parallel_chunks(static_cast<long long>(cycles.size()), threads, [&](long long lo, long long hi) {
        for (long long ci = lo; ci < hi; ++ci) {
            const auto& cyc = cycles[static_cast<size_t>(ci)];
            const long long c = static_cast<long long>(cyc.size());
            std::vector<double> logs(static_cast<size_t>(c));
            std::vector<long long> zeros(static_cast<size_t>(c + 1), 0);
            double cycle_log = 0.0;
            long long cycle_zeros = 0;
            for (long long j = 0; j < c; ++j) {
                const double a = mod_sq[static_cast<size_t>(cyc[static_cast<size_t>(j)])];
                const bool zero = a < kZeroModulus;
                logs[static_cast<size_t>(j)] = zero ? 0.0 : std::log(a);
                zeros[static_cast<size_t>(j + 1)] = zeros[static_cast<size_t>(j)] + (zero ? 1 : 0);
                cycle_log += logs[static_cast<size_t>(j)];
                cycle_zeros += zero ? 1 : 0;
            }
            std::vector<double> prefix(static_cast<size_t>(c + 1), 0.0);
            for (long long j = 0; j < c; ++j)
                prefix[static_cast<size_t>(j + 1)] =
                    prefix[static_cast<size_t>(j)] + logs[static_cast<size_t>(j)];

            const long long full = t / c, rest = t % c;
            double sum = 0.0, comp = 0.0; // Neumaier accumulation
            auto add = [&sum, &comp](double x) {
                const double s = sum + x;
                if (std::abs(sum) >= std::abs(x)) comp += (sum - s) + x;
                else comp += (x - s) + sum;
                sum = s;
            };
            for (long long j = 0; j < c; ++j) {
                long long nz = full * cycle_zeros;
                double lg = static_cast<double>(full) * cycle_log;
                const long long end = j + rest;
                if (end <= c) {
                    nz += zeros[static_cast<size_t>(end)] - zeros[static_cast<size_t>(j)];
                    lg += prefix[static_cast<size_t>(end)] - prefix[static_cast<size_t>(j)];
                } else {
                    nz += (zeros[static_cast<size_t>(c)] - zeros[static_cast<size_t>(j)]) +
                          zeros[static_cast<size_t>(end - c)];
                    lg += (prefix[static_cast<size_t>(c)] - prefix[static_cast<size_t>(j)]) +
                          prefix[static_cast<size_t>(end - c)];
                }
                if (nz == 0) add(std::exp(lg));
            }
            partial[static_cast<size_t>(ci)] = sum + comp;
        }
    });

    double total = 0.0, comp = 0.0;
    for (double p : partial) {
        const double s = total + p;
        if (std::abs(total) >= std::abs(p)) comp += (total - s) + p;
        else comp += (p - s) + total;
        total = s;
    }
    L2Bound out;
    out.sum_sq = total + comp;
    out.tv_bound = 0.5 * std::sqrt(std::max(0.0, out.sum_sq));
    return out;
}

double f_min(const Eigen::VectorXd& xi, const IncrementMeasure& mu, const IntMat& A) {
    if (xi.size() != mu.d) throw DomainError("torus point dimension mismatch");
    const PushedSupport sup = push_support(mu, A);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pts : sup.points) {
        double re = 0.0, im = 0.0;
        for (size_t s = 0; s < pts.size(); ++s) {
            const double angle = kTwoPi * pts[s].dot(xi);
            re += sup.weights[s] * std::cos(angle);
            im += sup.weights[s] * std::sin(angle);
        }
        best = std::min(best, re * re + im * im);
    }
    return best;
}

BadSetW bad_set_W(const SubgroupBasis& H, const IntMat& A) {
    if (H.rank < H.d) throw RankDeficient("increment subgroup does not span the lattice");
    const int d = H.d;
    BadSetW W;
    W.d = d;
    W.factors = H.factors;

    long long size = 1;
    for (const auto& a : H.factors) {
        if (a > (1LL << 20) || size > (1LL << 20) / static_cast<long long>(a))
            throw BudgetExceeded("bad set too large to enumerate");
        size *= static_cast<long long>(a);
    }

    const IntMat Ut = H.U.transpose();
    std::vector<long long> k(static_cast<size_t>(d), 0);
    auto wrap = [](Rational q) {
        Int num = boost::multiprecision::numerator(q);
        Int den = boost::multiprecision::denominator(q);
        Int m = num % den;
        if (m < 0) m += den;
        return Rational(m, den);
    };
    for (long long it = 0; it < size; ++it) {
        std::vector<Rational> c(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i)
            c[static_cast<size_t>(i)] =
                Rational(Int(k[static_cast<size_t>(i)]), W.factors[static_cast<size_t>(i)]);
        std::vector<Rational> w(static_cast<size_t>(d), Rational(0));
        for (int i = 0; i < d; ++i) {
            Rational acc(0);
            for (int j = 0; j < d; ++j) acc += Rational(Ut.at(i, j)) * c[static_cast<size_t>(j)];
            w[static_cast<size_t>(i)] = wrap(acc);
        }
        Eigen::VectorXd wd(d);
        for (int i = 0; i < d; ++i) wd(i) = static_cast<double>(w[static_cast<size_t>(i)]);
        W.points.push_back(std::move(w));
        W.points_double.push_back(std::move(wd));

        int i = 0;
        while (i < d && ++k[static_cast<size_t>(i)] ==
                            static_cast<long long>(W.factors[static_cast<size_t>(i)]))
            k[static_cast<size_t>(i++)] = 0;
        if (i == d && it + 1 < size) throw DomainError("bad set enumeration out of sync");
    }

    // Exact closure check under A^T.
    const IntMat At = A.transpose();
    auto key = [](const std::vector<Rational>& p) {
        std::string s;
        for (const auto& q : p) {
            s += q.str();
            s += ',';
        }
        return s;
    };
    std::vector<std::string> keys;
    for (const auto& p : W.points) keys.push_back(key(p));
    std::sort(keys.begin(), keys.end());
    for (const auto& p : W.points) {
        std::vector<Rational> img(static_cast<size_t>(d), Rational(0));
        for (int i = 0; i < d; ++i) {
            Rational acc(0);
            for (int j = 0; j < d; ++j) acc += Rational(At.at(i, j)) * p[static_cast<size_t>(j)];
            img[static_cast<size_t>(i)] = wrap(acc);
        }
        if (!std::binary_search(keys.begin(), keys.end(), key(img)))
            throw DomainError("bad set is not invariant under the transposed map");
    }
    return W;
}

GammaCertificate certified_gamma(const IncrementMeasure& mu, const IntMat& A, const BadSetW& W,
                                 double eta, const AdaptedNorm& nrm, double h, int threads) {
    if (eta <= 0.0) throw DomainError("eta must be positive");
    const int d = mu.d;
    if (W.d != d || nrm.split.d != d) throw DomainError("dimension mismatch");

    // eta must stay below half the minimal pairwise distance inside W.
    if (W.points_double.size() > 1 && W.points_double.size() <= 4096) {
        double minpair = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < W.points_double.size(); ++i)
            for (size_t j = i + 1; j < W.points_double.size(); ++j)
                minpair = std::min(minpair,
                                   torus_distance(W.points_double[i], W.points_double[j], nrm));
        if (eta >= 0.5 * minpair)
            throw DomainError("eta exceeds half the pairwise separation of the bad set");
    }

    // Lipschitz constant of each f_k: the gradient of the cosine double sum
    // is bounded by 2 pi sum_{x,y} mu(x) mu(y) |A^k (x - y)|.
    double lip = 0.0;
    {
        std::vector<std::vector<Int>> diffs;
        std::vector<double> wprod;
        for (size_t a = 0; a < mu.points.size(); ++a)
            for (size_t b = 0; b < mu.points.size(); ++b) {
                std::vector<Int> v(static_cast<size_t>(d));
                for (int i = 0; i < d; ++i)
                    v[static_cast<size_t>(i)] = Int(mu.points[a][static_cast<size_t>(i)]) -
                                                Int(mu.points[b][static_cast<size_t>(i)]);
                diffs.push_back(std::move(v));
                wprod.push_back(static_cast<double>(mu.weights[a]) *
                                static_cast<double>(mu.weights[b]));
            }
        for (int k = 0; k < d; ++k) {
            double Lk = 0.0;
            for (size_t s = 0; s < diffs.size(); ++s) {
                double nsq = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double v = static_cast<double>(diffs[s][static_cast<size_t>(i)]);
                    nsq += v * v;
                }
                Lk += wprod[s] * std::sqrt(nsq);
            }
            lip = std::max(lip, kTwoPi * Lk);
            if (k + 1 < d)
                for (auto& v : diffs) v = A * v;
        }
    }

    GammaCertificate cert;
    cert.eta = eta;
    cert.lipschitz_bound = lip;

    if (h <= 0.0) h = lip > 1e-12 ? eta / (8.0 * lip) : 0.25;
    long long m = std::max<long long>(2, static_cast<long long>(std::ceil(1.0 / h)));
    const double step = 1.0 / static_cast<double>(m);
    cert.grid_step = step;
    const double cover = 0.5 * std::sqrt(static_cast<double>(d)) * step; // Euclidean cell radius
    const double retain_margin = eta - nrm.equiv_upper * cover;

    double total_cells = 1;
    for (int i = 0; i < d; ++i) {
        total_cells *= static_cast<double>(m);
        if (total_cells > 5e8) throw BudgetExceeded("gamma grid too large");
    }
    const long long cells = static_cast<long long>(total_cells);

    const PushedSupport sup = push_support(mu, A);
    const auto eval_f = [&](const Eigen::VectorXd& xi) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pts : sup.points) {
            double re = 0.0, im = 0.0;
            for (size_t s = 0; s < pts.size(); ++s) {
                const double angle = kTwoPi * pts[s].dot(xi);
                re += sup.weights[s] * std::cos(angle);
                im += sup.weights[s] * std::sin(angle);
            }
            best = std::min(best, re * re + im * im);
        }
        return best;
    };
    const auto dist_to_W = [&](const Eigen::VectorXd& xi) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : W.points_double)
            best = std::min(best, nrm(torus_representative(xi - w, nrm)));
        return best;
    };

    const long long nchunks = std::max<long long>(1, std::min<long long>(cells, threads * 8));
    std::vector<double> chunk_max(static_cast<size_t>(nchunks), 0.0);
    std::vector<long long> chunk_excl(static_cast<size_t>(nchunks), 0);
    parallel_chunks(nchunks, threads, [&](long long clo, long long chi_) {
        for (long long chunk = clo; chunk < chi_; ++chunk) {
            const long long lo = cells * chunk / nchunks, hi = cells * (chunk + 1) / nchunks;
            double local = 0.0;
            long long excl = 0;
            Eigen::VectorXd xi(d);
            for (long long idx = lo; idx < hi; ++idx) {
                long long rem = idx;
                for (int i = 0; i < d; ++i) {
                    xi(i) = (static_cast<double>(rem % m) + 0.5) * step;
                    rem /= m;
                }
                const double f = eval_f(xi);
                if (f <= local) continue; // cannot raise the max, retained or not
                if (dist_to_W(xi) >= retain_margin) local = f;
                else ++excl;
            }
            chunk_max[static_cast<size_t>(chunk)] = local;
            chunk_excl[static_cast<size_t>(chunk)] = excl;
        }
    });
    cert.grid_points = cells;
    for (long long e : chunk_excl) cert.excluded += e;
    for (double v : chunk_max) cert.max_f_retained = std::max(cert.max_f_retained, v);

    cert.gamma = cert.max_f_retained + lip * cover;
    if (!(cert.gamma + lip * step < 1.0))
        throw NotContractive("certified sup is not below one at this resolution");
    return cert;
}

double theoretical_bound(long long m0, long long m1, long long k, double gamma, long long r) {
    if (m0 < 1 || m1 < 1 || k < 1 || r < 1) throw DomainError("counts must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
    const double exponent = static_cast<double>(m0) * static_cast<double>(m1) *
                            static_cast<double>(k) * std::pow(gamma, static_cast<double>(r));
    return 0.25 * std::expm1(exponent);
}

} // namespace torwalk
