#pragma once

// Brute-force reference implementations the fast library code is checked
// against. Everything here favours obviousness over speed.

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include <torwalk/fourier.hpp>
#include <torwalk/intmat.hpp>
#include <torwalk/measure.hpp>
#include <torwalk/walk.hpp>

namespace oracle {

constexpr double kTau = 6.283185307179586476925286766559;

// Direct DFT of a dense torus law at one character.
inline std::complex<double> dft(const torwalk::TorusDistribution& p,
                                const std::vector<long long>& rho) {
  std::complex<double> acc(0.0, 0.0);
  for (long long i = 0; i < p.states(); ++i) {
    const std::vector<long long> x = p.point_of(i);
    long long dot = 0;
    for (int c = 0; c < p.d; ++c) dot += x[c] * rho[c];
    const double phase = kTau * static_cast<double>(dot % p.n) / static_cast<double>(p.n);
    acc += p.probs[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

// Character sum over rho != 0 of prod_{j<t} |mu_hat((A^T)^j rho mod n)|^2,
// using nothing but the one-line mu_hat.
inline double l2_sum_direct(const torwalk::IncrementMeasure& mu, const torwalk::IntMat& A,
                            long long n, long long t) {
  using namespace torwalk;
  const int d = mu.d;
  long long states = 1;
  for (int c = 0; c < d; ++c) states *= n;
  const IntMat At = A.transpose();
  double total = 0.0;
  for (long long idx = 1; idx < states; ++idx) {
    std::vector<long long> rho(d);
    long long rem = idx;
    for (int c = 0; c < d; ++c) {
      rho[c] = rem % n;
      rem /= n;
    }
    double prod = 1.0;
    std::vector<long long> cur = rho;
    for (long long j = 0; j < t && prod > 0.0; ++j) {
      prod *= std::norm(mu_hat(mu, cur, n));
      std::vector<long long> next(d, 0);
      for (int i = 0; i < d; ++i) {
        long long acc = 0;
        for (int k = 0; k < d; ++k)
          acc += At.at(i, k).convert_to<long long>() * cur[k];
        next[i] = ((acc % n) + n) % n;
      }
      cur = next;
    }
    total += prod;
  }
  return total;
}

// Does the walk X <- A X + B mod n started at 0 equidistribute? Exactly
// decided by iterating the support set: sizes never decrease, so once the
// set sequence repeats without filling the torus the answer is no, and a
// full support at any single time makes the kernel primitive.
inline bool converges_bfs(const torwalk::IntMat& A,
                          const std::vector<std::vector<long long>>& support, long long n) {
  const int d = A.rows();
  long long states = 1;
  for (int c = 0; c < d; ++c) states *= n;
  auto index_of = [&](const std::vector<long long>& x) {
    long long idx = 0, mul = 1;
    for (int c = 0; c < d; ++c) {
      idx += (((x[c] % n) + n) % n) * mul;
      mul *= n;
    }
    return idx;
  };
  std::vector<char> cur(states, 0);
  cur[0] = 1;
  std::set<std::vector<char>> seen;
  while (seen.insert(cur).second) {
    long long count = 0;
    for (char c : cur) count += c;
    if (count == states) return true;
    std::vector<char> next(states, 0);
    for (long long i = 0; i < states; ++i) {
      if (!cur[i]) continue;
      std::vector<long long> x(d);
      long long rem = i;
      for (int c = 0; c < d; ++c) {
        x[c] = rem % n;
        rem /= n;
      }
      for (const auto& b : support) {
        std::vector<long long> y(d);
        for (int r = 0; r < d; ++r) {
          long long acc = b[r];
          for (int c = 0; c < d; ++c)
            acc += A.at(r, c).convert_to<long long>() * x[c];
          y[r] = acc;
        }
        next[index_of(y)] = 1;
      }
    }
    cur = next;
  }
  return false;
}

// Additive closure mod M of a generating set; the reduction mod M of the
// generated subgroup of Z^d.
inline std::set<std::vector<long long>> subgroup_mod(
    const std::vector<std::vector<long long>>& gens, long long M) {
  std::set<std::vector<long long>> out;
  if (gens.empty()) return out;
  const size_t d = gens[0].size();
  std::vector<std::vector<long long>> frontier{std::vector<long long>(d, 0)};
  out.insert(frontier[0]);
  while (!frontier.empty()) {
    std::vector<std::vector<long long>> next;
    for (const auto& x : frontier) {
      for (const auto& g : gens) {
        std::vector<long long> y(d);
        for (size_t c = 0; c < d; ++c) y[c] = (((x[c] + g[c]) % M) + M) % M;
        if (out.insert(y).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace oracle
