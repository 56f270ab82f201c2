#include <torwalk/symbolic.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <torwalk/errors.hpp>
#include <torwalk/rng.hpp>

namespace torwalk {
namespace {

constexpr double kGeoTol = 1e-12;
constexpr double kAreaTol = 1e-12;

double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0 - 1e-13) y = 0.0;
  return y;
}

double interval_dist(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

Eigen::Matrix2d to_matrix2d(const IntMat& A) {
  Eigen::Matrix2d M;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) M(i, j) = static_cast<double>(A.at(i, j));
  return M;
}

bool same_matrix(const IntMat& A, const IntMat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) return false;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A.at(i, j) != B.at(i, j)) return false;
  return true;
}

Frame make_frame(const IntMat& A) {
  if (A.rows() != 2 || A.cols() != 2)
    throw DimensionUnsupported("partition construction is implemented for d = 2 only");
  const long double a00 = static_cast<long double>(static_cast<double>(A.at(0, 0)));
  const long double a01 = static_cast<long double>(static_cast<double>(A.at(0, 1)));
  const long double a10 = static_cast<long double>(static_cast<double>(A.at(1, 0)));
  const long double a11 = static_cast<long double>(static_cast<double>(A.at(1, 1)));
  const long double tr = a00 + a11;
  const long double det = a00 * a11 - a01 * a10;
  if (det != 1 && det != -1)
    throw DomainError("partition construction needs a unimodular matrix");
  const long double disc = tr * tr - 4 * det;
  if (disc <= 0) throw NotHyperbolic("matrix has no real eigenvalue splitting");
  const long double sq = sqrtl(disc);
  long double l1 = (tr + sq) / 2, l2 = (tr - sq) / 2;
  long double lu = (fabsl(l1) >= fabsl(l2)) ? l1 : l2;
  long double ls = det / lu;
  if (fabsl(lu) <= 1 + 1e-12 || fabsl(ls) >= 1 - 1e-12)
    throw NotHyperbolic("matrix has an eigenvalue on the unit circle");

  auto eigvec = [&](long double lam) {
    Eigen::Vector2d v;
    if (fabsl(a01) > 1e-300)
      v << static_cast<double>(a01), static_cast<double>(lam - a00);
    else
      v << static_cast<double>(lam - a11), static_cast<double>(a10);
    v.normalize();
    int big = (std::abs(v(0)) >= std::abs(v(1))) ? 0 : 1;
    if (v(big) < 0) v = -v;
    return v;
  };

  Frame F;
  F.lambda_u = static_cast<double>(lu);
  F.lambda_s = static_cast<double>(ls);
  F.e_u = eigvec(lu);
  F.e_s = eigvec(ls);
  F.from_frame.col(0) = F.e_u;
  F.from_frame.col(1) = F.e_s;
  const double d = F.from_frame.determinant();
  if (std::abs(d) < 1e-9) throw NotHyperbolic("eigenvectors are numerically collinear");
  F.to_frame << F.from_frame(1, 1), -F.from_frame(0, 1), -F.from_frame(1, 0), F.from_frame(0, 0);
  F.to_frame /= d;
  const Eigen::Matrix2d Ad = to_matrix2d(A);
  const double res = (Ad * F.e_u - F.lambda_u * F.e_u).norm() +
                     (Ad * F.e_s - F.lambda_s * F.e_s).norm();
  if (res > 1e-9) throw DomainError("eigenframe residual too large");
  return F;
}

double frame_scale(const Frame& F) {
  // bound on ||k||_2 / ||to_frame * k||_2, used for lattice enumeration radii
  return F.from_frame.norm() + 1e-9;
}

// A wall is a cut translate: vertical walls sit at u = pos spanning
// [lo, hi] in s; horizontal walls at s = pos spanning [lo, hi] in u.
struct Wall {
  double pos, lo, hi;
};

void collect_walls(const Frame& F, double seg_a, double seg_c, double ulo, double uhi,
                   double slo, double shi, std::vector<Wall>& vert, std::vector<Wall>& horiz) {
  const double ru = std::max(std::abs(ulo), std::abs(uhi));
  const double rs = std::max(std::abs(slo), std::abs(shi));
  const double reach = std::hypot(ru + seg_c + 1.0, rs + seg_a + 1.0);
  const long long K = static_cast<long long>(std::ceil(frame_scale(F) * reach)) + 1;
  if (K > 4000) throw BudgetExceeded("segment complex needs too many lattice translates");
  for (long long k1 = -K; k1 <= K; ++k1) {
    for (long long k2 = -K; k2 <= K; ++k2) {
      const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
      const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
      if (pu >= ulo - kGeoTol && pu <= uhi + kGeoTol && ps - seg_a <= shi && ps + seg_a >= slo)
        vert.push_back({pu, ps - seg_a, ps + seg_a});
      if (ps >= slo - kGeoTol && ps <= shi + kGeoTol && pu - seg_c <= uhi && pu + seg_c >= ulo)
        horiz.push_back({ps, pu - seg_c, pu + seg_c});
    }
  }
}

std::vector<double> cluster_values(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > 1e-10)
      out.push_back(x);
  }
  return out;
}

long long find_break(const std::vector<double>& bs, double x) {
  auto it = std::lower_bound(bs.begin(), bs.end(), x - 1e-9);
  if (it == bs.end() || std::abs(*it - x) > 1e-9) return -1;
  return it - bs.begin();
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Merged coverage intervals keyed by breakpoint index.
std::vector<std::vector<std::pair<double, double>>> coverage_by_break(
    const std::vector<double>& breaks, const std::vector<Wall>& walls) {
  std::vector<std::vector<std::pair<double, double>>> cov(breaks.size());
  for (const Wall& w : walls) {
    long long i = find_break(breaks, w.pos);
    if (i >= 0) cov[i].push_back({w.lo, w.hi});
  }
  for (auto& iv : cov) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto [lo, hi] : iv) {
      if (!merged.empty() && lo <= merged.back().second + 1e-9)
        merged.back().second = std::max(merged.back().second, hi);
      else
        merged.push_back({lo, hi});
    }
    iv = std::move(merged);
  }
  return cov;
}

bool covered(const std::vector<std::pair<double, double>>& merged, double lo, double hi) {
  for (auto [a, b] : merged)
    if (a <= lo + 1e-9 && b >= hi - 1e-9) return true;
  return false;
}

std::vector<FrameBox> extract_cells(const Frame& F, double seg_a, double seg_c) {
  const double J = std::abs(F.from_frame.determinant());
  // frame bounding box of the unit square
  double ulo = 0, uhi = 0, slo = 0, shi = 0;
  for (int cx = 0; cx <= 1; ++cx)
    for (int cy = 0; cy <= 1; ++cy) {
      const Eigen::Vector2d c = F.to_frame * Eigen::Vector2d(cx, cy);
      ulo = std::min(ulo, c(0));
      uhi = std::max(uhi, c(0));
      slo = std::min(slo, c(1));
      shi = std::max(shi, c(1));
    }

  double margin = 1.0;
  std::string last_err = "cell extraction incomplete";
  for (int attempt = 0; attempt < 3; ++attempt, margin *= 1.8) {
    const double wul = ulo - margin, wuh = uhi + margin;
    const double wsl = slo - margin, wsh = shi + margin;
    std::vector<Wall> vert, horiz;
    collect_walls(F, seg_a, seg_c, wul, wuh, wsl, wsh, vert, horiz);

    std::vector<double> us, ss;
    us.push_back(wul);
    us.push_back(wuh);
    ss.push_back(wsl);
    ss.push_back(wsh);
    for (const Wall& w : vert) us.push_back(w.pos);
    for (const Wall& w : horiz) ss.push_back(w.pos);
    us = cluster_values(us);
    ss = cluster_values(ss);
    const long long nu = static_cast<long long>(us.size()) - 1;
    const long long ns = static_cast<long long>(ss.size()) - 1;
    if (nu < 1 || ns < 1) continue;
    if (nu * ns > 6000000) throw BudgetExceeded("cell grid is too fine");

    const auto vcov = coverage_by_break(us, vert);
    const auto hcov = coverage_by_break(ss, horiz);

    UnionFind uf(static_cast<int>(nu * ns));
    auto idx = [&](long long i, long long j) { return static_cast<int>(i * ns + j); };
    for (long long i = 0; i < nu; ++i) {
      for (long long j = 0; j < ns; ++j) {
        if (i + 1 < nu && !covered(vcov[i + 1], ss[j], ss[j + 1]))
          uf.unite(idx(i, j), idx(i + 1, j));
        if (j + 1 < ns && !covered(hcov[j + 1], us[i], us[i + 1]))
          uf.unite(idx(i, j), idx(i, j + 1));
      }
    }

    struct Comp {
      long long i0 = std::numeric_limits<long long>::max(), i1 = -1;
      long long j0 = std::numeric_limits<long long>::max(), j1 = -1;
      double area = 0.0;
      bool border = false;
    };
    std::map<int, Comp> comps;
    for (long long i = 0; i < nu; ++i) {
      for (long long j = 0; j < ns; ++j) {
        Comp& c = comps[uf.find(idx(i, j))];
        c.i0 = std::min(c.i0, i);
        c.i1 = std::max(c.i1, i);
        c.j0 = std::min(c.j0, j);
        c.j1 = std::max(c.j1, j);
        c.area += (us[i + 1] - us[i]) * (ss[j + 1] - ss[j]);
        if (i == 0 || i == nu - 1 || j == 0 || j == ns - 1) c.border = true;
      }
    }

    std::map<std::array<long long, 4>, FrameBox> dedup;
    double total = 0.0;
    bool bad_shape = false;
    for (const auto& [root, c] : comps) {
      (void)root;
      if (c.border) continue;
      const double bu0 = us[c.i0], bu1 = us[c.i1 + 1];
      const double bs0 = ss[c.j0], bs1 = ss[c.j1 + 1];
      const double bbox = (bu1 - bu0) * (bs1 - bs0);
      if (std::abs(bbox - c.area) > 1e-9 * std::max(1.0, bbox)) {
        bad_shape = true;
        break;
      }
      const Eigen::Vector2d xy = F.from_frame * Eigen::Vector2d(bu0, bs0);
      const Eigen::Vector2d w(wrap01(xy(0)), wrap01(xy(1)));
      const Eigen::Vector2d cc = F.to_frame * w;
      FrameBox box{cc(0), cc(1), bu1 - bu0, bs1 - bs0};
      std::array<long long, 4> key = {llround(w(0) * 1e6), llround(w(1) * 1e6),
                                      llround(box.wu * 1e6), llround(box.ws * 1e6)};
      if (dedup.emplace(key, box).second) total += box.wu * box.ws * J;
    }
    if (bad_shape)
      throw DomainError("segment complex does not close into rectangles");
    if (std::abs(total - 1.0) <= 1e-9) {
      std::vector<FrameBox> out;
      out.reserve(dedup.size());
      for (const auto& [key, box] : dedup) {
        (void)key;
        out.push_back(box);
      }
      std::sort(out.begin(), out.end(), [](const FrameBox& a, const FrameBox& b) {
        if (std::abs(a.u0 - b.u0) > 1e-9) return a.u0 < b.u0;
        return a.s0 < b.s0;
      });
      return out;
    }
    last_err = "cell areas sum to " + std::to_string(total) + " instead of 1";
  }
  throw DomainError(last_err);
}

// Candidate (rectangle id, lattice shift in frame coordinates) lists on a
// grid over the unit square, for fast point location.
class PointLocator {
 public:
  PointLocator(const Frame& F, const std::vector<FrameBox>& boxes, int grid = 128)
      : F_(&F), boxes_(&boxes), G_(grid), cand_(static_cast<size_t>(grid) * grid) {
    const double fs = frame_scale(F);
    for (int id = 0; id < static_cast<int>(boxes.size()); ++id) {
      const FrameBox& b = boxes[id];
      // frame bbox of the unit square
      double ulo = 0, uhi = 0, slo = 0, shi = 0;
      for (int cx = 0; cx <= 1; ++cx)
        for (int cy = 0; cy <= 1; ++cy) {
          const Eigen::Vector2d c = F.to_frame * Eigen::Vector2d(cx, cy);
          ulo = std::min(ulo, c(0));
          uhi = std::max(uhi, c(0));
          slo = std::min(slo, c(1));
          shi = std::max(shi, c(1));
        }
      const double reach =
          std::hypot(std::max(std::abs(ulo), std::abs(uhi)) + std::abs(b.u0) + b.wu + 1,
                     std::max(std::abs(slo), std::abs(shi)) + std::abs(b.s0) + b.ws + 1);
      const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
      for (long long k1 = -K; k1 <= K; ++k1) {
        for (long long k2 = -K; k2 <= K; ++k2) {
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          if (b.u0 + pu > uhi + 1e-6 || b.u0 + b.wu + pu < ulo - 1e-6) continue;
          if (b.s0 + ps > shi + 1e-6 || b.s0 + b.ws + ps < slo - 1e-6) continue;
          // xy bbox of the shifted box
          double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
          for (int cu = 0; cu <= 1; ++cu)
            for (int cs = 0; cs <= 1; ++cs) {
              const Eigen::Vector2d xy =
                  F.from_frame *
                  Eigen::Vector2d(b.u0 + cu * b.wu + pu, b.s0 + cs * b.ws + ps);
              xlo = std::min(xlo, xy(0));
              xhi = std::max(xhi, xy(0));
              ylo = std::min(ylo, xy(1));
              yhi = std::max(yhi, xy(1));
            }
          if (xhi < -1e-6 || xlo > 1 + 1e-6 || yhi < -1e-6 || ylo > 1 + 1e-6) continue;
          const int gx0 = std::clamp(static_cast<int>(std::floor((xlo - 1e-9) * G_)), 0, G_ - 1);
          const int gx1 = std::clamp(static_cast<int>(std::floor((xhi + 1e-9) * G_)), 0, G_ - 1);
          const int gy0 = std::clamp(static_cast<int>(std::floor((ylo - 1e-9) * G_)), 0, G_ - 1);
          const int gy1 = std::clamp(static_cast<int>(std::floor((yhi + 1e-9) * G_)), 0, G_ - 1);
          for (int gx = gx0; gx <= gx1; ++gx)
            for (int gy = gy0; gy <= gy1; ++gy)
              cand_[static_cast<size_t>(gx) * G_ + gy].push_back(
                  {id, Eigen::Vector2d(pu, ps)});
        }
      }
    }
  }

  struct Hit {
    int id;
    double margin;  // interior depth, negative means outside
    Eigen::Vector2d shift;
  };

  // x, y must be wrapped to [0,1)
  std::vector<Hit> query(double x, double y, double tol) const {
    const Eigen::Vector2d c = F_->to_frame * Eigen::Vector2d(x, y);
    const int gx = std::clamp(static_cast<int>(std::floor(x * G_)), 0, G_ - 1);
    const int gy = std::clamp(static_cast<int>(std::floor(y * G_)), 0, G_ - 1);
    std::vector<Hit> hits;
    for (const auto& [id, p] : cand_[static_cast<size_t>(gx) * G_ + gy]) {
      const FrameBox& b = (*boxes_)[id];
      const double lu = c(0) - p(0), ls = c(1) - p(1);
      const double m = std::min(std::min(lu - b.u0, b.u0 + b.wu - lu),
                                std::min(ls - b.s0, b.s0 + b.ws - ls));
      if (m >= -tol) hits.push_back({id, m, p});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      if (a.margin != b.margin) return a.margin > b.margin;
      return a.id < b.id;
    });
    return hits;
  }

 private:
  const Frame* F_;
  const std::vector<FrameBox>* boxes_;
  int G_;
  std::vector<std::vector<std::pair<int, Eigen::Vector2d>>> cand_;
};

std::vector<std::vector<int>> compute_adjacency(const Frame& F,
                                                const std::vector<FrameBox>& boxes) {
  const int m = static_cast<int>(boxes.size());
  std::vector<std::vector<int>> adj(m, std::vector<int>(m, 0));
  const double fs = frame_scale(F);
  for (int i = 0; i < m; ++i) {
    const FrameBox& a = boxes[i];
    double iu0 = F.lambda_u * a.u0, iu1 = F.lambda_u * (a.u0 + a.wu);
    if (iu0 > iu1) std::swap(iu0, iu1);
    double is0 = F.lambda_s * a.s0, is1 = F.lambda_s * (a.s0 + a.ws);
    if (is0 > is1) std::swap(is0, is1);
    for (int j = 0; j < m; ++j) {
      const FrameBox& b = boxes[j];
      const double reach = std::hypot(std::abs(iu0) + std::abs(iu1) + std::abs(b.u0) + b.wu + 1,
                                      std::abs(is0) + std::abs(is1) + std::abs(b.s0) + b.ws + 1);
      const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
      double area = 0.0;
      for (long long k1 = -K; k1 <= K; ++k1) {
        for (long long k2 = -K; k2 <= K; ++k2) {
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          const double ou = std::min(iu1, b.u0 + b.wu + pu) - std::max(iu0, b.u0 + pu);
          if (ou <= 0) continue;
          const double os = std::min(is1, b.s0 + b.ws + ps) - std::max(is0, b.s0 + ps);
          if (os <= 0) continue;
          area += ou * os;
        }
      }
      adj[i][j] = (area * std::abs(F.from_frame.determinant()) > kAreaTol) ? 1 : 0;
    }
  }
  return adj;
}

struct SegmentBase {
  double a = 0.0, c = 0.0;
};

// Valid symmetric complexes: the stable cut [-a, a] e_s must end strictly
// inside the unstable cut [-c, c] e_u (mod Z^2) and vice versa.
std::vector<std::pair<SegmentBase, double>> enumerate_bases(const Frame& F, long long K) {
  struct Cand {
    double len, off;
  };
  std::vector<Cand> acand, ccand;
  for (long long k1 = -K; k1 <= K; ++k1) {
    for (long long k2 = -K; k2 <= K; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
      const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
      if (ps > 1e-9) acand.push_back({ps, std::abs(pu)});
      if (pu > 1e-9) ccand.push_back({pu, std::abs(ps)});
    }
  }
  std::vector<std::pair<SegmentBase, double>> out;  // base, badness = max extent
  for (const Cand& ka : acand)
    for (const Cand& kc : ccand)
      if (ka.off < kc.len - 1e-9 && kc.off < ka.len - 1e-9)
        out.push_back({{ka.len, kc.len}, std::max(ka.len, kc.len)});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first.a + x.first.c < y.first.a + y.first.c;
  });
  // dedupe by rounded lengths
  std::vector<std::pair<SegmentBase, double>> ded;
  std::set<std::pair<long long, long long>> seen;
  for (const auto& e : out)
    if (seen.insert({llround(e.first.a * 1e9), llround(e.first.c * 1e9)}).second)
      ded.push_back(e);
  return ded;
}

MarkovPartition assemble_partition(const IntMat& A, const Frame& F, double seg_a, double seg_c,
                                   bool finalize) {
  MarkovPartition P;
  P.map = A;
  P.frame = F;
  P.seg_a = seg_a;
  P.seg_c = seg_c;
  P.boxes = extract_cells(F, seg_a, seg_c);
  P.diameter = 0.0;
  for (const FrameBox& b : P.boxes) P.diameter = std::max(P.diameter, std::max(b.wu, b.ws));
  if (!finalize) return P;
  P.adjacency = compute_adjacency(F, P.boxes);
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(A));
  P.delta0 = hyperbolic_constants(nrm).expansiveness_constant;
  P.rectangles.reserve(P.boxes.size());
  for (int id = 0; id < static_cast<int>(P.boxes.size()); ++id) {
    const FrameBox& b = P.boxes[id];
    Rectangle r;
    r.id = id;
    const Eigen::Vector2d xy = F.from_frame * Eigen::Vector2d(b.u0, b.s0);
    r.anchor = Eigen::Vector2d(wrap01(xy(0)), wrap01(xy(1)));
    r.unstable_edge = b.wu * F.e_u;
    r.stable_edge = b.ws * F.e_s;
    P.rectangles.push_back(r);
  }
  return P;
}

double axis_margin_proxy(const Frame& F, double seg_a, double seg_c, double* max_gap) {
  // first-gap and max-gap of the cut translates along both axes
  const double fs = frame_scale(F);
  const double reach = std::hypot(2.5 + seg_c, 2.5 + seg_a);
  const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
  std::vector<double> vp_above, vp_below, hp_above, hp_below;
  for (long long k1 = -K; k1 <= K; ++k1) {
    for (long long k2 = -K; k2 <= K; ++k2) {
      const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
      const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
      if (std::abs(pu) <= 2.0) {
        // vertical wall at pu covering s just above / below 0
        if (ps - seg_a <= kGeoTol && ps + seg_a > kGeoTol) vp_above.push_back(pu);
        if (ps - seg_a < -kGeoTol && ps + seg_a >= -kGeoTol) vp_below.push_back(pu);
      }
      if (std::abs(ps) <= 2.0) {
        if (pu - seg_c <= kGeoTol && pu + seg_c > kGeoTol) hp_above.push_back(ps);
        if (pu - seg_c < -kGeoTol && pu + seg_c >= -kGeoTol) hp_below.push_back(ps);
      }
    }
  }
  auto gaps = [](std::vector<double>& v, double* first_pos, double* first_neg, double* mg) {
    std::sort(v.begin(), v.end());
    *first_pos = 1e300;
    *first_neg = 1e300;
    for (double x : v) {
      if (x > 1e-9) *first_pos = std::min(*first_pos, x);
      if (x < -1e-9) *first_neg = std::min(*first_neg, -x);
    }
    // gaps between consecutive walls whose span meets [-0.75, 0.75]
    *mg = v.size() < 2 ? 4.0 : 0.0;
    for (size_t i = 1; i < v.size(); ++i) {
      if (v[i] < -0.75 || v[i - 1] > 0.75) continue;
      *mg = std::max(*mg, v[i] - v[i - 1]);
    }
  };
  double eta = 1e300;
  *max_gap = 0.0;
  for (auto* v : {&vp_above, &vp_below, &hp_above, &hp_below}) {
    double fp, fn, mg;
    gaps(*v, &fp, &fn, &mg);
    eta = std::min(eta, std::min(fp, fn));
    *max_gap = std::max(*max_gap, mg);
  }
  return eta;
}

}  // namespace

MarkovPartition build_partition_2d(const IntMat& A, double target_diameter) {
  if (!(target_diameter > 0))
    throw DomainError("target diameter must be positive");
  const Frame F = make_frame(A);
  const auto bases = enumerate_bases(F, 4);
  if (bases.empty()) throw DomainError("no valid segment complex found");
  double a = bases.front().first.a, c = bases.front().first.c;
  const double grow = std::abs(F.lambda_u);
  for (int round = 0; round < 26; ++round) {
    if (std::max(a, c) > 2000) throw BudgetExceeded("refinement exceeds the segment budget");
    MarkovPartition P = assemble_partition(A, F, a, c, false);
    if (P.diameter <= target_diameter)
      return assemble_partition(A, F, a, c, true);
    a *= grow;
    c *= grow;
  }
  throw BudgetExceeded("refinement did not reach the target diameter");
}

MarkovPartition build_partition_tuned(const IntMat& A, const BadSetW& W, double diameter_cap) {
  if (!(diameter_cap > 0)) throw DomainError("diameter cap must be positive");
  const Frame F = make_frame(A);
  const auto bases = enumerate_bases(F, 5);
  if (bases.empty()) throw DomainError("no valid segment complex found");
  const double grow = std::abs(F.lambda_u);

  struct Scored {
    double eta_proxy, mg, a, c;
  };
  std::vector<Scored> cands;
  std::set<std::pair<long long, long long>> seen;
  for (const auto& [base, badness] : bases) {
    (void)badness;
    for (int ru = 0; ru <= 4; ++ru) {
      for (int rs = 0; rs <= 4; ++rs) {
        const double a = base.a * std::pow(grow, ru);
        const double c = base.c * std::pow(grow, rs);
        if (std::max(a, c) > 8) continue;
        if (!seen.insert({llround(a * 1e9), llround(c * 1e9)}).second) continue;
        double mg = 0.0;
        const double eta = axis_margin_proxy(F, a, c, &mg);
        if (mg > diameter_cap * 1.3) continue;  // proxy underestimates the diameter
        cands.push_back({eta, mg, a, c});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Scored& x, const Scored& y) {
    if (x.eta_proxy != y.eta_proxy) return x.eta_proxy > y.eta_proxy;
    if (x.mg != y.mg) return x.mg < y.mg;
    return x.a + x.c < y.a + y.c;
  });

  const bool dbg = std::getenv("TORWALK_DEBUG_TUNER") != nullptr;
  MarkovPartition best;
  double best_eta = -1.0;
  int built = 0, probed = 0;
  for (const Scored& s : cands) {
    if (built >= 10 || probed >= 60) break;
    // the axis first-gap is an upper bound on the reachable margin
    if (best_eta >= s.eta_proxy) break;
    ++probed;
    MarkovPartition probe;
    try {
      probe = assemble_partition(A, F, s.a, s.c, false);
    } catch (const Error& e) {
      if (dbg)
        std::fprintf(stderr, "tuner a=%.4f c=%.4f proxy=%.4f assemble failed: %s\n", s.a, s.c,
                     s.eta_proxy, e.what());
      continue;
    }
    if (dbg)
      std::fprintf(stderr, "tuner a=%.4f c=%.4f proxy=%.4f mg=%.4f m=%zu diam=%.4f\n", s.a,
                   s.c, s.eta_proxy, s.mg, probe.boxes.size(), probe.diameter);
    if (probe.diameter >= diameter_cap) continue;
    ++built;
    MarkovPartition P = assemble_partition(A, F, s.a, s.c, true);
    ClassifyReport cls;
    try {
      cls = classify_rectangles(P, W);
    } catch (const Error& e) {
      if (dbg) std::fprintf(stderr, "   classify failed: %s\n", e.what());
      continue;
    }
    if (dbg)
      std::fprintf(stderr, "   m0=%lld eta=%.4f uniq=%d\n", cls.m0, cls.eta,
                   static_cast<int>(cls.successor_unique));
    if (!cls.successor_unique) continue;
    if (cls.eta > best_eta) {
      best_eta = cls.eta;
      best = std::move(P);
    }
  }
  if (best_eta < 0)
    throw DomainError("no segment complex met the diameter cap");
  return best;
}

MarkovReport verify_markov(const MarkovPartition& partition, const IntMat& A,
                           long long samples_per_rectangle, std::uint64_t seed) {
  if (!same_matrix(partition.map, A))
    throw DomainError("partition was built for a different matrix");
  const Frame& F = partition.frame;
  const double J = std::abs(F.from_frame.determinant());
  MarkovReport rep;
  for (const FrameBox& b : partition.boxes) rep.area_sum += b.wu * b.ws * J;

  // pairwise interior overlap, including wrapped self-overlap
  const double fs = frame_scale(F);
  const int m = static_cast<int>(partition.boxes.size());
  for (int i = 0; i < m; ++i) {
    const FrameBox& a = partition.boxes[i];
    for (int j = i; j < m; ++j) {
      const FrameBox& b = partition.boxes[j];
      const double reach = std::hypot(std::abs(a.u0) + a.wu + std::abs(b.u0) + b.wu + 1,
                                      std::abs(a.s0) + a.ws + std::abs(b.s0) + b.ws + 1);
      const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
      for (long long k1 = -K; k1 <= K; ++k1) {
        for (long long k2 = -K; k2 <= K; ++k2) {
          if (i == j && k1 == 0 && k2 == 0) continue;
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          const double ou = std::min(a.u0 + a.wu, b.u0 + b.wu + pu) - std::max(a.u0, b.u0 + pu);
          if (ou <= 0) continue;
          const double os = std::min(a.s0 + a.ws, b.s0 + b.ws + ps) - std::max(a.s0, b.s0 + ps);
          if (os <= 0) continue;
          rep.max_overlap = std::max(rep.max_overlap, ou * os * J);
        }
      }
    }
  }

  const PointLocator loc(F, partition.boxes);
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    const FrameBox& b = partition.boxes[i];
    for (long long s = 0; s < samples_per_rectangle; ++s) {
      const double u = b.u0 + rng.next_double() * b.wu;
      const double sv = b.s0 + rng.next_double() * b.ws;
      const double iu = F.lambda_u * u, is = F.lambda_s * sv;
      const Eigen::Vector2d xy = F.from_frame * Eigen::Vector2d(iu, is);
      const auto hits = loc.query(wrap01(xy(0)), wrap01(xy(1)), kGeoTol);
      if (hits.empty() || hits.front().margin < 1e-9) {
        ++rep.boundary_skips;
        continue;
      }
      const auto& h = hits.front();
      const FrameBox& t = partition.boxes[h.id];
      const Eigen::Vector2d cw =
          F.to_frame * Eigen::Vector2d(wrap01(xy(0)), wrap01(xy(1)));
      const double lu = cw(0) - h.shift(0), ls = cw(1) - h.shift(1);
      // stable fiber of the sample must map inside the target's stable fiber
      double flo = F.lambda_s * b.s0, fhi = F.lambda_s * (b.s0 + b.ws);
      if (flo > fhi) std::swap(flo, fhi);
      const double ds = ls - is;
      double over = std::max(0.0, t.s0 - (flo + ds));
      over = std::max(over, (fhi + ds) - (t.s0 + t.ws));
      // unstable fiber of the image must be covered by the sample's image
      double glo = F.lambda_u * b.u0, ghi = F.lambda_u * (b.u0 + b.wu);
      if (glo > ghi) std::swap(glo, ghi);
      const double du = lu - iu;
      over = std::max(over, (glo + du) - t.u0);
      over = std::max(over, t.u0 + t.wu - (ghi + du));
      rep.worst_violation = std::max(rep.worst_violation, over);
      ++rep.samples_checked;
    }
  }
  rep.ok = std::abs(rep.area_sum - 1.0) <= 1e-9 && rep.max_overlap <= kAreaTol &&
           rep.worst_violation <= kGeoTol;
  return rep;
}

MarkovReport verify_markov_rectangles(const std::vector<Rectangle>& rects, const IntMat& A,
                                      long long samples_per_rectangle, std::uint64_t seed) {
  const Frame F = make_frame(A);
  MarkovReport rep;
  const int m = static_cast<int>(rects.size());
  if (m == 0) throw DomainError("empty rectangle list");

  struct PRect {
    Eigen::Vector2d anchor;
    Eigen::Matrix2d E, Einv;  // columns: unstable_edge, stable_edge
  };
  std::vector<PRect> pr(m);
  for (int i = 0; i < m; ++i) {
    PRect& p = pr[i];
    p.anchor = rects[i].anchor;
    p.E.col(0) = rects[i].unstable_edge;
    p.E.col(1) = rects[i].stable_edge;
    const double d = p.E.determinant();
    if (std::abs(d) < 1e-12) throw DomainError("degenerate rectangle edges");
    p.Einv << p.E(1, 1), -p.E(0, 1), -p.E(1, 0), p.E(0, 0);
    p.Einv /= d;
    rep.area_sum += std::abs(d);
  }

  // membership of a wrapped point, returning barycentric coordinates
  auto locate = [&](const Eigen::Vector2d& x, int skip_margin_checks, int* id,
                    Eigen::Vector2d* t) {
    (void)skip_margin_checks;
    double best = -1e300;
    for (int j = 0; j < m; ++j) {
      for (int k1 = -1; k1 <= 1; ++k1) {
        for (int k2 = -1; k2 <= 1; ++k2) {
          const Eigen::Vector2d cand =
              pr[j].Einv * (x + Eigen::Vector2d(k1, k2) - pr[j].anchor);
          const double margin =
              std::min(std::min(cand(0), 1 - cand(0)), std::min(cand(1), 1 - cand(1)));
          if (margin > best) {
            best = margin;
            *id = j;
            *t = cand;
          }
        }
      }
    }
    return best;
  };

  const Eigen::Matrix2d Ad = to_matrix2d(A);
  long long overlaps = 0;
  Rng rng(seed);
  for (int i = 0; i < m; ++i) {
    for (long long s = 0; s < samples_per_rectangle; ++s) {
      const Eigen::Vector2d t(rng.next_double(), rng.next_double());
      const Eigen::Vector2d x = pr[i].anchor + pr[i].E * t;
      const Eigen::Vector2d xw(wrap01(x(0)), wrap01(x(1)));

      // interior disjointness: the sample must not be interior to another rect
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        for (int k1 = -1; k1 <= 1 && overlaps >= 0; ++k1)
          for (int k2 = -1; k2 <= 1; ++k2) {
            const Eigen::Vector2d c =
                pr[j].Einv * (xw + Eigen::Vector2d(k1, k2) - pr[j].anchor);
            if (c(0) > 1e-9 && c(0) < 1 - 1e-9 && c(1) > 1e-9 && c(1) < 1 - 1e-9 &&
                t(0) > 1e-9 && t(0) < 1 - 1e-9 && t(1) > 1e-9 && t(1) < 1 - 1e-9)
              ++overlaps;
          }
      }

      const Eigen::Vector2d y = Ad * xw;
      const Eigen::Vector2d yw(wrap01(y(0)), wrap01(y(1)));
      int j = -1;
      Eigen::Vector2d tj;
      const double margin = locate(yw, 0, &j, &tj);
      if (margin < 1e-9) {
        ++rep.boundary_skips;
        continue;
      }

      // stable fiber through x in R_i: x + tau * e_s, tau in [lo_i, hi_i]
      auto fiber = [&](const PRect& r, const Eigen::Vector2d& tc, const Eigen::Vector2d& dir,
                       double* lo, double* hi) {
        const Eigen::Vector2d g = r.Einv * dir;
        *lo = -1e300;
        *hi = 1e300;
        for (int ax = 0; ax < 2; ++ax) {
          if (std::abs(g(ax)) < 1e-15) continue;
          const double t0 = (0.0 - tc(ax)) / g(ax), t1 = (1.0 - tc(ax)) / g(ax);
          *lo = std::max(*lo, std::min(t0, t1));
          *hi = std::min(*hi, std::max(t0, t1));
        }
      };
      double li, hi_, lj, hj;
      fiber(pr[i], t, F.e_s, &li, &hi_);
      fiber(pr[j], tj, F.e_s, &lj, &hj);
      // image of the stable fiber scales by lambda_s and must fit inside
      double a0 = F.lambda_s * li, a1 = F.lambda_s * hi_;
      if (a0 > a1) std::swap(a0, a1);
      double over = std::max(0.0, lj - a0);
      over = std::max(over, a1 - hj);
      // unstable dual
      fiber(pr[i], t, F.e_u, &li, &hi_);
      fiber(pr[j], tj, F.e_u, &lj, &hj);
      a0 = F.lambda_u * li;
      a1 = F.lambda_u * hi_;
      if (a0 > a1) std::swap(a0, a1);
      over = std::max(over, a0 - lj);
      over = std::max(over, hj - a1);
      rep.worst_violation = std::max(rep.worst_violation, over);
      ++rep.samples_checked;
    }
  }
  rep.max_overlap =
      rep.samples_checked > 0 ? static_cast<double>(overlaps) / (m * samples_per_rectangle) : 0;
  rep.ok = std::abs(rep.area_sum - 1.0) <= 1e-9 && overlaps == 0 &&
           rep.worst_violation <= kGeoTol;
  return rep;
}

SymbolicWindow code_point(const Eigen::Vector2d& x, const MarkovPartition& partition,
                          const IntMat& A, long long window) {
  if (!same_matrix(partition.map, A))
    throw DomainError("partition was built for a different matrix");
  if (window < 0) throw DomainError("window must be nonnegative");
  if (window > 256) throw BudgetExceeded("coding window too long");
  const Frame& F = partition.frame;
  const Eigen::Matrix2d Ad = to_matrix2d(A);
  const Eigen::Matrix2d Ai = to_matrix2d(inverse_unimodular(A));

  const long long len = 2 * window + 1;
  std::vector<Eigen::Vector2d> orbit(len);
  orbit[window] = Eigen::Vector2d(wrap01(x(0)), wrap01(x(1)));
  for (long long k = window + 1; k < len; ++k) {
    const Eigen::Vector2d y = Ad * orbit[k - 1];
    orbit[k] = Eigen::Vector2d(wrap01(y(0)), wrap01(y(1)));
  }
  for (long long k = window - 1; k >= 0; --k) {
    const Eigen::Vector2d y = Ai * orbit[k + 1];
    orbit[k] = Eigen::Vector2d(wrap01(y(0)), wrap01(y(1)));
  }

  const PointLocator loc(F, partition.boxes);
  std::vector<std::vector<int>> letters(len);
  SymbolicWindow win;
  win.offset = window;
  for (long long k = 0; k < len; ++k) {
    auto hits = loc.query(orbit[k](0), orbit[k](1), kGeoTol);
    if (hits.empty()) hits = loc.query(orbit[k](0), orbit[k](1), 1e-9);
    if (hits.empty()) throw DomainError("orbit point escaped the partition cover");
    if (hits.front().margin > 1e-9) {
      letters[k] = {hits.front().id};
    } else {
      for (const auto& h : hits) letters[k].push_back(h.id);
      std::sort(letters[k].begin(), letters[k].end());
      letters[k].erase(std::unique(letters[k].begin(), letters[k].end()), letters[k].end());
      if (letters[k].size() > 1) win.ambiguous = true;
    }
  }

  // depth-first assembly of admissible words
  std::vector<int> cur(len);
  std::vector<size_t> pos(len, 0);
  long long depth = 0;
  while (depth >= 0) {
    if (win.words.size() >= 256) {
      win.ambiguous = true;
      break;
    }
    if (depth == len) {
      win.words.push_back(cur);
      --depth;
      continue;
    }
    bool advanced = false;
    while (pos[depth] < letters[depth].size()) {
      const int cand = letters[depth][pos[depth]++];
      if (depth == 0 || partition.adjacency[cur[depth - 1]][cand] == 1) {
        cur[depth] = cand;
        ++depth;
        if (depth < len) pos[depth] = 0;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      pos[depth] = 0;
      --depth;
    }
  }
  if (win.words.empty()) throw DomainError("no admissible word for the orbit");
  return win;
}

DecodeResult decode_word(const std::vector<int>& word, const MarkovPartition& partition,
                         const IntMat& A) {
  if (!same_matrix(partition.map, A))
    throw DomainError("partition was built for a different matrix");
  const long long len = static_cast<long long>(word.size());
  if (len == 0) throw DomainError("empty word");
  if (len > 400) throw BudgetExceeded("word too long to decode");
  const int m = static_cast<int>(partition.boxes.size());
  for (int w : word)
    if (w < 0 || w >= m) throw DomainError("letter out of range");
  for (long long k = 0; k + 1 < len; ++k)
    if (partition.adjacency[word[k]][word[k + 1]] != 1)
      throw EmptyIntersection("word is not admissible");

  const Frame& F = partition.frame;
  const double fs = frame_scale(F);
  struct Box {
    double u0, u1, s0, s1;
  };
  const FrameBox& b0 = partition.boxes[word[0]];
  std::vector<Box> comps = {{b0.u0, b0.u0 + b0.wu, b0.s0, b0.s0 + b0.ws}};
  for (long long k = 1; k < len; ++k) {
    const FrameBox& t = partition.boxes[word[k]];
    std::vector<Box> next;
    for (const Box& c : comps) {
      double iu0 = F.lambda_u * c.u0, iu1 = F.lambda_u * c.u1;
      if (iu0 > iu1) std::swap(iu0, iu1);
      double is0 = F.lambda_s * c.s0, is1 = F.lambda_s * c.s1;
      if (is0 > is1) std::swap(is0, is1);
      const double reach = std::hypot(std::abs(iu0) + std::abs(iu1) + std::abs(t.u0) + t.wu + 1,
                                      std::abs(is0) + std::abs(is1) + std::abs(t.s0) + t.ws + 1);
      const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
      for (long long k1 = -K; k1 <= K; ++k1) {
        for (long long k2 = -K; k2 <= K; ++k2) {
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          const double u0 = std::max(iu0, t.u0 + pu), u1 = std::min(iu1, t.u0 + t.wu + pu);
          if (u1 - u0 < -kGeoTol) continue;
          const double s0 = std::max(is0, t.s0 + ps), s1 = std::min(is1, t.s0 + t.ws + ps);
          if (s1 - s0 < -kGeoTol) continue;
          // re-centre by the shift: the accumulated lattice offset maps to a
          // lattice vector under any A power and wraps away on the torus
          next.push_back({u0 - pu, std::max(u0, u1) - pu, s0 - ps, std::max(s0, s1) - ps});
        }
      }
    }
    // dedupe nearby components
    std::vector<Box> ded;
    for (const Box& c : next) {
      bool dup = false;
      for (const Box& d : ded)
        if (std::abs(c.u0 - d.u0) < 1e-12 && std::abs(c.s0 - d.s0) < 1e-12) {
          dup = true;
          break;
        }
      if (!dup) ded.push_back(c);
    }
    if (ded.empty()) throw EmptyIntersection("word has empty intersection");
    if (ded.size() > 16) throw DomainError("decode produced too many branches");
    comps = std::move(ded);
  }

  // map the final constraint set back to the centre iterate
  const long long centre = len / 2;
  const long long back = len - 1 - centre;
  const double sgn_u = (F.lambda_u < 0 && (back % 2)) ? -1.0 : 1.0;
  const double sgn_s = (F.lambda_s < 0 && (back % 2)) ? -1.0 : 1.0;
  const double fu = sgn_u * std::pow(std::abs(F.lambda_u), -static_cast<double>(back));
  const double fsc = sgn_s * std::pow(std::abs(F.lambda_s), -static_cast<double>(back));

  DecodeResult res;
  double radius = 0.0;
  std::vector<Eigen::Vector2d> centres;
  for (const Box& c : comps) {
    double u0 = fu * c.u0, u1 = fu * c.u1;
    if (u0 > u1) std::swap(u0, u1);
    double s0 = fsc * c.s0, s1 = fsc * c.s1;
    if (s0 > s1) std::swap(s0, s1);
    radius = std::max(radius, std::max(u1 - u0, s1 - s0) / 2);
    const Eigen::Vector2d xy =
        F.from_frame * Eigen::Vector2d((u0 + u1) / 2, (s0 + s1) / 2);
    centres.push_back(Eigen::Vector2d(wrap01(xy(0)), wrap01(xy(1))));
  }
  // distinct lifted components must agree as torus points
  for (size_t i = 1; i < centres.size(); ++i) {
    const Eigen::Vector2d d = centres[i] - centres[0];
    const double dx = std::min(wrap01(d(0)), 1 - wrap01(d(0)));
    const double dy = std::min(wrap01(d(1)), 1 - wrap01(d(1)));
    if (std::hypot(dx, dy) > 1e-6)
      throw DomainError("word too short to localise a point");
  }
  res.point = centres.front();
  res.radius = radius + 1e-11 * static_cast<double>(len + 1);
  return res;
}

ClassifyReport classify_rectangles(const MarkovPartition& partition, const BadSetW& W) {
  if (W.d != 2) throw DimensionUnsupported("classification is implemented for d = 2 only");
  const Frame& F = partition.frame;
  ClassifyReport rep;

  // adapted pairwise separation of W
  double minpair = std::numeric_limits<double>::infinity();
  const double fs = frame_scale(F);
  for (size_t i = 0; i < W.points_double.size(); ++i) {
    for (size_t j = i + 1; j < W.points_double.size(); ++j) {
      const Eigen::Vector2d d(W.points_double[i][0] - W.points_double[j][0],
                              W.points_double[i][1] - W.points_double[j][1]);
      const Eigen::Vector2d c = F.to_frame * d;
      double best = std::numeric_limits<double>::infinity();
      const long long K = static_cast<long long>(std::ceil(fs * (c.norm() + 2))) + 1;
      for (long long k1 = -K; k1 <= K; ++k1)
        for (long long k2 = -K; k2 <= K; ++k2) {
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          best = std::min(best, std::max(std::abs(c(0) - pu), std::abs(c(1) - ps)));
        }
      minpair = std::min(minpair, best);
    }
  }
  const double opnorm = std::max(std::abs(F.lambda_u), 1.0 / std::abs(F.lambda_s));
  rep.delta0 = partition.delta0;
  if (W.points_double.size() > 1)
    rep.delta0 = std::min(rep.delta0, minpair / (1.0 + opnorm));
  if (!(partition.diameter < rep.delta0))
    throw DiameterTooLarge("partition diameter " + std::to_string(partition.diameter) +
                           " is not below " + std::to_string(rep.delta0));

  const PointLocator loc(F, partition.boxes);
  std::set<int> r0set;
  for (const auto& wp : W.points_double) {
    const auto hits = loc.query(wrap01(wp[0]), wrap01(wp[1]), kGeoTol);
    if (hits.empty()) throw DomainError("a W point escaped the partition cover");
    for (const auto& h : hits) r0set.insert(h.id);
  }
  rep.r0.assign(r0set.begin(), r0set.end());
  rep.m0 = static_cast<long long>(rep.r0.size());
  rep.m1 = static_cast<long long>(partition.boxes.size()) - rep.m0;

  rep.successor_unique = true;
  for (int i : rep.r0) {
    int succ = -1;
    int count = 0;
    for (int j : rep.r0)
      if (partition.adjacency[i][j] == 1) {
        succ = j;
        ++count;
      }
    rep.successor.push_back(count == 1 ? succ : -1);
    if (count != 1) rep.successor_unique = false;
  }

  // eta: min adapted distance from W to a rectangle not in R0
  rep.eta = std::numeric_limits<double>::infinity();
  for (int id = 0; id < static_cast<int>(partition.boxes.size()); ++id) {
    if (r0set.count(id)) continue;
    const FrameBox& b = partition.boxes[id];
    for (const auto& wp : W.points_double) {
      const Eigen::Vector2d c = F.to_frame * Eigen::Vector2d(wp[0], wp[1]);
      const double reach = c.norm() + std::abs(b.u0) + b.wu + std::abs(b.s0) + b.ws + 2;
      const long long K = static_cast<long long>(std::ceil(fs * reach)) + 1;
      for (long long k1 = -K; k1 <= K; ++k1)
        for (long long k2 = -K; k2 <= K; ++k2) {
          const double pu = F.to_frame(0, 0) * k1 + F.to_frame(0, 1) * k2;
          const double ps = F.to_frame(1, 0) * k1 + F.to_frame(1, 1) * k2;
          const double du = interval_dist(c(0) - pu, b.u0, b.u0 + b.wu);
          const double ds = interval_dist(c(1) - ps, b.s0, b.s0 + b.ws);
          rep.eta = std::min(rep.eta, std::max(du, ds));
        }
    }
  }
  if (!std::isfinite(rep.eta)) rep.eta = 0.0;
  return rep;
}

std::vector<std::vector<int>> code_lattice_orbit(const std::vector<Int>& rho, const Int& n,
                                                 const MarkovPartition& partition,
                                                 long long steps) {
  if (rho.size() != 2) throw DimensionUnsupported("lattice coding is d = 2 only");
  if (n <= 1) throw DomainError("modulus must exceed 1");
  if (n > Int(1) << 40) throw BudgetExceeded("modulus too large for lattice coding");
  const long long nn = n.convert_to<long long>();
  long long r0 = (rho[0] % n).convert_to<long long>();
  long long r1 = (rho[1] % n).convert_to<long long>();
  if (r0 < 0) r0 += nn;
  if (r1 < 0) r1 += nn;
  if (r0 == 0 && r1 == 0)
    throw DomainError("lattice coding needs a nonzero frequency; the zero class sits at the fixed point");
  const long long a00 = partition.map.at(0, 0).convert_to<long long>();
  const long long a01 = partition.map.at(0, 1).convert_to<long long>();
  const long long a10 = partition.map.at(1, 0).convert_to<long long>();
  const long long a11 = partition.map.at(1, 1).convert_to<long long>();

  const PointLocator loc(partition.frame, partition.boxes);
  std::vector<std::vector<int>> letters(steps);
  for (long long t = 0; t < steps; ++t) {
    const double x = static_cast<double>(r0) / static_cast<double>(nn);
    const double y = static_cast<double>(r1) / static_cast<double>(nn);
    auto hits = loc.query(wrap01(x), wrap01(y), kGeoTol);
    if (hits.empty()) hits = loc.query(wrap01(x), wrap01(y), 1e-9);
    if (hits.empty()) throw DomainError("lattice point escaped the partition cover");
    if (hits.front().margin > 1e-9) {
      letters[t] = {hits.front().id};
    } else {
      for (const auto& h : hits) letters[t].push_back(h.id);
      std::sort(letters[t].begin(), letters[t].end());
      letters[t].erase(std::unique(letters[t].begin(), letters[t].end()), letters[t].end());
    }
    const long long s0 = ((a00 % nn) * r0 + (a01 % nn) * r1) % nn;
    const long long s1 = ((a10 % nn) * r0 + (a11 % nn) * r1) % nn;
    r0 = (s0 % nn + nn) % nn;
    r1 = (s1 % nn + nn) % nn;
  }
  return letters;
}

BlockReport block_statistics(const std::vector<Int>& rho, const Int& n,
                             const MarkovPartition& partition, const IntMat& A,
                             const ClassifyReport& cls, const HyperbolicConstants& constants,
                             long long r) {
  if (!same_matrix(partition.map, A))
    throw DomainError("partition was built for a different matrix");
  if (r < 1) throw DomainError("need at least one block");
  bool zero = true;
  for (const Int& v : rho)
    if (v % n != 0) zero = false;
  if (zero) throw DomainError("the zero character is excluded");

  const double lambda =
      std::max(std::abs(partition.frame.lambda_s), 1.0 / std::abs(partition.frame.lambda_u));
  const double nn = n.convert_to<double>();
  BlockReport rep;
  rep.k = 1 + static_cast<long long>(
                  std::ceil(constants.gap_exponent * std::log(nn) / std::log(1.0 / lambda)));
  rep.m0 = cls.m0;
  rep.m1 = cls.m1;

  std::vector<char> in_r0(partition.boxes.size(), 0);
  for (int id : cls.r0) in_r0[id] = 1;

  const auto letters = code_lattice_orbit(rho, n, partition, r * rep.k);
  rep.blocks.resize(r);
  rep.g_counts.assign(r, 0);
  for (long long b = 0; b < r; ++b) {
    rep.blocks[b].assign(letters.begin() + b * rep.k, letters.begin() + (b + 1) * rep.k);
    for (const auto& ls : rep.blocks[b]) {
      bool escape = false;
      for (int id : ls)
        if (!in_r0[id]) escape = true;
      if (escape) ++rep.g_counts[b];
    }
  }
  return rep;
}

BlockLemmaReport verify_block_lemma(const MarkovPartition& partition, const ClassifyReport& cls,
                                    const HyperbolicConstants& constants, long long n,
                                    long long blocks_to_check) {
  if (n <= 1) throw DomainError("modulus must exceed 1");
  const double lambda =
      std::max(std::abs(partition.frame.lambda_s), 1.0 / std::abs(partition.frame.lambda_u));
  BlockLemmaReport rep;
  rep.k = 1 + static_cast<long long>(std::ceil(
                  constants.gap_exponent * std::log(static_cast<double>(n)) /
                  std::log(1.0 / lambda)));
  const long long steps = blocks_to_check * rep.k;

  std::vector<char> in_r0(partition.boxes.size(), 0);
  for (int id : cls.r0) in_r0[id] = 1;

  auto canon = [](const std::vector<std::vector<int>>& block) {
    std::string s;
    for (const auto& ls : block) {
      for (int id : ls) {
        s += std::to_string(id);
        s += '|';
      }
      s += ';';
    }
    return s;
  };

  rep.blocks_have_escape = true;
  std::set<std::string> firsts;
  std::vector<std::vector<std::string>> per_position(blocks_to_check);
  for (long long x = 0; x < n; ++x) {
    for (long long y = 0; y < n; ++y) {
      if (x == 0 && y == 0) continue;
      const std::vector<Int> rho = {Int(x), Int(y)};
      const auto letters = code_lattice_orbit(rho, Int(n), partition, steps);
      ++rep.characters_checked;
      for (long long b = 0; b < blocks_to_check; ++b) {
        bool escape = false;
        std::vector<std::vector<int>> block(letters.begin() + b * rep.k,
                                            letters.begin() + (b + 1) * rep.k);
        for (const auto& ls : block)
          for (int id : ls)
            if (!in_r0[id]) escape = true;
        if (!escape) {
          rep.blocks_have_escape = false;
          ++rep.failures;
        }
        per_position[b].push_back(canon(block));
      }
      firsts.insert(per_position[0].back());
    }
  }
  rep.first_blocks_distinct =
      static_cast<long long>(firsts.size()) == rep.characters_checked;
  rep.block_multisets_stationary = true;
  for (long long b = 0; b < blocks_to_check; ++b)
    std::sort(per_position[b].begin(), per_position[b].end());
  for (long long b = 1; b < blocks_to_check; ++b)
    if (per_position[b] != per_position[0]) rep.block_multisets_stationary = false;
  return rep;
}

double perron_root(const std::vector<std::vector<int>>& adjacency) {
  const int m = static_cast<int>(adjacency.size());
  if (m == 0) return 0.0;
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = adjacency[i][j];
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
  double rho = 0.0;
  for (int i = 0; i < m; ++i) rho = std::max(rho, std::abs(ev(i)));
  return rho;
}

}  // namespace torwalk
