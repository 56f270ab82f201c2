#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <torwalk/errors.hpp>
#include <torwalk/fourier.hpp>
#include <torwalk/hyperbolic.hpp>
#include <torwalk/intmat.hpp>
#include <torwalk/io.hpp>
#include <torwalk/measure.hpp>
#include <torwalk/parallel.hpp>
#include <torwalk/rng.hpp>
#include <torwalk/smith.hpp>
#include <torwalk/symbolic.hpp>
#include <torwalk/walk.hpp>

using json = nlohmann::ordered_json;
using namespace torwalk;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string format;  // per-command default when empty
};

void emit(const GlobalOpts& g, const std::string& payload) {
  if (g.out.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
  } else {
    write_file(g.out, payload);
  }
}

void emit_json(const GlobalOpts& g, const json& j) { emit(g, j.dump(2) + "\n"); }

std::string csv_join(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

IntMat load_matrix(const std::string& path) { return parse_matrix_json(read_file(path)); }
IncrementMeasure load_measure(const std::string& path) {
  return parse_measure_json(read_file(path));
}

std::vector<std::string> poly_strings(const IntPoly& p) {
  std::vector<std::string> out;
  for (const Int& c : p) out.push_back(c.str());
  return out;
}

double contraction_k(const HyperbolicConstants& hc, const AdaptedNorm& nrm, long long n) {
  return 1 + std::ceil(hc.gap_exponent * std::log(static_cast<double>(n)) /
                       std::log(1.0 / nrm.lambda));
}

// TV between the empirical law of X_t and uniform, through a sparse end-state
// histogram, so moduli far beyond the dense-state budget stay reachable.
double tv_mc_to_uniform(const IntMat& A, const IncrementMeasure& mu, long long n, long long t,
                        long long replicates, std::uint64_t seed, int threads) {
  WalkConfig cfg;
  cfg.A = A;
  cfg.mu = mu;
  cfg.n = n;
  cfg.horizon = t;
  cfg.seed = seed;
  cfg.replicates = replicates;
  const auto ends = simulate_walk(cfg, threads);
  std::map<std::vector<long long>, long long> counts;
  for (const auto& x : ends) ++counts[x];
  double states = 1.0;
  for (int c = 0; c < mu.d; ++c) states *= static_cast<double>(n);
  const double u = 1.0 / states;
  double tv = 0.0;
  for (const auto& [x, c] : counts)
    tv += std::abs(static_cast<double>(c) / static_cast<double>(replicates) - u);
  tv += (states - static_cast<double>(counts.size())) * u;  // states never hit
  return 0.5 * tv;
}

// ---------------------------------------------------------------- analyze
int cmd_analyze(const GlobalOpts& g, const std::string& matrix_path) {
  const IntMat A = load_matrix(matrix_path);
  json j;
  j["matrix"] = matrix_to_json(A);
  j["det"] = determinant(A).str();
  j["char_poly"] = poly_strings(characteristic_polynomial(A));
  const bool hyp = is_hyperbolic(A);
  j["hyperbolic"] = hyp;
  if (!hyp) {
    emit_json(g, j);
    return 3;
  }
  const Splitting split = stable_unstable_split(A);
  const AdaptedNorm nrm = adapted_norm(split);
  const HyperbolicConstants hc = hyperbolic_constants(nrm);
  j["stable_dim"] = split.stable_dim;
  j["unstable_dim"] = split.unstable_dim;
  j["lambda"] = nrm.lambda;
  j["epsilon_c"] = hc.expansiveness_constant;
  j["c1"] = hc.gap_scale;
  j["c2"] = hc.gap_exponent;
  j["shortest_vector"] = hc.shortest_vector;
  emit_json(g, j);
  return 0;
}

// ------------------------------------------------------------ convergence
int cmd_convergence(const GlobalOpts& g, const std::string& matrix_path,
                    const std::string& measure_path, long long n) {
  const IntMat A = load_matrix(matrix_path);
  const IncrementMeasure mu = load_measure(measure_path);
  if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
  const SubgroupBasis H = invariant_subgroup(A, mu.points);
  const ConvergenceReport rep = convergence_check(H, n);
  json j;
  j["n"] = n;
  j["rank"] = H.rank;
  json factors = json::array();
  for (const Int& f : H.factors) factors.push_back(f.str());
  j["factors"] = factors;
  j["converges"] = rep.converges;
  j["reason"] = rep.diagnostic;
  emit_json(g, j);
  return 0;
}

// --------------------------------------------------------------------- tv
int cmd_tv(const GlobalOpts& g, const std::string& matrix_path, const std::string& measure_path,
           long long n, long long t_min, long long t_max, const std::string& lb_mode,
           bool force, long long mc_replicates) {
  const IntMat A = load_matrix(matrix_path);
  const IncrementMeasure mu = load_measure(measure_path);
  if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
  if (t_max < t_min || t_min < 0) throw DomainError("need 0 <= t-min <= t-max");
  const SubgroupBasis H = invariant_subgroup(A, mu.points);
  const ConvergenceReport conv = convergence_check(H, n);
  if (!conv.converges && !force)
    throw DomainError("walk does not converge for n=" + std::to_string(n) + " (" +
                      conv.diagnostic + "); pass --force to proceed");
  const LowerBoundMode mode =
      lb_mode == "literal" ? LowerBoundMode::kLiteral : LowerBoundMode::kDerived;

  bool exact_ok = true;
  TorusDistribution p;
  try {
    p = exact_distribution(A, mu, n, t_min);
  } catch (const BudgetExceeded&) {
    if (mc_replicates <= 0) throw;
    exact_ok = false;
  }

  std::string csv = csv_join({"n", "d", "t", "tv_exact", "tv_mc", "lower_bound", "l2_bound"});
  for (long long t = t_min; t <= t_max; ++t) {
    std::string tv_exact, tv_mc, l2;
    if (exact_ok) {
      tv_exact = format_double(tv_to_uniform(p));
      if (t < t_max) p = step_distribution(p, A, mu);
    }
    if (mc_replicates > 0)
      tv_mc = format_double(tv_mc_to_uniform(
          A, mu, n, t, mc_replicates, g.seed + static_cast<std::uint64_t>(t) * 0x9e3779b9ULL,
          g.threads));
    const LowerBoundValue lb = entropy_lower_bound(mu, n, mu.d, t, mode);
    try {
      l2 = format_double(l2_bound(mu, A, n, t, 1LL << 27, g.threads).tv_bound);
    } catch (const BudgetExceeded&) {
      // column stays empty when the dual sum is out of reach
    }
    csv += csv_join({std::to_string(n), std::to_string(mu.d), std::to_string(t), tv_exact,
                     tv_mc, format_double(lb.clamped), l2});
  }
  emit(g, csv);
  return 0;
}

// ------------------------------------------------------------------- scan
int cmd_scan(const GlobalOpts& g, const std::string& matrix_path,
             const std::string& measure_path, long long n_min, long long n_max,
             long long n_count, const std::string& filter, double target,
             const std::string& method, long long mc_replicates) {
  const IntMat A = load_matrix(matrix_path);
  const IncrementMeasure mu = load_measure(measure_path);
  if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
  if (n_min < 2 || n_max < n_min) throw DomainError("need 2 <= n-min <= n-max");
  if (!(target > 0 && target < 1)) throw DomainError("target must be in (0, 1)");
  const SubgroupBasis H = invariant_subgroup(A, mu.points);

  std::vector<long long> ns;
  if (n_count > 0 && n_max > n_min) {
    for (long long i = 0; i < n_count; ++i) {
      const double f = static_cast<double>(i) / std::max<long long>(1, n_count - 1);
      const long long n = llround(
          std::exp(std::log(static_cast<double>(n_min)) +
                   f * (std::log(static_cast<double>(n_max)) - std::log(static_cast<double>(n_min)))));
      if (ns.empty() || n != ns.back()) ns.push_back(n);
    }
  } else {
    for (long long n = n_min; n <= n_max; ++n) ns.push_back(n);
  }
  if (filter == "coprime-to-factors") {
    std::vector<long long> kept;
    for (long long n : ns) {
      bool ok = true;
      for (const Int& f : H.factors)
        if (gcd(Int(n), f) != 1) ok = false;
      if (ok) kept.push_back(n);
    }
    ns = kept;
  } else if (filter == "odd") {
    std::vector<long long> kept;
    for (long long n : ns)
      if (n % 2) kept.push_back(n);
    ns = kept;
  } else if (filter != "all") {
    throw DomainError("unknown filter " + filter);
  }

  struct Row {
    long long n = 0, t_mix = -1;
    std::string status = "skipped";
  };
  std::vector<Row> rows(ns.size());
  parallel_chunks(static_cast<long long>(ns.size()), g.threads, [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i) {
      Row& row = rows[static_cast<size_t>(i)];
      row.n = ns[static_cast<size_t>(i)];
      const ConvergenceReport conv = convergence_check(H, row.n);
      if (!conv.converges) continue;  // stays skipped
      const long long cap = llround(64.0 * std::log2(static_cast<double>(row.n)));
      try {
        if (method == "exact") {
          TorusDistribution p = exact_distribution(A, mu, row.n, 0);
          for (long long t = 0; t <= cap; ++t) {
            if (tv_to_uniform(p) <= target) {
              row.t_mix = t;
              row.status = "ok";
              break;
            }
            if (t < cap) p = step_distribution(p, A, mu);
          }
          if (row.t_mix < 0) row.status = "cap";
        } else {  // mc: bisection over t, justified by TV monotonicity
          auto tv_at = [&](long long t) {
            const std::uint64_t s =
                g.seed + static_cast<std::uint64_t>(row.n) * 0x100000001b3ULL +
                static_cast<std::uint64_t>(t) * 0x9e3779b9ULL;
            return tv_mc_to_uniform(A, mu, row.n, t, mc_replicates, s, 1);
          };
          long long lo_t = 0, hi_t = cap;
          if (tv_at(cap) > target) {
            row.status = "cap";
          } else {
            while (lo_t < hi_t) {
              const long long mid = lo_t + (hi_t - lo_t) / 2;
              if (tv_at(mid) <= target)
                hi_t = mid;
              else
                lo_t = mid + 1;
            }
            row.t_mix = lo_t;
            row.status = "ok";
          }
        }
      } catch (const BudgetExceeded&) {
        row.status = "skipped";
      }
    }
  });

  std::string csv = csv_join({"n", "t_mix", "log_n", "ratio", "status"});
  for (const Row& row : rows) {
    const double ln = std::log(static_cast<double>(row.n));
    csv += csv_join({std::to_string(row.n),
                     row.t_mix >= 0 ? std::to_string(row.t_mix) : "",
                     format_double(ln),
                     row.t_mix >= 0 ? format_double(row.t_mix / ln) : "",
                     row.status});
  }
  emit(g, csv);
  return 0;
}

// -------------------------------------------------------------- partition
int cmd_partition(const GlobalOpts& g, const std::string& matrix_path, double target_diameter,
                  long long samples) {
  const IntMat A = load_matrix(matrix_path);
  if (target_diameter <= 0) {
    const AdaptedNorm nrm = adapted_norm(stable_unstable_split(A));
    target_diameter = 0.95 * hyperbolic_constants(nrm).expansiveness_constant;
  }
  const MarkovPartition P = build_partition_2d(A, target_diameter);
  if (g.format == "svg") {
    emit(g, partition_to_svg(P));
    return 0;
  }
  const MarkovReport rep = verify_markov(P, A, samples, g.seed == 0 ? 7 : g.seed);
  const double rho = perron_root(P.adjacency);
  json j;
  j["m"] = P.boxes.size();
  j["diameter"] = P.diameter;
  j["delta0"] = P.delta0;
  j["seg_a"] = P.seg_a;
  j["seg_c"] = P.seg_c;
  j["perron_root"] = rho;
  j["log_perron"] = std::log(rho);
  j["markov"] = json{{"ok", rep.ok},
                     {"area_sum", rep.area_sum},
                     {"max_overlap", rep.max_overlap},
                     {"worst_violation", rep.worst_violation},
                     {"samples_checked", rep.samples_checked},
                     {"boundary_skips", rep.boundary_skips}};
  j["partition"] = partition_to_json(P);
  emit_json(g, j);
  return 0;
}

// ------------------------------------------------------------------- code
int cmd_code(const GlobalOpts& g, const std::string& matrix_path, const std::string& point_str,
             const std::string& word_str, long long window, double target_diameter) {
  const IntMat A = load_matrix(matrix_path);
  if (target_diameter <= 0) {
    const AdaptedNorm nrm = adapted_norm(stable_unstable_split(A));
    target_diameter = 0.95 * hyperbolic_constants(nrm).expansiveness_constant;
  }
  const MarkovPartition P = build_partition_2d(A, target_diameter);

  if (!word_str.empty()) {
    std::vector<int> word;
    std::stringstream ss(word_str);
    std::string cell;
    while (std::getline(ss, cell, ',')) word.push_back(std::stoi(cell));
    const DecodeResult dr = decode_word(word, P, A);
    json j;
    j["word"] = word;
    j["point"] = {dr.point(0), dr.point(1)};
    j["radius"] = dr.radius;
    emit_json(g, j);
    return 0;
  }

  if (point_str.empty()) throw ParseError("code needs --point or --word");
  Eigen::Vector2d x;
  {
    std::stringstream ss(point_str);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 2) throw ParseError("--point needs two comma-separated coordinates");
    x << vals[0], vals[1];
  }
  const SymbolicWindow win = code_point(x, P, A, window);

  if (g.format == "svg") {
    std::vector<Eigen::Vector2d> orbit;
    const Eigen::Matrix2d Ad = [&] {
      Eigen::Matrix2d M;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M(i, j) = static_cast<double>(A.at(i, j));
      return M;
    }();
    Eigen::Vector2d z = x;
    auto wrap = [](Eigen::Vector2d v) {
      v(0) -= std::floor(v(0));
      v(1) -= std::floor(v(1));
      return v;
    };
    z = wrap(z);
    for (long long k = 0; k <= window; ++k) {
      orbit.push_back(z);
      z = wrap(Ad * z);
    }
    emit(g, partition_to_svg(P, orbit));
    return 0;
  }

  const DecodeResult dr = decode_word(win.words.front(), P, A);
  json j;
  j["point"] = {x(0), x(1)};
  j["window"] = window;
  j["offset"] = win.offset;
  j["ambiguous"] = win.ambiguous;
  j["words"] = win.words;
  j["decoded"] = json{{"point", {dr.point(0), dr.point(1)}}, {"radius", dr.radius}};
  emit_json(g, j);
  return 0;
}

// ------------------------------------------------------------------ bound
int cmd_bound(const GlobalOpts& g, const std::string& matrix_path,
              const std::string& measure_path, long long n, long long r_flag, double eta_flag,
              double grid_step) {
  const IntMat A = load_matrix(matrix_path);
  const IncrementMeasure mu = load_measure(measure_path);
  if (A.rows() != mu.d) throw DomainError("matrix/measure dimension mismatch");
  if (n < 2) throw DomainError("modulus must be at least 2");
  const SubgroupBasis H = invariant_subgroup(A, mu.points);
  const ConvergenceReport conv = convergence_check(H, n);
  if (!conv.converges)
    throw DomainError("walk does not converge for n=" + std::to_string(n) + ": " +
                      conv.diagnostic);
  const BadSetW W = bad_set_W(H, A);

  // all dynamical machinery is instantiated with the transpose: the walk
  // characters evolve under it
  const IntMat At = A.transpose();
  const AdaptedNorm nrm = adapted_norm(stable_unstable_split(At));
  const HyperbolicConstants hc = hyperbolic_constants(nrm, H);
  const MarkovPartition P = build_partition_tuned(At, W, hc.expansiveness_constant);
  const ClassifyReport cls = classify_rectangles(P, W);
  if (!cls.successor_unique)
    throw DomainError("rectangles meeting W lack unique successors");

  double eta = cls.eta;
  if (eta_flag > 0) eta = std::min(eta, eta_flag);
  const GammaCertificate gc = certified_gamma(mu, A, W, eta, nrm, grid_step, g.threads);

  const long long k = static_cast<long long>(contraction_k(hc, nrm, n));
  long long r = r_flag;
  if (r <= 0)
    r = static_cast<long long>(std::ceil(
            std::log(static_cast<double>(cls.m0 * cls.m1 * k)) / std::log(1.0 / gc.gamma))) +
        10;
  const double bound = theoretical_bound(cls.m0, cls.m1, k, gc.gamma, r);

  json j;
  j["n"] = n;
  j["W_size"] = W.points.size();
  j["m"] = P.boxes.size();
  j["m0"] = cls.m0;
  j["m1"] = cls.m1;
  j["k"] = k;
  j["r"] = r;
  j["eta"] = eta;
  j["gamma"] = gc.gamma;
  j["bound"] = bound;
  const long long t_exact = r * k + mu.d;
  j["t_exact"] = t_exact;
  try {
    const TorusDistribution p = exact_distribution(A, mu, n, t_exact);
    j["tv_exact_at_t"] = tv_to_uniform(p);
  } catch (const BudgetExceeded&) {
    j["tv_exact_at_t"] = nullptr;
  }
  j["partition"] = json{{"m", P.boxes.size()},
                        {"diameter", P.diameter},
                        {"delta0", P.delta0},
                        {"seg_a", P.seg_a},
                        {"seg_c", P.seg_c}};
  j["certificate"] = json{{"eta", gc.eta},
                          {"gamma", gc.gamma},
                          {"grid_step", gc.grid_step},
                          {"lipschitz_bound", gc.lipschitz_bound},
                          {"grid_points", gc.grid_points},
                          {"max_f_retained", gc.max_f_retained}};
  emit_json(g, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine random walks on (Z/nZ)^d: exact TV, Fourier bounds, partitions"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--out", g.out, "write output to a file instead of stdout");
  app.add_option("--format", g.format, "output format: json, csv, or svg");

  std::string matrix_path, measure_path, point_str, word_str, lb_mode = "derived";
  std::string filter = "all", method = "exact";
  long long n = 0, t_min = 0, t_max = 0, mc_replicates = 0, samples = 200;
  long long n_min = 2, n_max = 2, n_count = 0, window = 8, r_flag = 0;
  double target = 0.25, target_diameter = 0.0, eta_flag = 0.0, grid_step = 0.0;
  bool force = false;

  CLI::App* analyze = app.add_subcommand("analyze", "hyperbolicity and adapted constants");
  analyze->add_option("--matrix", matrix_path, "matrix JSON file")->required();

  CLI::App* convergence = app.add_subcommand("convergence", "equidistribution criterion");
  convergence->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  convergence->add_option("--measure", measure_path, "measure JSON file")->required();
  convergence->add_option("--n", n, "modulus")->required();

  CLI::App* tv = app.add_subcommand("tv", "total variation trajectory");
  tv->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  tv->add_option("--measure", measure_path, "measure JSON file")->required();
  tv->add_option("--n", n, "modulus")->required();
  tv->add_option("--t-min", t_min, "first step")->capture_default_str();
  tv->add_option("--t-max", t_max, "last step")->required();
  tv->add_option("--lower-bound-mode", lb_mode, "derived or literal")->capture_default_str();
  tv->add_flag("--force", force, "proceed even when the walk does not converge");
  tv->add_option("--mc", mc_replicates, "Monte Carlo replicates (fallback for big n^d)");

  CLI::App* scan = app.add_subcommand("scan", "mixing time as a function of n");
  scan->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  scan->add_option("--measure", measure_path, "measure JSON file")->required();
  scan->add_option("--n-min", n_min, "smallest modulus")->required();
  scan->add_option("--n-max", n_max, "largest modulus")->required();
  scan->add_option("--n-count", n_count, "log-spaced sample count (0 = every n)");
  scan->add_option("--filter", filter, "all, coprime-to-factors, or odd")
      ->capture_default_str();
  scan->add_option("--target", target, "TV threshold defining the mixing time")
      ->capture_default_str();
  scan->add_option("--method", method, "exact or mc")->capture_default_str();
  scan->add_option("--mc-replicates", mc_replicates, "replicates for --method mc");

  CLI::App* partition = app.add_subcommand("partition", "build and verify a partition");
  partition->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  partition->add_option("--target-diameter", target_diameter,
                        "refinement target (default: just under the expansiveness radius)");
  partition->add_option("--samples", samples, "verification samples per rectangle")
      ->capture_default_str();

  CLI::App* code = app.add_subcommand("code", "symbolic coding round trips");
  code->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  code->add_option("--point", point_str, "torus point to code, e.g. 0.3,0.7");
  code->add_option("--word", word_str, "letter sequence to decode, e.g. 4,2,7");
  code->add_option("--window", window, "coding window half-width")->capture_default_str();
  code->add_option("--target-diameter", target_diameter, "partition refinement target");

  CLI::App* bound = app.add_subcommand("bound", "theoretical mixing bound pipeline");
  bound->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  bound->add_option("--measure", measure_path, "measure JSON file")->required();
  bound->add_option("--n", n, "modulus")->required();
  bound->add_option("--r", r_flag, "block count (default: derived from the certified rate)");
  bound->add_option("--eta", eta_flag, "override the certified margin (shrink only)");
  bound->add_option("--grid-step", grid_step, "certification grid step (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 1;
  std::string name = "?";
  try {
    if (analyze->parsed()) {
      name = "analyze";
      rc = cmd_analyze(g, matrix_path);
    } else if (convergence->parsed()) {
      name = "convergence";
      rc = cmd_convergence(g, matrix_path, measure_path, n);
    } else if (tv->parsed()) {
      name = "tv";
      rc = cmd_tv(g, matrix_path, measure_path, n, t_min, t_max, lb_mode, force, mc_replicates);
    } else if (scan->parsed()) {
      name = "scan";
      if (method == "mc" && mc_replicates <= 0) mc_replicates = 100000;
      rc = cmd_scan(g, matrix_path, measure_path, n_min, n_max, n_count, filter, target, method,
                    mc_replicates);
    } else if (partition->parsed()) {
      name = "partition";
      rc = cmd_partition(g, matrix_path, target_diameter, samples);
    } else if (code->parsed()) {
      name = "code";
      rc = cmd_code(g, matrix_path, point_str, word_str, window, target_diameter);
    } else if (bound->parsed()) {
      name = "bound";
      rc = cmd_bound(g, matrix_path, measure_path, n, r_flag, eta_flag, grid_step);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NotHyperbolic& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const NotContractive& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "# %s finished in %.2fs\n", name.c_str(), secs);
  return rc;
}
