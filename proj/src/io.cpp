#include <torwalk/io.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>


#include <torwalk/errors.hpp>

namespace torwalk {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

IntMat parse_matrix_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
  const ordered_json& rows = j.is_array() ? j : j.at("rows");
  if (!rows.is_array() || rows.empty()) throw ParseError("matrix needs a rows array");
  const int d = static_cast<int>(rows.size());
  IntMat A(d, d);
  for (int i = 0; i < d; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != d)
      throw ParseError("matrix rows must be square");
    for (int k = 0; k < d; ++k) {
      if (!rows[i][k].is_number_integer()) throw ParseError("matrix entries must be integers");
      A.at(i, k) = Int(rows[i][k].get<long long>());
    }
  }
  return A;
}

IncrementMeasure parse_measure_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  }
  auto point_of = [](const ordered_json& p) {
    if (!p.is_array() || p.empty()) throw ParseError("measure points must be arrays");
    std::vector<long long> x;
    for (const auto& c : p) {
      if (!c.is_number_integer()) throw ParseError("measure point entries must be integers");
      x.push_back(c.get<long long>());
    }
    return x;
  };
  IncrementMeasure mu;
  if (j.is_object() && j.contains("uniform")) {
    std::vector<std::vector<long long>> pts;
    for (const auto& p : j.at("uniform")) pts.push_back(point_of(p));
    mu = IncrementMeasure::uniform(pts);
  } else {
    const ordered_json& entries = j.is_array() ? j : j.at("atoms");
    for (const auto& e : entries) {
      mu.points.push_back(point_of(e.at("point")));
      const auto& pr = e.at("prob");
      if (pr.is_string())
        mu.weights.push_back(parse_rational(pr.get<std::string>()));
      else if (pr.is_number_integer())
        mu.weights.push_back(Rational(pr.get<long long>()));
      else if (pr.is_number_float()) {
        mu.weights.push_back(Rational(pr.get<double>()));
        mu.exact = false;
      } else
        throw ParseError("prob must be a rational string or number");
    }
    if (mu.points.empty()) throw ParseError("measure needs at least one atom");
    mu.d = static_cast<int>(mu.points.front().size());
  }
  try {
    mu.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("measure: ") + e.what());
  }
  return mu;
}

ordered_json matrix_to_json(const IntMat& A) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < A.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < A.cols(); ++j) row.push_back(A.at(i, j).str());
    rows.push_back(row);
  }
  return ordered_json{{"d", A.rows()}, {"rows", rows}};
}

ordered_json measure_to_json(const IncrementMeasure& mu) {
  ordered_json atoms = ordered_json::array();
  for (size_t i = 0; i < mu.points.size(); ++i) {
    ordered_json pt = ordered_json::array();
    for (long long c : mu.points[i]) pt.push_back(c);
    std::ostringstream w;
    w << mu.weights[i];
    atoms.push_back(ordered_json{{"point", pt}, {"prob", w.str()}});
  }
  return atoms;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ordered_json partition_to_json(const MarkovPartition& P) {
  ordered_json rects = ordered_json::array();
  for (const Rectangle& r : P.rectangles) {
    rects.push_back(ordered_json{
        {"id", r.id},
        {"anchor", {r.anchor(0), r.anchor(1)}},
        {"unstable_edge", {r.unstable_edge(0), r.unstable_edge(1)}},
        {"stable_edge", {r.stable_edge(0), r.stable_edge(1)}},
    });
  }
  ordered_json adj = ordered_json::array();
  for (const auto& row : P.adjacency) adj.push_back(row);
  return ordered_json{{"rectangles", rects},
                      {"adjacency", adj},
                      {"diameter", P.diameter},
                      {"delta0", P.delta0}};
}

std::string partition_to_svg(const MarkovPartition& P, const std::vector<Eigen::Vector2d>& orbit) {
  const double S = 640.0;  // pixels per torus unit
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << S << "\" height=\"" << S
      << "\" viewBox=\"0 0 " << S << " " << S << "\">\n";
  svg << "<rect width=\"" << S << "\" height=\"" << S << "\" fill=\"white\"/>\n";
  auto px = [&](double x) { return x * S; };
  auto py = [&](double y) { return S - y * S; };  // y up
  const int m = static_cast<int>(P.rectangles.size());
  for (const Rectangle& r : P.rectangles) {
    const double hue = m > 0 ? 360.0 * r.id / m : 0.0;
    for (int k1 = -2; k1 <= 2; ++k1) {
      for (int k2 = -2; k2 <= 2; ++k2) {
        const Eigen::Vector2d a = r.anchor + Eigen::Vector2d(k1, k2);
        const Eigen::Vector2d b = a + r.unstable_edge;
        const Eigen::Vector2d c = b + r.stable_edge;
        const Eigen::Vector2d d = a + r.stable_edge;
        const double xlo = std::min({a(0), b(0), c(0), d(0)});
        const double xhi = std::max({a(0), b(0), c(0), d(0)});
        const double ylo = std::min({a(1), b(1), c(1), d(1)});
        const double yhi = std::max({a(1), b(1), c(1), d(1)});
        if (xhi < 0 || xlo > 1 || yhi < 0 || ylo > 1) continue;
        svg << "<polygon points=\"" << px(a(0)) << "," << py(a(1)) << " " << px(b(0)) << ","
            << py(b(1)) << " " << px(c(0)) << "," << py(c(1)) << " " << px(d(0)) << ","
            << py(d(1)) << "\" fill=\"hsl(" << hue
            << ",60%,80%)\" stroke=\"black\" stroke-width=\"0.5\" fill-opacity=\"0.85\"/>\n";
      }
    }
  }
  for (const Eigen::Vector2d& p : orbit)
    svg << "<circle cx=\"" << px(p(0)) << "\" cy=\"" << py(p(1))
        << "\" r=\"3\" fill=\"crimson\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace torwalk
