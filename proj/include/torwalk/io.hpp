#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include <torwalk/intmat.hpp>
#include <torwalk/measure.hpp>
#include <torwalk/symbolic.hpp>

namespace torwalk {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// {"d": 2, "rows": [[1,1],[1,0]]} or a bare [[1,1],[1,0]]
IntMat parse_matrix_json(const std::string& text);

// [{"point": [1,0], "prob": "1/3"}, ...]; "uniform": [[...], ...] also works
IncrementMeasure parse_measure_json(const std::string& text);

nlohmann::ordered_json matrix_to_json(const IntMat& A);
nlohmann::ordered_json measure_to_json(const IncrementMeasure& mu);
nlohmann::ordered_json partition_to_json(const MarkovPartition& P);

// %.17g, locale-independent
std::string format_double(double x);

// Unit square view; rectangles drawn at all lattice shifts that intersect
// it, orbit points (if any) as circles.
std::string partition_to_svg(const MarkovPartition& P,
                             const std::vector<Eigen::Vector2d>& orbit = {});

}  // namespace torwalk
