#pragma once
// JSON and CSV artifacts.  Floats are written as shortest round-trip decimal
// strings; readers accept strings or plain JSON numbers.

#include <string>
#include <vector>

#include <json.hpp>

#include "relucoll/index_sets.hpp"
#include "relucoll/matrix.hpp"
#include "relucoll/network.hpp"

namespace rc {

using Json = nlohmann::json;

std::string format_double(double v);
double parse_double(const Json& j, const std::string& where);
Json float_array(const std::vector<double>& v);
std::vector<double> parse_float_array(const Json& j, const std::string& where);

Json weights_to_json(const WeightModel& w);
WeightModel weights_from_json(const Json& j);

Json plan_to_json(const CollocationPlan& plan);
// Rebuilds the plan from its index set and checks the stored triples.
CollocationPlan plan_from_json(const Json& j);

// Layers with at most this many dense entries are written densely.
constexpr std::size_t kDenseLayerLimit = 4096;

Json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const Json& j);

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j, const std::string& where);

// Stable 16-hex-digit FNV-1a hash of a JSON value's canonical dump.
std::string json_hash(const Json& j);

std::string read_text(const std::string& path);
// Writes through a temporary file and renames, so readers never see a
// partial artifact.  Parent directories are created.
void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

// CSV of floats with an optional header line (skipped when non-numeric).
Mat read_csv_matrix(const std::string& path);
std::string csv_matrix(const Mat& m, const std::vector<std::string>& header);

}  // namespace rc
