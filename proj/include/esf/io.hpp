#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "esf/intmatrix.hpp"

namespace esf {

using Json = nlohmann::ordered_json;

/// Shortest round-trip-safe decimal: printf "%.17g".
std::string fmt17(double v);
/// Compact form for human-readable text, printf "%.12g".
std::string fmt12(double v);

/// Serializes with every float rendered by fmt17 (nlohmann's default printer
/// uses the shortest representation, which is not what the output contract asks for).
std::string dump_json(const Json& j, int indent = 2);

/// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

Json to_json(const IntVec& v);
Json to_json(const IntMatrix& m);
Json to_json(const Eigen::MatrixXd& m);

}  // namespace esf
