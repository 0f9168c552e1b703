#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rpp/system_model.hpp"

namespace rpp {

/// Contents of a system file:
///   {"A": [[...]], "B": [[...]], "poles": [{"re": r, "im": i, "mult": k}, ...]}
/// with optional "F" (gain to audit), "id", "provenance" and "checksum".
struct SystemFile {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::vector<Complex> poles;
  std::vector<int> multiplicities;
  std::optional<Eigen::MatrixXd> gain;
  std::string id;
  std::string provenance;
  std::string checksum;
};

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
/// Throws MalformedFile on ragged or non-numeric input.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what);

nlohmann::json poles_to_json(const SpectrumSpec& spec);

/// Throws MalformedFile.
SystemFile parse_system_json(const nlohmann::json& j);
SystemFile read_system_file(const std::filesystem::path& path);

/// "sha256:<hex>" of the canonical serialization of A, B and poles.
std::string content_checksum(const SystemFile& file);

/// Parses "-1,-2,-1+2i,-1-2i" (also accepts j for the imaginary unit).
/// Throws MalformedFile.
std::vector<Complex> parse_pole_list(const std::string& text);

}  // namespace rpp
