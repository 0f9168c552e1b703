#include "rpp/system_io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "rpp/error.hpp"

namespace rpp {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::MalformedFile, what + " must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw Error(ErrorCode::MalformedFile, what + " rows must be non-empty arrays");
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw Error(ErrorCode::MalformedFile, what + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw Error(ErrorCode::MalformedFile, what + " has a non-numeric entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json poles_to_json(const SpectrumSpec& spec) {
  json poles = json::array();
  for (int i = 0; i < spec.size(); ++i) {
    poles.push_back({{"re", spec.values()[i].real()}, {"im", spec.values()[i].imag()},
                     {"mult", spec.multiplicities()[i]}});
  }
  return poles;
}

SystemFile parse_system_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedFile, "system file must hold a JSON object");
  for (const char* key : {"A", "B", "poles"}) {
    if (!j.contains(key)) throw Error(ErrorCode::MalformedFile, std::string("missing field \"") + key + "\"");
  }
  SystemFile out;
  out.a = matrix_from_json(j["A"], "A");
  out.b = matrix_from_json(j["B"], "B");
  if (!j["poles"].is_array()) throw Error(ErrorCode::MalformedFile, "\"poles\" must be an array");
  for (const json& p : j["poles"]) {
    if (!p.is_object() || !p.contains("re") || !p["re"].is_number()) {
      throw Error(ErrorCode::MalformedFile, "each pole needs a numeric \"re\"");
    }
    const double im = p.contains("im") ? p["im"].get<double>() : 0.0;
    const int mult = p.contains("mult") ? p["mult"].get<int>() : 1;
    out.poles.emplace_back(p["re"].get<double>(), im);
    out.multiplicities.push_back(mult);
  }
  if (j.contains("F")) out.gain = matrix_from_json(j["F"], "F");
  if (j.contains("id")) out.id = j["id"].get<std::string>();
  if (j.contains("provenance")) out.provenance = j["provenance"].get<std::string>();
  if (j.contains("checksum")) out.checksum = j["checksum"].get<std::string>();
  return out;
}

SystemFile read_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
  try {
    return parse_system_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
}

std::string content_checksum(const SystemFile& file) {
  json canon;
  canon["A"] = matrix_to_json(file.a);
  canon["B"] = matrix_to_json(file.b);
  json poles = json::array();
  for (std::size_t i = 0; i < file.poles.size(); ++i) {
    poles.push_back({{"re", file.poles[i].real()}, {"im", file.poles[i].imag()}, {"mult", file.multiplicities[i]}});
  }
  canon["poles"] = poles;
  const std::string text = canon.dump();

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream hex;
  hex << "sha256:";
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::vector<Complex> parse_pole_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string s;
    for (char c : item) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) throw Error(ErrorCode::MalformedFile, "empty pole in list \"" + text + "\"");
    double re = 0.0, im = 0.0;
    try {
      const char last = s.back();
      if (last == 'i' || last == 'j') {
        s.pop_back();
        // split at the last sign that is not part of an exponent
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;) {
          if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
          }
        }
        if (split == std::string::npos) {
          im = (s.empty() || s == "+") ? 1.0 : (s == "-" ? -1.0 : std::stod(s));
        } else {
          re = std::stod(s.substr(0, split));
          const std::string ims = s.substr(split);
          im = ims == "+" ? 1.0 : (ims == "-" ? -1.0 : std::stod(ims));
        }
      } else {
        std::size_t used = 0;
        re = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedFile, "cannot parse pole \"" + item + "\"");
    }
    out.emplace_back(re, im);
  }
  if (out.empty()) throw Error(ErrorCode::MalformedFile, "empty pole list");
  return out;
}

}  // namespace rpp
