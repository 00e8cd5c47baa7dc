#include "kfr/checkpoint.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kfr/error.hpp"

namespace kfr {

namespace {

using nlohmann::json;

std::vector<double> read_vector(const json& doc, const char* field, std::size_t expected) {
  const auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) throw FormatError(std::string("checkpoint field ") + field + " is missing");
  if (expected != 0 && it->size() != expected) {
    throw FormatError(std::string("checkpoint field ") + field + " has shape " + std::to_string(it->size()) +
                      ", expected " + std::to_string(expected));
  }
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw FormatError(std::string("checkpoint field ") + field + " holds a non-finite entry");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string checkpoint_to_text(const PolicyParams& params) {
  params.validate_shape();
  json rows = json::array();
  for (int s = 0; s < kNumInstructionSubsets; ++s) {
    json row = json::array();
    for (int f = 0; f < kFeatureDim; ++f) row.push_back(params.u(s, f));
    rows.push_back(row);
  }
  json features = json::array();
  for (auto f : kFeatureNames) features.push_back(std::string(f));
  json kinds = json::array();
  for (auto k : kAttributeKindNames) kinds.push_back(std::string(k));
  const json doc{
      {"format", "kfr-policy"},
      {"version", kCheckpointVersion},
      {"features", features},
      {"attribute_kinds", kinds},
      {"k_max", params.k_max()},
      {"w_select", params.w_select},
      {"w_count", params.w_count},
      {"u_instr", rows},
  };
  return doc.dump(2) + "\n";
}

PolicyParams checkpoint_from_text(std::string_view text, int expected_k_max) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw FormatError("checkpoint is not a JSON object");
  if (doc.value("format", std::string{}) != "kfr-policy") throw FormatError("checkpoint field format is wrong");
  if (!doc.contains("version") || doc["version"] != kCheckpointVersion)
    throw FormatError("checkpoint field version is unsupported");

  std::vector<std::string> features;
  for (auto f : kFeatureNames) features.emplace_back(f);
  if (!doc.contains("features") || doc["features"] != json(features))
    throw FormatError("checkpoint field features does not match this build");
  std::vector<std::string> kinds;
  for (auto k : kAttributeKindNames) kinds.emplace_back(k);
  if (!doc.contains("attribute_kinds") || doc["attribute_kinds"] != json(kinds))
    throw FormatError("checkpoint field attribute_kinds does not match this build");

  if (!doc.contains("k_max") || !doc["k_max"].is_number_integer() || doc["k_max"].get<int>() < 1)
    throw FormatError("checkpoint field k_max is missing");
  const int k_max = doc["k_max"].get<int>();
  if (expected_k_max > 0 && k_max != expected_k_max) {
    throw FormatError("checkpoint field w_count has shape " + std::to_string(k_max) + ", expected " +
                      std::to_string(expected_k_max));
  }

  PolicyParams p(k_max);
  p.w_select = read_vector(doc, "w_select", kFeatureDim);
  p.w_count = read_vector(doc, "w_count", static_cast<std::size_t>(k_max));
  const auto it = doc.find("u_instr");
  if (it == doc.end() || !it->is_array() || it->size() != static_cast<std::size_t>(kNumInstructionSubsets))
    throw FormatError("checkpoint field u_instr has the wrong shape");
  for (int s = 0; s < kNumInstructionSubsets; ++s) {
    const json wrapper{{"row", (*it)[static_cast<std::size_t>(s)]}};
    const auto row = read_vector(wrapper, "row", kFeatureDim);
    for (int f = 0; f < kFeatureDim; ++f) p.u(s, f) = row[static_cast<std::size_t>(f)];
  }
  return p;
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path);
  }
}

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  write_file_atomic(path, checkpoint_to_text(params));
}

PolicyParams load_checkpoint(const std::string& path, int expected_k_max) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_text(ss.str(), expected_k_max);
}

}  // namespace kfr
