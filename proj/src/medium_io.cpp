#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dquant/error.h"
#include "dquant/susceptibility.h"

namespace dquant {

MediumSpec parse_medium_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed medium JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("medium JSON must be an object");

  UnitSystem units = UnitSystem::natural();
  const std::string unit_name = doc.value("units", std::string("natural"));
  if (unit_name == "si")
    units = UnitSystem::si();
  else if (unit_name != "natural")
    throw InputError("units must be \"natural\" or \"si\"");

  const int dim = doc.value("dim", 1);
  if (dim != 1 && dim != 3) throw InputError("dim must be 1 or 3");
  if (!doc.contains("chi") || !doc["chi"].is_object()) throw InputError("medium JSON needs a \"chi\" object");

  int max_order = 0;
  for (const auto& [key, value] : doc["chi"].items()) {
    int order = 0;
    try {
      order = std::stoi(key);
    } catch (const std::exception&) {
      throw InputError("chi keys must be integer orders, got \"" + key + "\"");
    }
    if (order < 1) throw InputError("chi orders start at 1");
    max_order = std::max(max_order, order);
  }
  if (max_order == 0) throw InputError("medium JSON has no susceptibilities");

  std::vector<SusceptibilityTensor> chi;
  for (int n = 1; n <= max_order; ++n) {
    const std::string key = std::to_string(n);
    if (!doc["chi"].contains(key)) {
      if (n == 1) throw InputError("chi(1) is required");
      chi.push_back(SusceptibilityTensor::zero(n, TensorRole::chi, dim));
      continue;
    }
    const auto& arr = doc["chi"][key];
    if (!arr.is_array()) throw InputError("chi(" + key + ") must be an array");
    std::vector<complex> entries;
    for (const auto& v : arr) {
      if (!v.is_number()) throw InputError("chi(" + key + ") entries must be real numbers");
      entries.emplace_back(v.get<double>(), 0.0);
    }
    std::size_t expected = 1;
    for (int r = 0; r <= n; ++r) expected *= static_cast<std::size_t>(dim);
    if (entries.size() != expected)
      throw InputError("chi(" + key + ") needs " + std::to_string(expected) + " entries");
    chi.emplace_back(n, TensorRole::chi, dim, std::move(entries));
  }
  return MediumSpec(units, dim, std::move(chi));
}

MediumSpec load_medium(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open medium file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_medium_json(ss.str());
}

}  // namespace dquant
