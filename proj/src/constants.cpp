#include "circadia/constants.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "circadia/errors.hpp"
#include "json.hpp"

namespace circadia {

PhysicalConstants default_constants() {
  return PhysicalConstants{
      .hbar = 1.054571817646156e-34,
      .e = 1.602176634e-19,
      .h = 6.62607015e-34,
      .flux_quantum = 2.0678338484619295e-15,
  };
}

PhysicalConstants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("CIRCADIA_CONSTANTS", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError("CIRCADIA_CONSTANTS", ex.what());
  }
  PhysicalConstants c = default_constants();
  auto take = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    double v = j.at(key).get<double>();
    if (!std::isfinite(v) || v <= 0.0) throw ValidationError(key, "must be finite and positive");
    slot = v;
  };
  take("hbar", c.hbar);
  take("e", c.e);
  take("h", c.h);
  take("flux_quantum", c.flux_quantum);
  return c;
}

const PhysicalConstants& constants() {
  static const PhysicalConstants table = [] {
    if (const char* path = std::getenv("CIRCADIA_CONSTANTS"); path && *path)
      return load_constants(path);
    return default_constants();
  }();
  return table;
}

}  // namespace circadia
