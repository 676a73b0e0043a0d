#pragma once

#include <string>

namespace circadia {

/// Physical constants in SI units. One table is the single source for every
/// conversion; the flux quantum is stored, not recomputed from h and e.
struct PhysicalConstants {
  double hbar;           // J s
  double e;              // C
  double h;              // J s
  double flux_quantum;   // Wb, h / 2e
};

/// CODATA 2018 values (h and e exact; hbar and the flux quantum to double precision).
PhysicalConstants default_constants();

/// Reads a JSON object with keys `hbar`, `e`, `h`, `flux_quantum`.
PhysicalConstants load_constants(const std::string& path);

/// Process-wide table. Honors the CIRCADIA_CONSTANTS environment variable
/// (a path to a JSON table); intended for tests only.
const PhysicalConstants& constants();

}  // namespace circadia
