#pragma once

#include <string>

namespace weylsys {

/// Limits and execution knobs shared by every enumeration.
struct Budget {
  /// Maximum number of elementary evaluations an enumeration may perform.
  double ceiling = 1e9;
  /// Worker threads; results never depend on this value.
  unsigned workers = 1;

  /// Throws FeasibilityError when cost > ceiling.
  void require(double cost, const std::string& what) const;
};

}  // namespace weylsys
