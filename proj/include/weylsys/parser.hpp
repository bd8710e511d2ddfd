#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "weylsys/form.hpp"

namespace weylsys {

/// Parses e.g. "x1^2 + 2*x11^2 - 3*x1*x2" into a form in `num_vars` variables.
/// Terms are separated by + and -; a term is '*'-separated integer factors and
/// powers xK^E. Implicit multiplication ("2x1") is rejected. The degree is
/// inferred from the terms unless given; it must be given for "0".
Form parse_polynomial(std::string_view text, int num_vars, std::optional<int> degree = std::nullopt);

/// Canonical text of a form, accepted by parse_polynomial.
std::string format_polynomial(const Form& form);

}  // namespace weylsys
