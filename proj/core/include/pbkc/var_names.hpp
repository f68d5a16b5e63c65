#pragma once

#include <cstddef>
#include <string>

namespace pbkc {

/// Parses a variable name of the form "x<k>" with k >= 1 and no leading
/// zeros; returns 0 when the name is not of that form.
std::size_t parse_var_index(const std::string& name);

/// Builds the canonical name of variable k (1-based): var_name(3) == "x3".
std::string var_name(std::size_t index);

} // namespace pbkc
