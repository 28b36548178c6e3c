#pragma once

#include <stdexcept>
#include <string>

namespace bmm {

// Precondition violations (nonpositive inputs, inactive pools, out-of-range
// ratios) raise std::domain_error. Oversized swap requests get their own type
// so callers such as the market loop can count and skip them.
class sized_input_error : public std::domain_error {
public:
    explicit sized_input_error(const std::string& what) : std::domain_error(what) {}
};

// Rejected configuration (unknown keys, invalid field values).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace bmm
