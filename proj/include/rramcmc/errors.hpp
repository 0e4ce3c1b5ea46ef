#pragma once

#include <stdexcept>
#include <string>

namespace rramcmc {

// Error categories with distinct CLI exit codes (see tools/main.cpp).
// Programming-contract violations use std:: exceptions directly.

// Invalid or inconsistent configuration. Exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable, malformed, or schema-violating input data. Exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Chain exceeded reject_cap consecutive rejections at one row. Exit code 4.
struct StuckChainError : std::runtime_error {
    int row;
    StuckChainError(int row_, const std::string& msg)
        : std::runtime_error(msg), row(row_) {}
};

} // namespace rramcmc
