#pragma once

#include <stdexcept>
#include <string>

namespace percond {

/// Invalid user input: bad config values, violated preconditions on sizes,
/// shapes or parameter ranges. Maps to CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure at run time: singular or non-finite solve, evaluation at
/// a forbidden point. Maps to CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace percond
