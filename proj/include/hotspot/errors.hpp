#pragma once

#include <stdexcept>
#include <string>

namespace hotspot {

// Error taxonomy mirrors the CLI exit-code contract:
//   config_error -> 2, data_error -> 3, degeneracy_error -> 4.

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Statistical degeneracy: zero variance, constant inputs, empty spreads.
class degeneracy_error : public std::runtime_error {
public:
    explicit degeneracy_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hotspot
