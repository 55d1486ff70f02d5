#pragma once

#include <stdexcept>
#include <string>

namespace gl3d {

// Bad arguments, shape mismatches, schema violations. CLI exit code 2.
struct invalid_input : std::runtime_error {
  explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical contract failed at runtime (circulation defect, invalid
// plaquette, unmatched assembly vertex, ...). CLI exit code 3.
struct contract_error : std::runtime_error {
  explicit contract_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gl3d
