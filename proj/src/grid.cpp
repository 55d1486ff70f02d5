#include "gl3d/grid.hpp"

#include <cmath>

namespace gl3d {

bool ComplexField::finite() const {
  for (const cplx& c : values)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace gl3d
