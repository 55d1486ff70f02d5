#pragma once

#include <string>
#include <variant>

#include "gl3d/grid.hpp"

namespace gl3d {

// Shared binary field format:
//   magic "GL3D", version u16, kind u8 (0 = complex vertex field,
//   1..3 = Form1..Form3), dims 3 x u64, spacing f64, boundary_mode u8,
//   then little-endian f64 payload in lexicographic order (x fastest);
//   complex values interleaved (re, im). Form1/Form2 store the three
//   directional arrays in axis order.

constexpr uint16_t kFieldFormatVersion = 1;

using FieldVariant = std::variant<ComplexField, Form1, Form2, Form3>;

void save_field(const std::string& path, const ComplexField& u);
void save_field(const std::string& path, const Form1& w);
void save_field(const std::string& path, const Form2& w);
void save_field(const std::string& path, const Form3& w);

FieldVariant load_field(const std::string& path);

ComplexField load_complex_field(const std::string& path);
Form1 load_form1(const std::string& path);
Form2 load_form2(const std::string& path);

}  // namespace gl3d
