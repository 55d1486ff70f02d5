#include "gl3d/field_io.hpp"

#include <cstring>
#include <fstream>

namespace gl3d {

namespace {

void write_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(reinterpret_cast<const char*>(p), std::streamsize(n));
}

void read_bytes(std::istream& is, void* p, size_t n) {
  is.read(reinterpret_cast<char*>(p), std::streamsize(n));
  if (!is) throw invalid_input("field io: truncated file");
}

void write_header(std::ostream& os, uint8_t kind, const GridSpec& g) {
  write_bytes(os, "GL3D", 4);
  uint16_t ver = kFieldFormatVersion;
  write_bytes(os, &ver, 2);
  write_bytes(os, &kind, 1);
  for (int a = 0; a < 3; ++a) {
    uint64_t d = uint64_t(g.dims[a]);
    write_bytes(os, &d, 8);
  }
  write_bytes(os, &g.spacing, 8);
  uint8_t bm = uint8_t(g.mode);
  write_bytes(os, &bm, 1);
}

GridSpec read_header(std::istream& is, uint8_t& kind) {
  char magic[4];
  read_bytes(is, magic, 4);
  if (std::memcmp(magic, "GL3D", 4) != 0) throw invalid_input("field io: bad magic");
  uint16_t ver = 0;
  read_bytes(is, &ver, 2);
  if (ver != kFieldFormatVersion) throw invalid_input("field io: unsupported version");
  read_bytes(is, &kind, 1);
  GridSpec g;
  for (int a = 0; a < 3; ++a) {
    uint64_t d = 0;
    read_bytes(is, &d, 8);
    g.dims[a] = int64_t(d);
  }
  read_bytes(is, &g.spacing, 8);
  uint8_t bm = 0;
  read_bytes(is, &bm, 1);
  if (bm > 1) throw invalid_input("field io: bad boundary mode");
  g.mode = BoundaryMode(bm);
  g.validate();
  return g;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw invalid_input("field io: cannot open for write: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw invalid_input("field io: cannot open for read: " + path);
  return is;
}

}  // namespace

void save_field(const std::string& path, const ComplexField& u) {
  auto os = open_out(path);
  write_header(os, 0, u.grid);
  write_bytes(os, u.values.data(), u.values.size() * sizeof(cplx));
}

template <int K>
static void save_dir(const std::string& path, const FormDir<K>& w) {
  auto os = open_out(path);
  write_header(os, uint8_t(K), w.grid);
  for (int a = 0; a < 3; ++a)
    write_bytes(os, w.comp[a].v.data(), w.comp[a].v.size() * sizeof(double));
}

void save_field(const std::string& path, const Form1& w) { save_dir<1>(path, w); }
void save_field(const std::string& path, const Form2& w) { save_dir<2>(path, w); }

void save_field(const std::string& path, const Form3& w) {
  auto os = open_out(path);
  write_header(os, 3, w.grid);
  write_bytes(os, w.a.v.data(), w.a.v.size() * sizeof(double));
}

FieldVariant load_field(const std::string& path) {
  auto is = open_in(path);
  uint8_t kind = 0;
  GridSpec g = read_header(is, kind);
  switch (kind) {
    case 0: {
      ComplexField u(g);
      read_bytes(is, u.values.data(), u.values.size() * sizeof(cplx));
      return u;
    }
    case 1: {
      Form1 w(g);
      for (int a = 0; a < 3; ++a)
        read_bytes(is, w.comp[a].v.data(), w.comp[a].v.size() * sizeof(double));
      return w;
    }
    case 2: {
      Form2 w(g);
      for (int a = 0; a < 3; ++a)
        read_bytes(is, w.comp[a].v.data(), w.comp[a].v.size() * sizeof(double));
      return w;
    }
    case 3: {
      Form3 w(g);
      read_bytes(is, w.a.v.data(), w.a.v.size() * sizeof(double));
      return w;
    }
    default:
      throw invalid_input("field io: unknown kind");
  }
}

ComplexField load_complex_field(const std::string& path) {
  auto f = load_field(path);
  if (auto* u = std::get_if<ComplexField>(&f)) return std::move(*u);
  throw invalid_input("field io: not a complex field: " + path);
}

Form1 load_form1(const std::string& path) {
  auto f = load_field(path);
  if (auto* w = std::get_if<Form1>(&f)) return std::move(*w);
  throw invalid_input("field io: not a 1-form: " + path);
}

Form2 load_form2(const std::string& path) {
  auto f = load_field(path);
  if (auto* w = std::get_if<Form2>(&f)) return std::move(*w);
  throw invalid_input("field io: not a 2-form: " + path);
}

}  // namespace gl3d
