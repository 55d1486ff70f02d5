#pragma once

#include "gl3d/dec.hpp"
#include "gl3d/grid.hpp"

namespace gl3d {

// Spectral inversion of the componentwise 7-point Laplacian (= the discrete
// Hodge Laplacian dd* + d*d of the staggered operators in periodic mode).
//
// periodic_spectral: FFT per directional array; kernel (zero) modes are
// projected out, realizing -Delta Psi = f - mean(f).
//
// box_neumann_cosine: separable DST/DCT transforms chosen per entity
// staggering: zero (Dirichlet) extension along an array's staggered axis,
// even reflection transversally. This approximates the normal-zero Hodge
// boundary conditions; the coupling between components is only approximate,
// hence the looser box-mode tolerances downstream.
struct PoissonConfig {
  enum class Mode { periodic_spectral, box_neumann_cosine };
  Mode mode = Mode::periodic_spectral;
  double tolerance = 1e-10;

  static PoissonConfig for_grid(const GridSpec& g) {
    PoissonConfig c;
    c.mode = g.periodic() ? Mode::periodic_spectral : Mode::box_neumann_cosine;
    return c;
  }
};

Form0 poisson_inverse(const Form0& f, const PoissonConfig& cfg);
Form1 poisson_inverse(const Form1& f, const PoissonConfig& cfg);
Form2 poisson_inverse(const Form2& f, const PoissonConfig& cfg);
Form3 poisson_inverse(const Form3& f, const PoissonConfig& cfg);

// -Delta applied componentwise (7-point stencil with the grid's extension
// convention); for verifying solves.
Form1 minus_laplacian(const Form1& f);
Form0 minus_laplacian(const Form0& f);

struct HodgeParts {
  Form1 gamma;       // harmonic part (constant modes in periodic mode)
  Form1 d_alpha;     // exact part
  Form1 dstar_beta;  // co-exact part
  Form0 alpha;
  Form2 beta;
  double residual = 0.0;  // ||p - gamma - d_alpha - dstar_beta|| / ||p||
  // box mode: same residual 2 layers away from the boundary. The transform
  // extensions and the zero-extension grid operators disagree only in a
  // boundary skin; inside it the reconstruction is machine exact.
  double interior_residual = 0.0;
  std::array<double, 3> ortho{}; // <gamma,da>, <gamma,d*b>, <da,d*b> (normalized)
};

// p = gamma + d alpha + d* beta via Psi = L^{-1} p, alpha = d* Psi,
// beta = d Psi.
HodgeParts hodge_decompose(const Form1& p, const PoissonConfig& cfg);

// Mollification by the triple self-convolution of a radial hat supported in
// B_{r/3} (total support B_r), mass preserving; periodic grids only.
Form1 mollify(const Form1& f, double r);

}  // namespace gl3d
