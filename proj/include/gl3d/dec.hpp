#pragma once

#include <optional>
#include <utility>

#include "gl3d/grid.hpp"

namespace gl3d {

// Discrete exterior calculus operators on the staggered grid. Form values
// are component samples at entity centers (densities, not integrated
// cochains): d carries the 1/spacing of the underlying finite differences,
// and the codifferential is the exact adjoint of d with respect to dot().
// In box mode out-of-domain samples are taken to be zero.

Form1 exterior_derivative(const Form0& f);
Form2 exterior_derivative(const Form1& w);
Form3 exterior_derivative(const Form2& s);

Form0 codifferential(const Form1& w);
Form1 codifferential(const Form2& s);
Form2 codifferential(const Form3& r);

// Componentwise identification between edge and face arrays (the metric
// factor is 1 for sample-valued forms on a cubic grid).
Form2 hodge_star(const Form1& w);
Form1 hodge_star(const Form2& s);

// Discrete L2 pairing: sum of component samples weighted by cell volume.
double dot(const Form0& a, const Form0& b);
double dot(const Form1& a, const Form1& b);
double dot(const Form2& a, const Form2& b);
double dot(const Form3& a, const Form3& b);

template <class F>
double l2_norm(const F& f) { return std::sqrt(dot(f, f)); }

// Lattice momentum ju = (iu, du): edge a->b carries Im(conj(u_a) u_b)/dx.
Form1 momentum(const ComplexField& u);

// Jacobian 2Ju = d(ju); returns d(momentum(u))/2.
Form2 jacobian_smooth(const ComplexField& u);

struct EnergyResult {
  double total = 0.0;
  Form3 density;  // per-cell energy density
};

// E_eps(u) = int 1/2 |Du|^2 + W(u)/eps^2 over the (optional) cell mask.
// Gradient term: per-axis forward differences averaged to cells; W averaged
// from vertices to cells. Lexicographic summation order.
EnergyResult energy(const ComplexField& u, double eps, const Potential& W,
                    const CellMask* mask = nullptr);

// L^q norm with cell-measure weighting; componentwise forms are averaged to
// cell centers and the pointwise Euclidean magnitude integrated.
double norm_lq(const Form1& w, double q);
double norm_lq(const Form2& w, double q);
double norm_lq(const Form3& w, double q);

// Total variation of a Form2 interpreted as a measure with per-face surface
// density: sum |value| * face area.
double mass_norm(const Form2& w);

}  // namespace gl3d
