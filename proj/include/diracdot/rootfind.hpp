#ifndef DIRACDOT_ROOTFIND_HPP
#define DIRACDOT_ROOTFIND_HPP

// Real bracketing/refinement, complex root iteration (Muller with a damped
// Newton fallback) and parameter continuation.  All routines are stateless
// and deterministic.

#include <complex>
#include <functional>
#include <vector>

namespace diracdot::rootfind {

using Complex = std::complex<double>;

struct Bracket {
    double lo = 0.0, hi = 0.0;
    double f_lo = 0.0, f_hi = 0.0;
};

// One bracket per sign change of f on a uniform grid.  No root counting
// guarantee between grid points.  Throws EvaluationError if f throws.
std::vector<Bracket> bracket_roots(const std::function<double(double)>& f,
                                   double lo, double hi, int subdivisions);

// Brent-style refinement inside a valid bracket; stops at |f| <= 1e-10 or
// interval width <= tol.  Throws NoConvergence after 200 iterations.
double refine_root(const std::function<double(double)>& f, const Bracket& b,
                   double tol);

struct ComplexRootOptions {
    double tol = 1e-10;
    int max_iter = 200;
    // iterate leaving |z| > escape_radius raises EscapedRegion; 0 disables
    double escape_radius = 0.0;
};

// Muller iteration from `seed` until |f| <= tol; falls back to damped Newton
// with a numerically differentiated derivative if Muller stagnates.
Complex complex_root(const std::function<Complex(Complex)>& f, Complex seed,
                     const ComplexRootOptions& opts = {});

struct TrackedRoot {
    double param_value = 0.0;
    Complex root;
    double residual = 0.0;
    // true when the plain extrapolated step converged; false when internal
    // step halving was needed to reach this grid point
    bool step_accepted = true;
};

struct TrackOptions {
    double tol = 1e-10;
    double jump_cap = 0.5;  // reject steps moving the root farther than this
    int max_halvings = 6;
    double escape_radius_scale = 10.0;
};

// Follows one root of the family f(v, eps) along v_grid.  Each step seeds
// complex_root with the previous root linearly extrapolated from the last
// two accepted points; rejected steps are retried with internally halved v
// steps.  Throws TrackLost when halving is exhausted.
std::vector<TrackedRoot>
track(const std::function<Complex(double, Complex)>& f_family,
      const std::vector<double>& v_grid, Complex seed,
      const TrackOptions& opts = {});

} // namespace diracdot::rootfind

#endif
