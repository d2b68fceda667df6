#ifndef DIRACDOT_CORE_HPP
#define DIRACDOT_CORE_HPP

// The dot model: natural units, per-region energies and momenta with branch
// rules, secular residuals, phase shifts, Wigner delays and radial spinors.
//
// Everything works in the dimensionless variables
//   rho = r/R,  eps = E R/(hbar vF),  v = e V0 R/(hbar vF),  mu = m vF R/hbar,
// with v < 0 for a well.  All functions are pure.

#include "diracdot/specfun.hpp"

#include <complex>
#include <vector>

namespace diracdot::core {

using Complex = std::complex<double>;

struct DotParams {
    double mu = 0.0; // dimensionless mass, >= 0; 0 selects the massless model
    double v = 0.0;  // dimensionless well depth, < 0 for a well
    int ell = 0;     // orbital momentum of the upper component; j = ell + 1/2

    bool massless() const { return mu == 0.0; }
};

// Validates mu >= 0 and, for massive parameters, ell >= 0 (the massless
// pipelines accept any integer ell).  Throws DomainError.
void validate(const DotParams& p);

enum class Branch { BoundSearch, OutgoingRight, OutgoingLeft, ScatteringReal };

struct ChannelEnergies {
    Complex eps_i_plus, eps_i_minus; // eps - v +/- mu
    Complex eps_o_plus, eps_o_minus; // eps +/- mu
    Complex p_i, p_o;
    Branch branch = Branch::ScatteringReal;
};

// Momenta and energy offsets for both regions under the given branch rule:
//   BoundSearch    p_o = i sqrt(mu^2 - eps^2), decaying H1 outside; accepts
//                  complex eps with |Re eps| < mu (the bound sheet)
//   ScatteringReal p_o = +sqrt(eps^2 - mu^2) on the real axis
//   OutgoingRight/Left
//                  p_o continued from the real axis with Re eps >< 0; for
//                  mu = 0 this reduces to p_o = sign(Re eps) * eps
// p_i is always continued from +sqrt((eps-v)^2 - mu^2), eps - v > mu.
ChannelEnergies channel(const DotParams& p, Complex eps, Branch branch);

// Secular residual of the outgoing/bound matching condition,
//   eps_i^+ J_l(p_i) p_o H1_{l+1}(p_o) - eps_o^+ H1_l(p_o) p_i J_{l+1}(p_i),
// zero iff eps is a bound state (BoundSearch, real eps) or an outgoing
// resonance.  For mu = 0 evaluates the split-sign massless form instead.
// Throws SingularArgument when p_o = 0 (use critical_residual there).
Complex secular_residual(const DotParams& p, Complex eps, Branch branch);

// Same root set, rescaled by the power of p_o that keeps the value bounded
// near p_o = 0.  At eps = +mu it reduces to the critical-state equation and
// at eps = -mu to the supercritical one, which makes it the right function
// for resonance tracking across captures and collapses.
Complex secular_residual_scaled(const DotParams& p, Complex eps, Branch branch);

// Real-valued bound-state condition for real eps with eps - v > mu (the only
// regime where bound roots exist), expressed through I/K-type combinations
// so it is sign-faithful for bracketing.
double bound_secular_real(const DotParams& p, double eps);

// Left minus right side of  l (mu + sqrt(mu^2+p^2)) J_l(p) = mu p J_{l+1}(p).
double critical_residual(int ell, double mu, double p_inner);

// J_l(p); zeros give supercritical depths v = -mu - sqrt(mu^2 + p^2).
double supercritical_residual(int ell, double p_inner);

// J_l(p) for ell >= 0, J_{l+1}(p) for ell < 0; zeros give massless bound
// depths v = -p.
double massless_bound_residual(int ell, double p_inner);

enum class DepthKind { Critical, Supercritical, MasslessBound };

// Closed-form well depth for a root p of the matching residual above.
double depth_for_root(DepthKind kind, double mu, double p_inner);

// eps = E R/(hbar vF), v = e V0 R/(hbar vF), mu = m vF R/hbar.
struct NaturalUnits {
    double eps = 0.0, v = 0.0, mu = 0.0;
};
NaturalUnits to_natural_units(double E, double V0, double R, double m,
                              double vF, double hbar);

// Scattering phase in (-pi/2, pi/2] from the two-argument arctangent of the
// matching formula.  Requires eps > mu (massive) or eps > 0 (massless).
double phase_shift_raw(const DotParams& p, double eps);

enum class UnwrapConvention { AnchorHighEnergy };

// Removes the pi-jumps of the raw phase: anchored at the top of the grid to
// the representative closest to the principal value of -v (the high-energy
// limit tan delta -> -tan v), then continued downward with per-step
// adjustments < pi/2.  Throws UnwrapError on an ambiguous step.
std::vector<double> unwrap_phase(const std::vector<double>& raw,
                                 UnwrapConvention convention, double v);

struct DelayCurve {
    std::vector<double> energies;        // strictly increasing
    std::vector<double> raw_phase;       // principal interval per point
    std::vector<double> unwrapped_phase; // raw + integer multiples of pi
    std::vector<double> delay;           // tau = 2 d(delta)/d(eps)
    std::vector<bool> interpolated;      // points patched over IndeterminatePhase
};

// Fills curve.delay with 2 * symmetric difference quotients (one-sided at the
// ends).  Requires unwrapped_phase populated on >= 3 grid points.
DelayCurve wigner_delay(DelayCurve curve);

enum class StateKind { Bound, Critical, Supercritical, Scattering, MasslessBound };

enum class Region { Inner, Outer };

struct SpinorCoefficients {
    Complex a_i{1.0, 0.0}; // inner normalization, fixed to 1
    Complex a_o{0.0, 0.0}; // outer coefficient (H1 or power-law form)
    Complex A{0.0, 0.0};   // scattering J coefficient
    Complex B{0.0, 0.0};   // scattering Y coefficient, B = -A tan(delta)
};

struct RadialSpinor {
    Complex phi1, phi2;
    double rho = 0.0;
    Region region = Region::Inner;
    SpinorCoefficients coeffs;
};

// Radial components at rho, matched at rho = 1 with a_i = 1.  eps must
// satisfy the state's secular condition (MatchError beyond 1e-6 relative);
// Critical/Supercritical/MasslessBound use the closed-form outer solutions.
RadialSpinor radial_spinor(const DotParams& p, Complex eps, double rho,
                           StateKind kind);

struct ResonancePoint {
    double v = 0.0;
    Complex eps;
    double residual = 0.0;
    enum class Class { Resonance, Bound, Critical, Supercritical } classification =
        Class::Resonance;
};

// Classification per the bound-window invariants.
ResonancePoint::Class classify(const DotParams& p, Complex eps);

} // namespace diracdot::core

#endif
