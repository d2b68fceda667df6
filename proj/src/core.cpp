#include "diracdot/core.hpp"
#include "diracdot/errors.hpp"

#include <cmath>
#include <string>

namespace diracdot::core {

namespace sf = diracdot::specfun;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Complex ipow(int n)
{
    switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

// p^n H1_n(p), finite at p = 0 for n >= 1 where it tends to -(i/pi) 2^n (n-1)!.
Complex scaled_h1(int n, Complex p)
{
    if (n >= 1 && std::abs(p) < 1e-6) {
        double fac = 1.0;
        for (int k = 1; k < n; ++k)
            fac *= k;
        return Complex(0.0, -std::pow(2.0, n) * fac / kPi);
    }
    Complex h = sf::hankel(sf::Kind::H1, n, p);
    Complex pn(1.0, 0.0);
    for (int k = 0; k < std::abs(n); ++k)
        pn = (n > 0) ? pn * p : pn / p;
    return pn * h;
}

double principal_mod_pi(double x)
{
    double y = std::fmod(x, kPi);
    if (y > 0.5 * kPi)
        y -= kPi;
    else if (y <= -0.5 * kPi)
        y += kPi;
    return y;
}

} // namespace

void validate(const DotParams& p)
{
    if (!(p.mu >= 0.0))
        throw DomainError("DotParams: mu must be >= 0");
    if (p.massless()) {
        if (p.ell < -12 || p.ell > 11)
            throw DomainError("DotParams: massless ell outside [-12, 11]");
    } else {
        if (p.ell < 0)
            throw DomainError("DotParams: massive pipelines require ell >= 0");
        if (p.ell > 11)
            throw DomainError("DotParams: ell above 11 exceeds the supported Bessel orders");
    }
}

NaturalUnits to_natural_units(double E, double V0, double R, double m,
                              double vF, double hbar)
{
    if (!(R > 0.0) || !(vF > 0.0) || !(hbar > 0.0))
        throw DomainError("to_natural_units: R, vF and hbar must be positive");
    if (!(m >= 0.0))
        throw DomainError("to_natural_units: mass must be >= 0");
    NaturalUnits u;
    u.eps = E * R / (hbar * vF);
    u.v = V0 * R / (hbar * vF); // unit charge absorbed into the sign of V0
    u.mu = m * vF * R / hbar;
    return u;
}

ChannelEnergies channel(const DotParams& p, Complex eps, Branch branch)
{
    validate(p);
    ChannelEnergies ch;
    ch.branch = branch;
    Complex w = eps - p.v;
    ch.eps_i_plus = w + p.mu;
    ch.eps_i_minus = w - p.mu;
    ch.eps_o_plus = eps + p.mu;
    ch.eps_o_minus = eps - p.mu;

    if (p.massless()) {
        ch.p_i = w;
        switch (branch) {
        case Branch::BoundSearch:
            throw BranchError("channel: massless bound search has no energy window (states sit at eps = 0)");
        case Branch::ScatteringReal:
            if (eps.imag() != 0.0 || !(eps.real() > 0.0))
                throw BranchError("channel: massless ScatteringReal requires real eps > 0");
            ch.p_o = eps;
            break;
        case Branch::OutgoingRight:
            if (!(eps.real() > 0.0))
                throw BranchError("channel: OutgoingRight requires Re eps > 0");
            ch.p_o = eps;
            break;
        case Branch::OutgoingLeft:
            if (!(eps.real() < 0.0))
                throw BranchError("channel: OutgoingLeft requires Re eps < 0");
            ch.p_o = -eps;
            break;
        }
        return ch;
    }

    // massive: p_i continued from +sqrt((eps-v)^2 - mu^2) with eps-v > mu
    ch.p_i = std::sqrt(w * w - p.mu * p.mu);

    switch (branch) {
    case Branch::BoundSearch: {
        if (!(std::abs(eps.real()) < p.mu))
            throw BranchError("channel: BoundSearch requires |Re eps| < mu");
        if (std::abs(eps.imag()) > 0.5 * p.mu)
            throw BranchError("channel: BoundSearch sheet only extends near the real axis");
        // decaying branch: p_o = i sqrt(mu^2 - eps^2), Im(p_o) > 0 on the axis
        ch.p_o = Complex(0.0, 1.0) * std::sqrt(p.mu * p.mu - eps * eps);
        break;
    }
    case Branch::ScatteringReal: {
        if (eps.imag() != 0.0 || !(std::abs(eps.real()) >= p.mu))
            throw BranchError("channel: ScatteringReal requires real |eps| >= mu");
        double q2 = eps.real() * eps.real() - p.mu * p.mu;
        ch.p_o = Complex(std::sqrt(q2), 0.0);
        break;
    }
    case Branch::OutgoingRight:
        if (!(eps.real() > 0.0))
            throw BranchError("channel: OutgoingRight requires Re eps > 0");
        ch.p_o = std::sqrt(eps * eps - p.mu * p.mu);
        break;
    case Branch::OutgoingLeft:
        if (!(eps.real() < 0.0))
            throw BranchError("channel: OutgoingLeft requires Re eps < 0");
        ch.p_o = std::sqrt(eps * eps - p.mu * p.mu);
        break;
    }
    return ch;
}

Complex secular_residual(const DotParams& p, Complex eps, Branch branch)
{
    if (p.massless()) {
        double s = (eps.real() >= 0.0) ? 1.0 : -1.0;
        Complex p_i = eps - p.v;
        Complex p_o = s * eps;
        if (std::abs(p_o) == 0.0)
            throw SingularArgument("secular_residual: p_o = 0 (use the capture-depth residuals)");
        return sf::bessel_j(p.ell, p_i) * sf::hankel(sf::Kind::H1, p.ell + 1, p_o)
             - s * sf::bessel_j(p.ell + 1, p_i) * sf::hankel(sf::Kind::H1, p.ell, p_o);
    }
    ChannelEnergies ch = channel(p, eps, branch);
    if (std::abs(ch.p_o) == 0.0)
        throw SingularArgument("secular_residual: p_o = 0 (use critical_residual instead)");
    auto ji = sf::bessel_j_pair(p.ell, ch.p_i);
    auto ho = sf::hankel1_pair(p.ell, ch.p_o);
    return ch.eps_i_plus * ji.lo * ch.p_o * ho.hi
         - ch.eps_o_plus * ho.lo * ch.p_i * ji.hi;
}

Complex secular_residual_scaled(const DotParams& p, Complex eps, Branch branch)
{
    if (p.massless()) {
        double s = (eps.real() >= 0.0) ? 1.0 : -1.0;
        Complex p_i = eps - p.v;
        Complex p_o = s * eps;
        auto ji = sf::bessel_j_pair(p.ell, p_i);
        if (p.ell >= 0) {
            // multiplied through by p_o^{ell+1}
            return ji.lo * scaled_h1(p.ell + 1, p_o)
                 - s * ji.hi * p_o * scaled_h1(p.ell, p_o);
        }
        // ell < 0: H1_ell blows up one power harder; scale by p_o^{-ell}
        double refl_l = (p.ell % 2 == 0) ? 1.0 : -1.0;       // H1_{-n} = (-1)^n H1_n
        double refl_l1 = ((p.ell + 1) % 2 == 0) ? 1.0 : -1.0;
        Complex a_l = refl_l * scaled_h1(-p.ell, p_o);        // p^{-l} H1_l(p)
        Complex a_l1 = refl_l1 * p_o * scaled_h1(-p.ell - 1, p_o); // p^{-l} H1_{l+1}(p)
        return ji.lo * a_l1 - s * ji.hi * a_l;
    }

    // multiplied through by p_o^{ell}: term1 carries p_o^{ell+1} H1_{ell+1},
    // term2 carries p_o^{ell} H1_{ell}; at p_o = 0 this reduces to the
    // critical equation (eps = +mu) or the supercritical one (eps = -mu)
    ChannelEnergies ch = channel(p, eps, branch);
    auto ji = sf::bessel_j_pair(p.ell, ch.p_i);
    if (p.ell == 0 && std::abs(ch.p_o) == 0.0)
        throw SingularArgument("secular_residual_scaled: logarithmic point p_o = 0 at ell = 0");
    Complex term1 = ch.eps_i_plus * ji.lo * scaled_h1(p.ell + 1, ch.p_o);
    Complex a_l = (p.ell == 0) ? sf::hankel(sf::Kind::H1, 0, ch.p_o)
                               : scaled_h1(p.ell, ch.p_o);
    Complex term2 = ch.eps_o_plus * a_l * ch.p_i * ji.hi;
    return term1 - term2;
}

double bound_secular_real(const DotParams& p, double eps)
{
    validate(p);
    if (p.massless())
        throw DomainError("bound_secular_real: massless bound states sit at eps = 0 only");
    if (!(std::abs(eps) < p.mu))
        throw DomainError("bound_secular_real: eps outside the bound window");
    double w = eps - p.v;
    if (!(w > p.mu))
        throw DomainError("bound_secular_real: requires eps - v > mu (no roots elsewhere)");
    double kappa = std::sqrt(p.mu * p.mu - eps * eps);
    double q = std::sqrt(w * w - p.mu * p.mu);
    // K_n(kappa) = (pi/2) i^{n+1} H1_n(i kappa), real and positive
    auto K = [&](int n) {
        Complex h = sf::hankel(sf::Kind::H1, n, Complex(0.0, kappa));
        return (0.5 * kPi * ipow(n + 1) * h).real();
    };
    auto jq = sf::bessel_j_pair(p.ell, Complex(q, 0.0));
    double eip = w + p.mu;
    double eop = eps + p.mu;
    return eip * jq.lo.real() * kappa * K(p.ell + 1)
         - eop * K(p.ell) * q * jq.hi.real();
}

double critical_residual(int ell, double mu, double p_inner)
{
    if (!(p_inner > 0.0))
        throw DomainError("critical_residual: p_inner must be positive");
    if (!(mu > 0.0) || ell < 0)
        throw DomainError("critical_residual: requires mu > 0 and ell >= 0");
    auto j = sf::bessel_j_pair(ell, Complex(p_inner, 0.0));
    return ell * (mu + std::sqrt(mu * mu + p_inner * p_inner)) * j.lo.real()
         - mu * p_inner * j.hi.real();
}

double supercritical_residual(int ell, double p_inner)
{
    if (!(p_inner > 0.0))
        throw DomainError("supercritical_residual: p_inner must be positive");
    return sf::bessel_j(ell, Complex(p_inner, 0.0)).real();
}

double massless_bound_residual(int ell, double p_inner)
{
    if (!(p_inner > 0.0))
        throw DomainError("massless_bound_residual: p_inner must be positive");
    int order = (ell >= 0) ? ell : ell + 1;
    return sf::bessel_j(order, Complex(p_inner, 0.0)).real();
}

double depth_for_root(DepthKind kind, double mu, double p_inner)
{
    if (!(p_inner > 0.0))
        throw DomainError("depth_for_root: p_inner must be positive");
    switch (kind) {
    case DepthKind::Critical:
        if (!(mu > 0.0))
            throw DomainError("depth_for_root: Critical requires mu > 0");
        return mu - std::sqrt(mu * mu + p_inner * p_inner);
    case DepthKind::Supercritical:
        if (!(mu > 0.0))
            throw DomainError("depth_for_root: Supercritical requires mu > 0");
        return -mu - std::sqrt(mu * mu + p_inner * p_inner);
    default:
        if (mu != 0.0)
            throw DomainError("depth_for_root: MasslessBound requires mu = 0");
        return -p_inner;
    }
}

double phase_shift_raw(const DotParams& p, double eps)
{
    validate(p);
    if (p.massless() ? !(eps > 0.0) : !(eps > p.mu))
        throw DomainError("phase_shift_raw: eps must exceed the outer threshold");
    double w = eps - p.v;
    double arg_i2 = w * w - p.mu * p.mu;
    if (!(arg_i2 > 0.0))
        throw DomainError("phase_shift_raw: inner momentum not real (barrier regime unsupported)");
    double p_i = std::sqrt(arg_i2);
    double p_o = p.massless() ? eps : std::sqrt(eps * eps - p.mu * p.mu);
    double eip = w + p.mu;
    double eop = eps + p.mu;

    auto ji = sf::bessel_j_pair(p.ell, Complex(p_i, 0.0));
    auto jo = sf::bessel_j_pair(p.ell, Complex(p_o, 0.0));
    double yo_l = sf::bessel_y(p.ell, Complex(p_o, 0.0)).real();
    double yo_l1 = sf::bessel_y(p.ell + 1, Complex(p_o, 0.0)).real();

    double num = eip * p_o * ji.lo.real() * jo.hi.real()
               - eop * p_i * ji.hi.real() * jo.lo.real();
    double den = eip * p_o * ji.lo.real() * yo_l1
               - eop * p_i * ji.hi.real() * yo_l;
    if (std::abs(num) < 1e-13 && std::abs(den) < 1e-13)
        throw IndeterminatePhase("phase_shift_raw: numerator and denominator both vanish");
    return principal_mod_pi(std::atan2(num, den));
}

std::vector<double> unwrap_phase(const std::vector<double>& raw,
                                 UnwrapConvention convention, double v)
{
    (void)convention; // single convention defined
    if (raw.empty())
        return {};
    for (double r : raw)
        if (!(r > -0.5 * kPi - 1e-9) || !(r <= 0.5 * kPi + 1e-9))
            throw DomainError("unwrap_phase: raw values must lie in the principal interval");

    std::vector<double> u(raw.size());
    double target = principal_mod_pi(-v);
    double n = std::round((target - raw.back()) / kPi);
    u.back() = raw.back() + n * kPi;
    for (std::size_t k = raw.size() - 1; k-- > 0;) {
        double m = std::round((u[k + 1] - raw[k]) / kPi);
        u[k] = raw[k] + m * kPi;
        if (std::abs(u[k] - u[k + 1]) >= 0.5 * kPi * (1.0 - 1e-9))
            throw UnwrapError("unwrap_phase: ambiguous step (grid too coarse)");
    }
    return u;
}

DelayCurve wigner_delay(DelayCurve curve)
{
    const auto& e = curve.energies;
    const auto& u = curve.unwrapped_phase;
    if (e.size() < 3 || u.size() != e.size())
        throw DomainError("wigner_delay: need >= 3 grid points with unwrapped phase");
    for (std::size_t k = 1; k < e.size(); ++k)
        if (!(e[k] > e[k - 1]))
            throw DomainError("wigner_delay: energies must be strictly increasing");

    curve.delay.resize(e.size());
    std::size_t n = e.size();
    curve.delay[0] = 2.0 * (u[1] - u[0]) / (e[1] - e[0]);
    curve.delay[n - 1] = 2.0 * (u[n - 1] - u[n - 2]) / (e[n - 1] - e[n - 2]);
    for (std::size_t k = 1; k + 1 < n; ++k)
        curve.delay[k] = 2.0 * (u[k + 1] - u[k - 1]) / (e[k + 1] - e[k - 1]);
    return curve;
}

ResonancePoint::Class classify(const DotParams& p, Complex eps)
{
    if (p.massless())
        return std::abs(eps) <= 1e-10 ? ResonancePoint::Class::Bound
                                      : ResonancePoint::Class::Resonance;
    if (std::abs(eps.imag()) <= 1e-9) {
        if (std::abs(eps.real() - p.mu) <= 1e-9)
            return ResonancePoint::Class::Critical;
        if (std::abs(eps.real() + p.mu) <= 1e-9)
            return ResonancePoint::Class::Supercritical;
        if (eps.real() > -p.mu && eps.real() < p.mu)
            return ResonancePoint::Class::Bound;
    }
    return ResonancePoint::Class::Resonance;
}

namespace {

// |a - b| <= tol * scale with the scale of the matching terms
void require_match(Complex residual, double scale, const char* what)
{
    if (!(std::abs(residual) <= 1e-6 * (scale + 1e-30)))
        throw MatchError(std::string(what) + ": secular condition violated at the given (params, eps)");
}

} // namespace

RadialSpinor radial_spinor(const DotParams& p, Complex eps, double rho,
                           StateKind kind)
{
    validate(p);
    if (!(rho > 0.0))
        throw DomainError("radial_spinor: rho must be positive");

    RadialSpinor sp;
    sp.rho = rho;
    sp.region = (rho < 1.0) ? Region::Inner : Region::Outer;

    const double mu = p.mu;
    const int ell = p.ell;

    switch (kind) {
    case StateKind::Bound: {
        if (p.massless())
            throw DomainError("radial_spinor: use MasslessBound for mu = 0");
        ChannelEnergies ch = channel(p, eps, Branch::BoundSearch);
        Complex res = secular_residual(p, eps, Branch::BoundSearch);
        auto ji = sf::bessel_j_pair(ell, ch.p_i);
        auto ho = sf::hankel1_pair(ell, ch.p_o);
        double scale = std::abs(ch.eps_i_plus * ji.lo * ch.p_o * ho.hi)
                     + std::abs(ch.eps_o_plus * ho.lo * ch.p_i * ji.hi);
        require_match(res, scale, "radial_spinor(Bound)");
        Complex a_o = ji.lo / ho.lo;
        sp.coeffs.a_o = a_o;
        if (sp.region == Region::Inner) {
            auto jr = sf::bessel_j_pair(ell, ch.p_i * rho);
            sp.phi1 = jr.lo;
            sp.phi2 = ch.p_i / ch.eps_i_plus * jr.hi;
        } else {
            auto hr = sf::hankel1_pair(ell, ch.p_o * rho);
            sp.phi1 = a_o * hr.lo;
            sp.phi2 = a_o * ch.p_o / ch.eps_o_plus * hr.hi;
        }
        break;
    }
    case StateKind::Critical: {
        if (p.massless())
            throw DomainError("radial_spinor: use MasslessBound for mu = 0");
        if (std::abs(eps - Complex(mu, 0.0)) > 1e-9)
            throw MatchError("radial_spinor(Critical): requires eps = mu");
        double p_i = std::sqrt(p.v * p.v - 2.0 * p.v * mu);
        double res = critical_residual(ell, mu, p_i);
        auto jp = sf::bessel_j_pair(ell, Complex(p_i, 0.0));
        // both terms vanish together at an ell = 0 root, so the scale keeps a
        // floor proportional to the coefficient magnitudes
        double scale = std::abs(ell * (mu + std::sqrt(mu * mu + p_i * p_i)) * jp.lo.real())
                     + std::abs(mu * p_i * jp.hi.real()) + 0.1 * mu * p_i;
        require_match(Complex(res, 0.0), scale, "radial_spinor(Critical)");
        double eip = 2.0 * mu - p.v;
        if (sp.region == Region::Inner) {
            auto jr = sf::bessel_j_pair(ell, Complex(p_i * rho, 0.0));
            sp.phi1 = jr.lo;
            sp.phi2 = p_i / eip * jr.hi;
        } else {
            Complex a_o = jp.lo; // phi1 continuity at rho = 1
            sp.coeffs.a_o = a_o;
            sp.phi1 = a_o * std::pow(rho, -double(ell));
            sp.phi2 = a_o * (double(ell) / mu) * std::pow(rho, -double(ell + 1));
        }
        break;
    }
    case StateKind::Supercritical: {
        if (p.massless())
            throw DomainError("radial_spinor: use MasslessBound for mu = 0");
        if (std::abs(eps - Complex(-mu, 0.0)) > 1e-9)
            throw MatchError("radial_spinor(Supercritical): requires eps = -mu");
        if (!(p.v * p.v + 2.0 * p.v * mu > 0.0))
            throw MatchError("radial_spinor(Supercritical): well too shallow for a supercritical state");
        double p_i = std::sqrt(p.v * p.v + 2.0 * p.v * mu);
        auto jp = sf::bessel_j_pair(ell, Complex(p_i, 0.0));
        require_match(jp.lo, 1.0, "radial_spinor(Supercritical)");
        double eip = -p.v;
        if (sp.region == Region::Inner) {
            auto jr = sf::bessel_j_pair(ell, Complex(p_i * rho, 0.0));
            sp.phi1 = jr.lo;
            sp.phi2 = p_i / eip * jr.hi;
        } else {
            Complex a_o = p_i / eip * jp.hi; // phi2 continuity; phi1 = 0 outside
            sp.coeffs.a_o = a_o;
            sp.phi1 = Complex(0.0, 0.0);
            sp.phi2 = a_o * std::pow(rho, -double(ell + 1));
        }
        break;
    }
    case StateKind::Scattering: {
        if (eps.imag() != 0.0)
            throw DomainError("radial_spinor(Scattering): requires real eps");
        double d = phase_shift_raw(p, eps.real());
        double c = std::cos(d), s = std::sin(d);
        ChannelEnergies ch = channel(p, eps, Branch::ScatteringReal);
        auto ji = sf::bessel_j_pair(ell, ch.p_i);
        auto jo = sf::bessel_j_pair(ell, ch.p_o);
        Complex yo_l = sf::bessel_y(ell, ch.p_o);
        Complex yo_l1 = sf::bessel_y(ell + 1, ch.p_o);
        // match on the larger inner component to avoid dividing by a node
        Complex in1 = ji.lo;
        Complex in2 = ch.p_i / ch.eps_i_plus * ji.hi;
        Complex out1 = c * jo.lo - s * yo_l;
        Complex out2 = ch.p_o / ch.eps_o_plus * (c * jo.hi - s * yo_l1);
        Complex a = (std::abs(in1) >= std::abs(in2)) ? in1 / out1 : in2 / out2;
        sp.coeffs.A = a * c;
        sp.coeffs.B = -a * s;
        if (sp.region == Region::Inner) {
            auto jr = sf::bessel_j_pair(ell, ch.p_i * rho);
            sp.phi1 = jr.lo;
            sp.phi2 = ch.p_i / ch.eps_i_plus * jr.hi;
        } else {
            auto jr = sf::bessel_j_pair(ell, ch.p_o * rho);
            Complex yr_l = sf::bessel_y(ell, ch.p_o * rho);
            Complex yr_l1 = sf::bessel_y(ell + 1, ch.p_o * rho);
            sp.phi1 = a * (c * jr.lo - s * yr_l);
            sp.phi2 = a * ch.p_o / ch.eps_o_plus * (c * jr.hi - s * yr_l1);
        }
        break;
    }
    case StateKind::MasslessBound: {
        if (!p.massless())
            throw DomainError("radial_spinor(MasslessBound): requires mu = 0");
        if (std::abs(eps) > 1e-9)
            throw MatchError("radial_spinor(MasslessBound): requires eps = 0");
        double p_i = std::abs(p.v);
        require_match(Complex(massless_bound_residual(ell, p_i), 0.0), 1.0,
                      "radial_spinor(MasslessBound)");
        auto jr = sf::bessel_j_pair(ell, Complex(p_i * rho, 0.0));
        auto j1 = sf::bessel_j_pair(ell, Complex(p_i, 0.0));
        if (sp.region == Region::Inner) {
            sp.phi1 = jr.lo;      // eps_i^+ = -v = p_i, so the ratio is 1
            sp.phi2 = jr.hi;
        } else if (ell >= 0) {
            Complex c2 = j1.hi;   // phi2 continuity; phi1 = 0 outside (J_l(p_i) = 0)
            sp.coeffs.a_o = c2;
            sp.phi1 = Complex(0.0, 0.0);
            sp.phi2 = c2 * std::pow(rho, -double(ell + 1));
        } else {
            Complex c1 = j1.lo;   // phi1 survives; phi2 = 0 outside (J_{l+1}(p_i) = 0)
            sp.coeffs.a_o = c1;
            sp.phi1 = c1 * std::pow(rho, double(ell));
            sp.phi2 = Complex(0.0, 0.0);
        }
        break;
    }
    }
    return sp;
}

} // namespace diracdot::core
