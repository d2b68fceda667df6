#include <doctest.h>

#include "diracdot/core.hpp"
#include "diracdot/errors.hpp"
#include "oracle.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace core = diracdot::core;
namespace sf = diracdot::specfun;
using core::Branch;
using core::DotParams;
using Complex = std::complex<double>;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// test-side bisection, independent of rootfind
double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("to_natural_units")
{
    auto u = core::to_natural_units(0, 0, 1, 0, 1, 1);
    CHECK(u.eps == 0.0);
    CHECK(u.v == 0.0);
    CHECK(u.mu == 0.0);

    u = core::to_natural_units(2, -3, 1, 2, 1, 1);
    CHECK(u.eps == doctest::Approx(2.0));
    CHECK(u.v == doctest::Approx(-3.0));
    CHECK(u.mu == doctest::Approx(2.0));

    auto u1 = core::to_natural_units(1.5, -2.5, 1.0, 0.5, 1.0, 1.0);
    auto u2 = core::to_natural_units(1.5, -2.5, 2.0, 0.5, 1.0, 1.0);
    CHECK(u2.eps == doctest::Approx(2.0 * u1.eps));
    CHECK(u2.v == doctest::Approx(2.0 * u1.v));
    CHECK(u2.mu == doctest::Approx(2.0 * u1.mu));

    CHECK_THROWS_AS((void)core::to_natural_units(1, 1, 0, 1, 1, 1), diracdot::DomainError);
}

TEST_CASE("channel branch rules")
{
    {
        auto ch = core::channel({2.0, 0.0, 0}, {0.0, 0.0}, Branch::BoundSearch);
        CHECK(std::abs(ch.p_o - Complex(0.0, 2.0)) < 1e-14);
        CHECK(std::abs(ch.p_i - Complex(0.0, 2.0)) < 1e-14);
    }
    {
        auto ch = core::channel({2.0, -3.0, 0}, {2.0, 0.0}, Branch::ScatteringReal);
        CHECK(std::abs(ch.p_o) < 1e-14);
        CHECK(std::abs(ch.p_i - std::sqrt(21.0)) < 1e-13);
    }
    {
        auto ch = core::channel({0.0, -4.0, 2}, {1.0, 0.0}, Branch::ScatteringReal);
        CHECK(std::abs(ch.p_i - 5.0) < 1e-14);
        CHECK(std::abs(ch.p_o - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS((void)core::channel({2, -1, 0}, {3.0, 0.0}, Branch::BoundSearch),
                    diracdot::BranchError);
    CHECK_THROWS_AS((void)core::channel({2, -1, 0}, {-1.0, 0.0}, Branch::OutgoingRight),
                    diracdot::BranchError);
    CHECK_THROWS_AS((void)core::channel({2, -1, 0}, {1.0, 0.0}, Branch::ScatteringReal),
                    diracdot::BranchError);
}

TEST_CASE("momentum consistency across branches")
{
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> re(-6.0, 6.0), im(-2.0, 0.0);
    for (int t = 0; t < 200; ++t) {
        DotParams p{2.0, -5.0, 1};
        Complex e(re(rng), im(rng));
        Branch br = e.real() >= 0 ? Branch::OutgoingRight : Branch::OutgoingLeft;
        if (e.real() == 0.0)
            continue;
        auto ch = core::channel(p, e, br);
        Complex w = e - p.v;
        CHECK(std::abs(ch.p_i * ch.p_i - (w * w - p.mu * p.mu)) < 1e-12);
        CHECK(std::abs(ch.p_o * ch.p_o - (e * e - p.mu * p.mu)) < 1e-12);
        CHECK(std::abs(ch.eps_i_plus - ch.eps_i_minus - 2.0 * p.mu) < 1e-14);
        CHECK(std::abs(ch.eps_o_plus - ch.eps_o_minus - 2.0 * p.mu) < 1e-14);
    }
}

TEST_CASE("secular residual: bound roots")
{
    // mu=2, ell=0, v=-1: exactly one real root in (-2, 2)
    DotParams p{2.0, -1.0, 0};
    auto f = [&](double e) { return core::bound_secular_real(p, e); };
    double lo = std::max(-p.mu, p.v + p.mu) + 1e-9; // roots need eps - v > mu
    int crossings = 0;
    double root = 0;
    double prev = f(lo);
    const int n = 2000;
    for (int i = 1; i <= n; ++i) {
        double x = lo + (2.0 - 1e-9 - lo) * double(i) / n;
        double cur = f(x);
        if (prev * cur < 0) {
            ++crossings;
            root = bisect(f, x - (2.0 - 1e-9 - lo) / n, x);
        }
        prev = cur;
    }
    CHECK(crossings == 1);
    CHECK(root == doctest::Approx(1.5800108264247817).epsilon(1e-10));

    // the complex BoundSearch residual vanishes there too
    Complex res = core::secular_residual(p, {root, 0.0}, Branch::BoundSearch);
    CHECK(std::abs(res) < 1e-9);

    // residual crosses zero as v passes the second ell=2 capture depth
    double before = core::critical_residual(2, 2.0, std::sqrt(5.80 * 5.80 + 2 * 5.80 * 2.0));
    double after = core::critical_residual(2, 2.0, std::sqrt(5.90 * 5.90 + 2 * 5.90 * 2.0));
    CHECK(before * after < 0.0);
}

TEST_CASE("secular residual: massless complex root near the axis")
{
    DotParams p{0.0, -4.0, 2};
    // Muller-style test oracle: damped fixed-point on the scaled residual,
    // seeded near the Fig. 6 strong resonance
    Complex e(0.87, -0.01);
    for (int it = 0; it < 60; ++it) {
        Complex h(1e-7, 0.0);
        Complex fe = core::secular_residual_scaled(p, e, Branch::OutgoingRight);
        Complex df = (core::secular_residual_scaled(p, e + h, Branch::OutgoingRight)
                      - core::secular_residual_scaled(p, e - h, Branch::OutgoingRight))
                     / (2.0 * h);
        e -= fe / df;
    }
    CHECK(std::abs(core::secular_residual_scaled(p, e, Branch::OutgoingRight)) < 1e-10);
    CHECK(e.real() == doctest::Approx(0.8674).epsilon(1e-2));
    CHECK(e.imag() < 0.0);
    CHECK(std::abs(e.imag()) < 0.02);

    // the unscaled massless residual vanishes at the same point
    CHECK(std::abs(core::secular_residual(p, e, Branch::OutgoingRight))
          < 1e-7 * std::abs(sf::hankel(sf::Kind::H1, 3, 0.8674)));
}

TEST_CASE("capture-depth residuals and closed-form depths")
{
    // ell = 0 annihilates the left side: roots at zeros of J_1
    double j11 = oracle::j_zero(1, 1);
    CHECK(std::abs(core::critical_residual(0, 2.0, j11)) < 1e-10);
    CHECK(core::critical_residual(0, 2.0, 1.0) < 0.0); // -mu p J_1(p) < 0 below the zero

    // supercritical: first J_0 zero -> v = -2 - sqrt(4 + p^2)
    double j01 = oracle::j_zero(0, 1);
    CHECK(core::depth_for_root(core::DepthKind::Supercritical, 2.0, j01)
          == doctest::Approx(-5.1278084920510694).epsilon(1e-12));

    double j21 = oracle::j_zero(2, 1);
    CHECK(std::abs(core::supercritical_residual(2, j21)) < 1e-12);
    CHECK(core::depth_for_root(core::DepthKind::Supercritical, 2.0, j21)
          == doctest::Approx(-7.511317122717889).epsilon(1e-12));

    // massless: v = -p at the J_ell zeros; ell = -1 shares the ell = 0 roots
    CHECK(core::depth_for_root(core::DepthKind::MasslessBound, 0.0, j21)
          == doctest::Approx(-5.1356223018406826));
    CHECK(std::abs(core::massless_bound_residual(2, j21)) < 1e-12);
    CHECK(std::abs(core::massless_bound_residual(0, j01)) < 1e-12);
    CHECK(core::massless_bound_residual(-1, 1.7)
          == doctest::Approx(core::massless_bound_residual(0, 1.7)));

    // critical depth tends to zero from below as p -> 0+
    double v0 = core::depth_for_root(core::DepthKind::Critical, 2.0, 1e-4);
    CHECK(v0 < 0.0);
    CHECK(v0 > -1e-8);

    CHECK_THROWS_AS((void)core::depth_for_root(core::DepthKind::MasslessBound, 2.0, 1.0),
                    diracdot::DomainError);
    CHECK_THROWS_AS((void)core::depth_for_root(core::DepthKind::Critical, 0.0, 1.0),
                    diracdot::DomainError);
}

TEST_CASE("phase shift raw")
{
    // no potential, no phase
    for (double e : {2.1, 3.0, 7.7})
        CHECK(std::abs(core::phase_shift_raw({2.0, 0.0, 1}, e)) < 1e-12);

    // smooth curve just above threshold before trapping (Fig. 2c): on a
    // dense grid the continuous branch moves gently, with no Levinson step
    {
        DotParams p{2.0, -2.0, 2};
        std::vector<double> raw;
        std::vector<double> grid;
        for (int i = 0; i <= 1000; ++i) {
            grid.push_back(2.001 + 0.6 * i / 1000.0);
            raw.push_back(core::phase_shift_raw(p, grid.back()));
        }
        auto u = core::unwrap_phase(raw, core::UnwrapConvention::AnchorHighEnergy, p.v);
        for (std::size_t i = 1; i < u.size(); ++i)
            CHECK(std::abs(u[i] - u[i - 1]) < 0.5);
    }

    // high-energy limit tan(delta) -> -tan(v)
    for (double v : {-1.0, -2.0, -3.5}) {
        DotParams q{2.0, v, 0};
        double d = core::phase_shift_raw(q, 1000.0);
        CHECK(std::abs(std::tan(d) + std::tan(v)) < 5e-2);
    }

    CHECK_THROWS_AS((void)core::phase_shift_raw({2.0, -1.0, 0}, 1.5), diracdot::DomainError);
}

TEST_CASE("unwrap phase")
{
    std::vector<double> flat(10, 0.3);
    auto u = core::unwrap_phase(flat, core::UnwrapConvention::AnchorHighEnergy, -0.3);
    CHECK(u == flat);

    // sawtooth produced by folding a linearly rising phase
    std::vector<double> raw;
    const int n = 60;
    for (int i = 0; i < n; ++i) {
        double truth = -1.0 + 4.0 * i / (n - 1);
        double folded = std::fmod(truth + 0.5 * kPi, kPi);
        if (folded <= 0)
            folded += kPi;
        raw.push_back(folded - 0.5 * kPi);
    }
    auto un = core::unwrap_phase(raw, core::UnwrapConvention::AnchorHighEnergy, -3.0);
    for (int i = 1; i < n; ++i)
        CHECK(std::abs(un[size_t(i)] - un[size_t(i) - 1] - 4.0 / (n - 1)) < 1e-9);

    // anchor: top sample sits within pi/2 of the principal value of -v
    double dtop = un.back();
    double target = std::atan(std::tan(3.0));
    CHECK(std::abs(dtop - target) <= 0.5 * kPi + 1e-9);

    // ambiguous step (exactly pi/2) is an error
    std::vector<double> coarse{0.0, 0.5 * kPi};
    CHECK_THROWS_AS(
        (void)core::unwrap_phase(coarse, core::UnwrapConvention::AnchorHighEnergy, -0.5 * kPi),
        diracdot::UnwrapError);
}

TEST_CASE("wigner delay")
{
    core::DelayCurve c;
    const int n = 21;
    for (int i = 0; i < n; ++i) {
        c.energies.push_back(1.0 + 0.1 * i);
        c.unwrapped_phase.push_back(0.7 * (1.0 + 0.1 * i)); // delta = 0.7 eps
    }
    c.raw_phase = c.unwrapped_phase;
    auto out = core::wigner_delay(c);
    for (double tau : out.delay)
        CHECK(tau == doctest::Approx(1.4).epsilon(1e-10));

    core::DelayCurve bad = c;
    bad.energies[3] = bad.energies[2];
    CHECK_THROWS_AS((void)core::wigner_delay(bad), diracdot::DomainError);
}

TEST_CASE("radial spinor: closed-form outer states")
{
    // supercritical: outer upper component is identically zero
    double v_sc = -7.511317122717889;
    auto sp = core::radial_spinor({2.0, v_sc, 2}, {-2.0, 0.0}, 2.0,
                                  core::StateKind::Supercritical);
    CHECK(sp.phi1 == Complex(0.0, 0.0));
    CHECK(std::abs(sp.phi2) > 0.0);
    CHECK(sp.region == core::Region::Outer);

    // critical ell = 0: outer lower component vanishes, phi1 constant
    // (quasi-bound, not square integrable)
    double j11 = oracle::j_zero(1, 1);
    double v_c0 = core::depth_for_root(core::DepthKind::Critical, 2.0, j11);
    auto c1 = core::radial_spinor({2.0, v_c0, 0}, {2.0, 0.0}, 1.5, core::StateKind::Critical);
    auto c2 = core::radial_spinor({2.0, v_c0, 0}, {2.0, 0.0}, 3.0, core::StateKind::Critical);
    CHECK(std::abs(c1.phi2) < 1e-14);
    CHECK(std::abs(c2.phi2) < 1e-14);
    CHECK(std::abs(c1.phi1 - c2.phi1) < 1e-12); // rho^0

    // massless bound ell = 2: |phi2| ~ rho^-3 -> square integrable
    double j21 = oracle::j_zero(2, 1);
    auto m1 = core::radial_spinor({0.0, -j21, 2}, {0.0, 0.0}, 2.0,
                                  core::StateKind::MasslessBound);
    auto m2 = core::radial_spinor({0.0, -j21, 2}, {0.0, 0.0}, 4.0,
                                  core::StateKind::MasslessBound);
    CHECK(std::abs(m1.phi1) == 0.0);
    CHECK(std::abs(m2.phi2 / m1.phi2) == doctest::Approx(std::pow(2.0, -3.0)).epsilon(1e-12));

    // wrong eps for the state kind
    CHECK_THROWS_AS((void)core::radial_spinor({2.0, v_sc, 2}, {1.0, 0.0}, 2.0,
                                              core::StateKind::Supercritical),
                    diracdot::MatchError);
    // v not at a capture depth
    CHECK_THROWS_AS((void)core::radial_spinor({2.0, -3.0, 2}, {2.0, 0.0}, 2.0,
                                              core::StateKind::Critical),
                    diracdot::MatchError);
}

TEST_CASE("radial spinor: continuity at the junction")
{
    // bound state of the mu=2, ell=0, v=-1 well
    DotParams p{2.0, -1.0, 0};
    double eps = 1.5800108264247817;
    auto in = core::radial_spinor(p, {eps, 0.0}, 1.0 - 1e-12, core::StateKind::Bound);
    auto out = core::radial_spinor(p, {eps, 0.0}, 1.0 + 1e-12, core::StateKind::Bound);
    CHECK(std::abs(in.phi1 - out.phi1) < 1e-8);
    CHECK(std::abs(in.phi2 - out.phi2) < 1e-8);

    // scattering state continuity at an arbitrary energy
    auto sin_ = core::radial_spinor(p, {3.3, 0.0}, 1.0 - 1e-12, core::StateKind::Scattering);
    auto sout = core::radial_spinor(p, {3.3, 0.0}, 1.0 + 1e-12, core::StateKind::Scattering);
    CHECK(std::abs(sin_.phi1 - sout.phi1) < 1e-8);
    CHECK(std::abs(sin_.phi2 - sout.phi2) < 1e-8);

    // supercritical and massless-bound junctions
    auto a = core::radial_spinor({2.0, -7.511317122717889, 2}, {-2.0, 0.0}, 1.0 - 1e-12,
                                 core::StateKind::Supercritical);
    auto b = core::radial_spinor({2.0, -7.511317122717889, 2}, {-2.0, 0.0}, 1.0 + 1e-12,
                                 core::StateKind::Supercritical);
    CHECK(std::abs(a.phi1 - b.phi1) < 1e-8);
    CHECK(std::abs(a.phi2 - b.phi2) < 1e-8);
}

TEST_CASE("secular/phase compatibility: numerator zero means pure J wave")
{
    // at a real eps where the phase numerator vanishes, B = 0 and the
    // scattering solution matches with a pure J wave outside
    DotParams p{2.0, -3.5, 2}; // numerator crosses zero near eps = 3.72
    auto numerator = [&](double e) {
        auto ch = core::channel(p, {e, 0.0}, Branch::ScatteringReal);
        auto ji = sf::bessel_j_pair(p.ell, ch.p_i);
        auto jo = sf::bessel_j_pair(p.ell, ch.p_o);
        return (ch.eps_i_plus * ch.p_o * ji.lo * jo.hi
                - ch.eps_o_plus * ch.p_i * ji.hi * jo.lo)
            .real();
    };
    double lo = 2.2, hi = 6.0, flo = numerator(lo);
    double estar = 0.0;
    bool found = false;
    for (int i = 1; i <= 400 && !found; ++i) {
        double x = lo + (hi - lo) * i / 400.0;
        double fx = numerator(x);
        if (flo * fx < 0) {
            estar = bisect(numerator, x - (hi - lo) / 400.0, x);
            found = true;
        }
        flo = fx;
    }
    REQUIRE(found);
    CHECK(std::abs(core::phase_shift_raw(p, estar)) < 1e-7);
    auto sp = core::radial_spinor(p, {estar, 0.0}, 1.5, core::StateKind::Scattering);
    CHECK(std::abs(sp.coeffs.B) <= 1e-9 * std::abs(sp.coeffs.A));
}

TEST_CASE("classification invariants")
{
    DotParams p{2.0, -5.0, 0};
    using C = core::ResonancePoint::Class;
    CHECK(core::classify(p, {1.0, 0.0}) == C::Bound);
    CHECK(core::classify(p, {2.0, 0.0}) == C::Critical);
    CHECK(core::classify(p, {-2.0, 0.0}) == C::Supercritical);
    CHECK(core::classify(p, {2.5, -0.3}) == C::Resonance);
    CHECK(core::classify(p, {1.0, -0.1}) == C::Resonance);

    DotParams m{0.0, -4.0, 2};
    CHECK(core::classify(m, {0.0, 0.0}) == C::Bound);
    CHECK(core::classify(m, {1e-11, 0.0}) == C::Bound);
    CHECK(core::classify(m, {0.5, 0.0}) == C::Resonance);

    CHECK_THROWS_AS(core::validate({-1.0, -1.0, 0}), diracdot::DomainError);
    CHECK_THROWS_AS(core::validate({2.0, -1.0, -1}), diracdot::DomainError);
    CHECK_NOTHROW(core::validate({0.0, -1.0, -3}));
}
