#include <doctest.h>

#include "diracdot/core.hpp"
#include "diracdot/errors.hpp"
#include "diracdot/rootfind.hpp"
#include "diracdot/specfun.hpp"
#include "oracle.hpp"

#include <cmath>
#include <complex>

namespace rf = diracdot::rootfind;
namespace core = diracdot::core;
using Complex = std::complex<double>;

TEST_CASE("bracket_roots basics")
{
    auto id = [](double x) { return x; };
    auto br = rf::bracket_roots(id, -1.0, 1.0, 4);
    REQUIRE(br.size() == 1);
    CHECK(br[0].lo <= 0.0);
    CHECK(br[0].hi >= 0.0);

    auto j0 = [](double x) {
        return diracdot::specfun::bessel_j(0, {x, 0.0}).real();
    };
    auto zeros = rf::bracket_roots(j0, 1.0, 10.0, 64);
    REQUIRE(zeros.size() == 3);
    double z1 = oracle::j_zero(0, 1); // 2.404825...
    double z2 = oracle::j_zero(0, 2); // 5.520078...
    CHECK(z1 == doctest::Approx(2.4048255576957728).epsilon(1e-12));
    CHECK(z2 == doctest::Approx(5.5200781102863106).epsilon(1e-12));
    CHECK((zeros[0].lo < z1 && z1 < zeros[0].hi));
    CHECK((zeros[1].lo < z2 && z2 < zeros[1].hi));

    auto flat = [](double) { return 1.0; };
    CHECK(rf::bracket_roots(flat, 0.0, 1.0, 16).empty());

    auto bad = [](double) -> double { throw std::runtime_error("boom"); };
    CHECK_THROWS_AS((void)rf::bracket_roots(bad, 0.0, 1.0, 4), diracdot::EvaluationError);
}

TEST_CASE("refine_root")
{
    auto f = [](double x) { return x * x - 2.0; };
    rf::Bracket b{1.0, 2.0, f(1.0), f(2.0)};
    double r = rf::refine_root(f, b, 1e-12);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));

    // first positive root of J_2 through the supercritical residual
    auto g = [](double p) { return core::supercritical_residual(2, p); };
    auto br = rf::bracket_roots(g, 0.5, 7.0, 64);
    REQUIRE(!br.empty());
    double p1 = rf::refine_root(g, br[0], 1e-12);
    CHECK(p1 == doctest::Approx(5.1356223018406826).epsilon(1e-10));

    // first critical root for ell = 2, mu = 2 maps to the capture depth
    auto c = [](double p) { return core::critical_residual(2, 2.0, p); };
    auto cb = rf::bracket_roots(c, 1e-6, 6.0, 128);
    REQUIRE(!cb.empty());
    double pc = rf::refine_root(c, cb[0], 1e-12);
    double v = core::depth_for_root(core::DepthKind::Critical, 2.0, pc);
    CHECK(v == doctest::Approx(-2.7558130026273314).epsilon(1e-9));
    CHECK(std::trunc(v * 100.0) / 100.0 == doctest::Approx(-2.75));

    CHECK_THROWS_AS((void)rf::refine_root(f, rf::Bracket{1.0, 2.0, 1.0, 2.0}, 1e-12),
                    diracdot::DomainError);
}

TEST_CASE("complex_root")
{
    auto f = [](Complex z) { return z * z + 1.0; };
    Complex r = rf::complex_root(f, {0.5, 0.8});
    CHECK(std::abs(r - Complex(0.0, 1.0)) < 1e-9);

    // massive critical capture: at the exact depth the outgoing root sits at
    // eps = mu on the real axis
    core::DotParams p{2.0, -2.7558130026273314, 2};
    auto sec = [&](Complex e) {
        core::Branch br = (std::abs(e.real()) < p.mu && std::abs(e.imag()) < 0.2)
                              ? core::Branch::BoundSearch
                              : core::Branch::OutgoingRight;
        return core::secular_residual_scaled(p, e, br);
    };
    Complex cap = rf::complex_root(sec, {2.05, -0.02});
    CHECK(std::abs(cap - Complex(2.0, 0.0)) < 1e-6);

    // massless leading resonance at v = -4 sits near the delay-curve peak
    core::DotParams m0{0.0, -4.0, 2};
    auto sec0 = [&](Complex e) {
        return core::secular_residual_scaled(
            m0, e, e.real() >= 0 ? core::Branch::OutgoingRight : core::Branch::OutgoingLeft);
    };
    Complex lead = rf::complex_root(sec0, {0.9, -0.02});
    CHECK(lead.real() == doctest::Approx(0.8674).epsilon(2e-3));
    CHECK(std::abs(lead.imag()) < 0.02);

    rf::ComplexRootOptions opts;
    opts.escape_radius = 2.0;
    auto runaway = [](Complex z) { return std::exp(-z) - 1e10; };
    CHECK_THROWS_AS((void)rf::complex_root(runaway, {0.0, 0.0}, opts),
                    diracdot::EscapedRegion);
}

TEST_CASE("track")
{
    auto constant = [](double, Complex e) { return e - 1.0; };
    std::vector<double> grid{0.0, -0.5, -1.0, -1.5};
    auto pts = rf::track(constant, grid, {1.0, 0.0});
    REQUIRE(pts.size() == 4);
    for (const auto& q : pts) {
        CHECK(std::abs(q.root - 1.0) < 1e-10);
        CHECK(q.residual <= 1e-9);
        CHECK(q.step_accepted);
    }

    // identical inputs, identical outputs
    auto pts2 = rf::track(constant, grid, {1.0, 0.0});
    for (std::size_t k = 0; k < pts.size(); ++k)
        CHECK(pts[k].root == pts2[k].root);

    // a family whose root teleports by more than the jump cap must lose
    auto jumpy = [](double v, Complex e) { return e - (v < -0.75 ? 10.0 : 0.0); };
    CHECK_THROWS_AS((void)rf::track(jumpy, grid, {0.0, 0.0}), diracdot::TrackLost);

    std::vector<double> not_monotone{0.0, 1.0, 0.5};
    CHECK_THROWS_AS((void)rf::track(constant, not_monotone, {1.0, 0.0}),
                    diracdot::DomainError);
}
