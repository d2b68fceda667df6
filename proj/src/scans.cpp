#include "diracdot/scans.hpp"
#include "diracdot/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace diracdot::scans {

namespace rf = diracdot::rootfind;

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kEventTol = 1e-6;

// Sheet-aware scaled residual: bound sheet inside the window near the real
// axis, outgoing continuation elsewhere.  The two sheets meet at the branch
// points eps = +/-mu, so a root trajectory can cross between them.
Complex tracking_residual(const core::DotParams& p, Complex eps)
{
    if (!p.massless() && std::abs(eps.real()) < p.mu
        && std::abs(eps.imag()) < 0.1 * (1.0 + p.mu)) {
        return core::secular_residual_scaled(p, eps, core::Branch::BoundSearch);
    }
    core::Branch br = (eps.real() >= 0.0) ? core::Branch::OutgoingRight
                                          : core::Branch::OutgoingLeft;
    if (eps.real() == 0.0)
        eps = Complex(1e-300, eps.imag()); // keep Re > 0 for the branch guard
    return core::secular_residual_scaled(p, eps, br);
}

// p_i = 0 solves the secular equation trivially for ell >= 1 without being a
// state; same for the p_o branch points when they are not genuine captures.
bool trivial_root(const core::DotParams& p, Complex eps)
{
    Complex w = eps - p.v;
    Complex pi2 = w * w - p.mu * p.mu;
    return std::abs(pi2) < 1e-6;
}

} // namespace

std::vector<double> residual_roots(core::DepthKind kind, double mu, int ell,
                                   double p_max)
{
    if (!(p_max > 0.0))
        return {};
    auto f = [&](double x) {
        switch (kind) {
        case core::DepthKind::Critical:
            return core::critical_residual(ell, mu, x);
        case core::DepthKind::Supercritical:
            return core::supercritical_residual(ell, x);
        default:
            return core::massless_bound_residual(ell, x);
        }
    };
    int subdivisions = std::max(64, int(p_max * 8.0));
    auto brackets = rf::bracket_roots(f, 1e-9, p_max, subdivisions);
    std::vector<double> roots;
    roots.reserve(brackets.size());
    for (const auto& b : brackets)
        roots.push_back(rf::refine_root(f, b, 1e-12));
    return roots;
}

std::vector<CaptureDepth> capture_depths(double mu, int ell, int count)
{
    if (count < 1)
        throw DomainError("capture_depths: count must be >= 1");
    core::validate({mu, -1.0, ell});

    std::vector<CaptureDepth> out;
    auto take = [&](core::DepthKind kind) {
        // grow the p window until `count` roots are available
        double p_max = 8.0 + 3.5 * std::abs(ell);
        std::vector<double> roots;
        for (int attempt = 0; attempt < 8; ++attempt) {
            roots = residual_roots(kind, mu, ell, p_max);
            if (int(roots.size()) >= count)
                break;
            p_max *= 1.8;
        }
        if (int(roots.size()) < count)
            throw NoConvergence("capture_depths: could not locate the requested number of roots");
        for (int i = 0; i < count; ++i)
            out.push_back({core::depth_for_root(kind, mu, roots[size_t(i)]), kind});
    };

    if (mu == 0.0) {
        take(core::DepthKind::MasslessBound);
    } else {
        take(core::DepthKind::Critical);
        take(core::DepthKind::Supercritical);
    }
    std::sort(out.begin(), out.end(),
              [](const CaptureDepth& a, const CaptureDepth& b) { return a.v > b.v; });
    return out;
}

SpectrumResult bound_spectrum(double mu, int ell, double v_lo, double v_hi,
                              int v_steps)
{
    if (!(mu > 0.0))
        throw DomainError("bound_spectrum: requires mu > 0");
    if (!(v_lo < v_hi) || !(v_hi < 0.0))
        throw DomainError("bound_spectrum: requires v_lo < v_hi < 0");
    if (v_steps < 10)
        throw DomainError("bound_spectrum: v_steps must be >= 10");
    core::validate({mu, v_hi, ell});

    SpectrumResult res;
    res.mu = mu;
    res.ell = ell;

    // capture depth lists up to the deepest scanned well
    {
        double pc = (mu - v_lo) * (mu - v_lo) - mu * mu;
        for (double r : residual_roots(core::DepthKind::Critical, mu, ell,
                                       pc > 0.0 ? std::sqrt(pc) : 0.0))
            res.critical_depths.push_back(core::depth_for_root(core::DepthKind::Critical, mu, r));
        double ps = (mu + v_lo) * (mu + v_lo) - mu * mu; // -mu - v_lo >= mu needed
        if (-mu - v_lo >= mu)
            for (double r : residual_roots(core::DepthKind::Supercritical, mu, ell, std::sqrt(ps)))
                res.supercritical_depths.push_back(core::depth_for_root(core::DepthKind::Supercritical, mu, r));
    }

    const double margin = 1e-9;
    for (int i = 0; i <= v_steps; ++i) {
        double v = v_lo + (v_hi - v_lo) * double(i) / double(v_steps);
        core::DotParams params{mu, v, ell};
        // roots only exist where eps - v > mu
        double lo = std::max(-mu, v + mu) + margin;
        double hi = mu - margin;
        if (!(lo < hi))
            continue;
        std::vector<double> roots;
        try {
            auto f = [&](double e) { return core::bound_secular_real(params, e); };
            auto brackets = rf::bracket_roots(f, lo, hi, 2000);
            for (const auto& b : brackets) {
                double r = rf::refine_root(f, b, 1e-12);
                // post-pass: the complex residual must confirm the root
                Complex chk = core::secular_residual(params, Complex(r, 0.0),
                                                     core::Branch::BoundSearch);
                if (std::abs(chk) <= 1e-9)
                    roots.push_back(r);
                else
                    res.gaps.push_back(v);
            }
        } catch (const Error&) {
            res.gaps.push_back(v);
            continue;
        }

        // stitch into branches: nearest open branch within the jump cap
        std::vector<bool> used(roots.size(), false);
        for (auto& br : res.branches) {
            if (br.v_grid.empty())
                continue;
            // only extend branches that reached the previous grid point
            double v_prev = v_lo + (v_hi - v_lo) * double(i - 1) / double(v_steps);
            if (std::abs(br.v_grid.back() - v_prev) > 1e-12)
                continue;
            double last = br.eps.back();
            int best = -1;
            // stitch jump cap: 0.1 at the default grid spacing, opened up
            // proportionally on coarser grids (branch slopes stay near 1)
            double dv = (v_hi - v_lo) / double(v_steps);
            double best_d = std::max(0.1, 1.5 * dv);
            for (std::size_t k = 0; k < roots.size(); ++k) {
                if (used[k])
                    continue;
                double d = std::abs(roots[k] - last);
                if (d < best_d) {
                    best_d = d;
                    best = int(k);
                }
            }
            if (best >= 0) {
                br.v_grid.push_back(v);
                br.eps.push_back(roots[size_t(best)]);
                used[size_t(best)] = true;
            }
        }
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (!used[k])
                res.branches.push_back({{v}, {roots[k]}});
        }
    }
    return res;
}

std::vector<Complex> hunt_resonances(double mu, int ell, double v)
{
    core::DotParams params{mu, v, ell};
    core::validate(params);

    const double re_max = std::abs(v) + mu;
    const int nr = 220, ni = 80;
    std::vector<double> mag(size_t(nr) * size_t(ni),
                            std::numeric_limits<double>::infinity());
    auto at = [&](int i, int j) -> double& { return mag[size_t(i) * nr + size_t(j)]; };

    std::vector<double> xs(nr), ys(ni);
    for (int j = 0; j < nr; ++j)
        xs[size_t(j)] = -re_max + 2.0 * re_max * double(j) / double(nr - 1);
    for (int i = 0; i < ni; ++i)
        ys[size_t(i)] = -3.0 + (3.0 - 1e-4) * double(i) / double(ni - 1);

    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nr; ++j) {
            Complex e(xs[size_t(j)], ys[size_t(i)]);
            try {
                at(i, j) = std::abs(tracking_residual(params, e));
            } catch (const Error&) {
            }
        }

    std::vector<Complex> seeds;
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nr; ++j) {
            double w = at(i, j);
            if (!std::isfinite(w))
                continue;
            bool is_min = true;
            if (i > 0 && at(i - 1, j) <= w) is_min = false;
            if (i < ni - 1 && at(i + 1, j) <= w) is_min = false;
            if (j > 0 && at(i, j - 1) <= w) is_min = false;
            if (j < nr - 1 && at(i, j + 1) <= w) is_min = false;
            if (is_min)
                seeds.emplace_back(xs[size_t(j)], ys[size_t(i)]);
        }

    std::vector<Complex> roots;
    for (Complex s : seeds) {
        rf::ComplexRootOptions opts;
        opts.tol = kResidualTol;
        opts.escape_radius = 10.0 * (std::abs(s) + mu + std::abs(v));
        try {
            Complex r = rf::complex_root(
                [&](Complex e) { return tracking_residual(params, e); }, s, opts);
            if (r.imag() > 1e-9)
                continue; // hunts stay in the lower half plane
            if (trivial_root(params, r))
                continue;
            bool dup = false;
            for (Complex q : roots)
                if (std::abs(q - r) < 1e-6)
                    dup = true;
            if (!dup)
                roots.push_back(r);
        } catch (const Error&) {
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (std::abs(a.imag()) != std::abs(b.imag()))
            return std::abs(a.imag()) < std::abs(b.imag());
        return a.real() < b.real();
    });
    return roots;
}

namespace {

// refine a capture event inside [v_a, v_b] (unordered) against the matching
// residual roots; falls back to the grid value when no root lands inside
double refine_event(core::DepthKind kind, double mu, int ell, double v_a,
                    double v_b, double fallback)
{
    double lo = std::min(v_a, v_b), hi = std::max(v_a, v_b);
    double depth_edge = std::min(lo, -1e-3);
    double p2;
    switch (kind) {
    case core::DepthKind::Critical:
        p2 = (mu - depth_edge) * (mu - depth_edge) - mu * mu;
        break;
    case core::DepthKind::Supercritical:
        p2 = (mu + depth_edge) * (mu + depth_edge) - mu * mu;
        break;
    default:
        p2 = depth_edge * depth_edge;
        break;
    }
    if (!(p2 > 0.0))
        return fallback;
    for (double r : residual_roots(kind, mu, ell, std::sqrt(p2) + 1.0)) {
        double v = core::depth_for_root(kind, mu, r);
        if (v >= lo - 1e-9 && v <= hi + 1e-9)
            return v;
    }
    return fallback;
}

} // namespace

std::vector<ResonanceTrajectory>
resonance_trajectories(double mu, int ell, const std::vector<double>& v_grid,
                       const std::vector<Complex>& seeds)
{
    core::validate({mu, v_grid.empty() ? -1.0 : v_grid.front(), ell});
    if (v_grid.size() < 2)
        throw DomainError("resonance_trajectories: v_grid needs >= 2 points");

    std::vector<ResonanceTrajectory> out;
    for (Complex seed : seeds) {
        ResonanceTrajectory tr;
        tr.mu = mu;
        tr.ell = ell;

        auto family = [&](double v, Complex e) {
            return tracking_residual({mu, v, ell}, e);
        };

        std::vector<rf::TrackedRoot> pts;
        try {
            pts = rf::track(family, v_grid, seed);
        } catch (const TrackLost& lost) {
            tr.lost = true;
            tr.lost_at = v_grid[std::min(lost.last_good_index + 1, v_grid.size() - 1)];
            // keep the portion tracked so far by re-running up to the loss
            if (lost.last_good_index >= 1) {
                std::vector<double> partial(v_grid.begin(),
                                            v_grid.begin() + long(lost.last_good_index) + 1);
                try {
                    pts = rf::track(family, partial, seed);
                } catch (const TrackLost&) {
                    pts.clear();
                }
            }
        }

        for (const auto& q : pts) {
            core::ResonancePoint rp;
            rp.v = q.param_value;
            rp.eps = q.root;
            rp.residual = q.residual;
            rp.classification = core::classify({mu, q.param_value, ell}, q.root);
            tr.points.push_back(rp);
        }

        // capture events: transitions into / out of the bound segment; for
        // mu = 0 the segment degenerates to the point eps = 0, detected as a
        // sign change of Re(eps) close to the axis
        using C = core::ResonancePoint::Class;
        auto in_window = [&](const core::ResonancePoint& rp) {
            return rp.classification == C::Bound || rp.classification == C::Critical
                || rp.classification == C::Supercritical;
        };
        for (std::size_t k = 1; k < tr.points.size(); ++k) {
            const auto& a = tr.points[k - 1];
            const auto& b = tr.points[k];
            core::DepthKind kind;
            double edge;
            if (mu == 0.0) {
                bool crossed = a.eps.real() * b.eps.real() < 0.0
                            && std::abs(a.eps.imag()) < 0.05
                            && std::abs(b.eps.imag()) < 0.05;
                if (!crossed)
                    continue;
                kind = core::DepthKind::MasslessBound;
                edge = 0.0;
            } else {
                if (in_window(a) == in_window(b))
                    continue;
                bool entering = in_window(b);
                kind = entering ? core::DepthKind::Critical : core::DepthKind::Supercritical;
                edge = entering ? mu : -mu;
            }
            // grid point whose eps is closest to the window edge
            double da = std::abs(a.eps - Complex(edge, 0.0));
            double db = std::abs(b.eps - Complex(edge, 0.0));
            double v_closest = (da < db) ? a.v : b.v;
            double v_ref = refine_event(kind, mu, ell, a.v, b.v, v_closest);
            tr.capture_events.push_back({v_ref, v_closest, kind});
        }
        out.push_back(std::move(tr));
    }
    return out;
}

core::DelayCurve delay_scan(double mu, int ell, double v, double eps_lo,
                            double eps_hi, int steps)
{
    core::DotParams params{mu, v, ell};
    core::validate(params);
    double threshold = params.massless() ? 0.0 : mu;
    if (!(eps_lo > threshold))
        throw DomainError("delay_scan: eps_lo must exceed the scattering threshold");
    if (!(eps_hi > eps_lo))
        throw DomainError("delay_scan: eps_hi must exceed eps_lo");
    if (steps < 100)
        throw DomainError("delay_scan: steps must be >= 100");

    core::DelayCurve curve;
    curve.energies.resize(size_t(steps) + 1);
    curve.raw_phase.resize(size_t(steps) + 1);
    curve.interpolated.assign(size_t(steps) + 1, false);
    for (int k = 0; k <= steps; ++k) {
        double e = eps_lo + (eps_hi - eps_lo) * double(k) / double(steps);
        curve.energies[size_t(k)] = e;
        try {
            curve.raw_phase[size_t(k)] = core::phase_shift_raw(params, e);
        } catch (const IndeterminatePhase&) {
            curve.raw_phase[size_t(k)] = std::numeric_limits<double>::quiet_NaN();
            curve.interpolated[size_t(k)] = true;
        }
    }
    // patch flagged points from the neighbors (principal representative)
    for (std::size_t k = 0; k < curve.raw_phase.size(); ++k) {
        if (!curve.interpolated[k])
            continue;
        std::size_t a = k, b = k;
        while (a > 0 && curve.interpolated[a])
            --a;
        while (b + 1 < curve.raw_phase.size() && curve.interpolated[b])
            ++b;
        double val;
        if (!curve.interpolated[a] && !curve.interpolated[b])
            val = 0.5 * (curve.raw_phase[a] + curve.raw_phase[b]);
        else if (!curve.interpolated[a])
            val = curve.raw_phase[a];
        else if (!curve.interpolated[b])
            val = curve.raw_phase[b];
        else
            throw IndeterminatePhase("delay_scan: whole grid indeterminate");
        curve.raw_phase[k] = val;
    }
    curve.unwrapped_phase =
        core::unwrap_phase(curve.raw_phase, core::UnwrapConvention::AnchorHighEnergy, v);
    return core::wigner_delay(std::move(curve));
}

ConsistencyReport consistency_report(double mu, int ell, double v,
                                     const std::vector<core::ResonancePoint>& resonances,
                                     const core::DelayCurve& curve)
{
    (void)mu;
    (void)ell;
    (void)v;
    ConsistencyReport report;
    if (resonances.empty())
        return report;

    std::vector<std::pair<double, double>> maxima; // (eps, tau)
    for (std::size_t k = 1; k + 1 < curve.delay.size(); ++k)
        if (curve.delay[k] > curve.delay[k - 1] && curve.delay[k] > curve.delay[k + 1])
            maxima.emplace_back(curve.energies[k], curve.delay[k]);
    if (maxima.empty())
        throw UnmatchedResonance("consistency_report: delay curve has no local maximum");

    for (const auto& r : resonances) {
        double er = r.eps.real();
        if (er < curve.energies.front() || er > curve.energies.back())
            throw UnmatchedResonance("consistency_report: resonance outside the curve span");
        auto best = std::min_element(maxima.begin(), maxima.end(),
                                     [&](const auto& a, const auto& b) {
                                         return std::abs(a.first - er) < std::abs(b.first - er);
                                     });
        report.rows.push_back({er, r.eps.imag(), best->first, best->second,
                               std::abs(er - best->first)});
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ConsistencyRow& a, const ConsistencyRow& b) {
                  return a.eps_R < b.eps_R;
              });
    return report;
}

} // namespace diracdot::scans
