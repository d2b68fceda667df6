#ifndef DIRACDOT_SCANS_HPP
#define DIRACDOT_SCANS_HPP

// The reproducible pipelines: bound spectra over well depth, capture depth
// lists, resonance trajectory continuation, Wigner delay scans and the
// resonance/delay consistency report.

#include "diracdot/core.hpp"
#include "diracdot/rootfind.hpp"

#include <optional>
#include <vector>

namespace diracdot::scans {

using Complex = std::complex<double>;

struct SpectrumBranch {
    std::vector<double> v_grid;
    std::vector<double> eps;
};

struct SpectrumResult {
    double mu = 0.0;
    int ell = 0;
    std::vector<SpectrumBranch> branches;
    std::vector<double> critical_depths;      // shallowest first
    std::vector<double> supercritical_depths; // shallowest first
    std::vector<double> gaps;                 // v values where a solver failed
};

// All bound levels eps(v) for v on a uniform grid over [v_lo, v_hi], stitched
// into branches by nearest-neighbor continuation, plus the critical and
// supercritical depths reachable above v_lo.  Per-point solver errors are
// recorded in `gaps` without aborting the scan.
SpectrumResult bound_spectrum(double mu, int ell, double v_lo, double v_hi,
                              int v_steps);

struct CaptureDepth {
    double v = 0.0;
    core::DepthKind kind = core::DepthKind::Critical;
};

// First `count` critical and supercritical depths (or massless bound depths
// when mu = 0), merged and sorted descending (shallowest first).
std::vector<CaptureDepth> capture_depths(double mu, int ell, int count);

struct CaptureEvent {
    double v = 0.0;        // refined depth (root of the matching residual)
    double v_grid = 0.0;   // trajectory grid point of closest approach
    core::DepthKind kind = core::DepthKind::Critical;
};

struct ResonanceTrajectory {
    double mu = 0.0;
    int ell = 0;
    std::vector<core::ResonancePoint> points;
    std::vector<CaptureEvent> capture_events;
    bool lost = false;      // TrackLost hit before the end of the grid
    double lost_at = 0.0;
};

// Local minima of the scaled outgoing secular residual over the rectangle
// Re eps in [-(|v|+mu), |v|+mu], Im eps in [-3, 0], polished by complex
// iteration.  Sorted by |Im| ascending (narrowest resonance first).
std::vector<Complex> hunt_resonances(double mu, int ell, double v);

// One trajectory per seed via rootfind::track over v_grid; capture events
// detected at window transitions and refined against the critical /
// supercritical residuals.  TrackLost marks the trajectory, others continue.
std::vector<ResonanceTrajectory>
resonance_trajectories(double mu, int ell, const std::vector<double>& v_grid,
                       const std::vector<Complex>& seeds);

// Fully populated delay curve on a uniform energy grid; IndeterminatePhase
// points are interpolated and flagged.
core::DelayCurve delay_scan(double mu, int ell, double v, double eps_lo,
                            double eps_hi, int steps);

struct ConsistencyRow {
    double eps_R = 0.0, eps_I = 0.0;
    double delay_peak_eps = 0.0, delay_peak_value = 0.0;
    double gap = 0.0; // |eps_R - delay_peak_eps|
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows; // sorted by eps_R
};

// Pairs each resonance with the nearest local maximum of the delay curve.
// Throws UnmatchedResonance when the curve has no local maximum to offer.
ConsistencyReport consistency_report(double mu, int ell, double v,
                                     const std::vector<core::ResonancePoint>& resonances,
                                     const core::DelayCurve& curve);

// Roots of a capture-depth residual for p_inner in (0, p_max], shallowest
// first.  Used by the spectrum and event refinement.
std::vector<double> residual_roots(core::DepthKind kind, double mu, int ell,
                                   double p_max);

} // namespace diracdot::scans

#endif
