#ifndef DIRACDOT_IO_HPP
#define DIRACDOT_IO_HPP

// Command line front end, flat key = value config files, and CSV / JSON /
// SVG serialization for every pipeline result.
//
// Numbers are serialized with 15 significant digits; the paper-style
// two-decimal rounding only ever appears in human-readable log lines.

#include "diracdot/core.hpp"
#include "diracdot/scans.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace diracdot::io {

using Complex = std::complex<double>;

enum class Command { Spectrum, Capture, Resonances, Delay, Consistency, Spinor, Convert };
enum class Format { Csv, Json, Svg };
enum class Direction { ToNatural, FromNatural };

struct RunConfig {
    Command command = Command::Capture;
    core::DotParams params{};

    double v_min = -14.0, v_max = -0.1;
    int v_steps = 260;
    double eps_min = 0.0, eps_max = 0.0; // 0 = derive from params
    int eps_steps = 800;
    int count = 3;
    std::vector<Complex> seeds;

    // spinor
    core::StateKind state = core::StateKind::Bound;
    Complex eps{0.0, 0.0};
    double rho_min = 0.05, rho_max = 3.0;
    int rho_steps = 200;

    // convert
    Direction direction = Direction::ToNatural;
    double E = 0.0, V0 = 0.0, R = 1.0, m = 0.0, vF = 1.0, hbar = 1.0;

    std::string output_path; // empty = stdout
    Format format = Format::Csv;
};

// Parses subcommand + flags, with optional --config <file> providing
// defaults that explicit flags override.  Config files are flat
// `key = value` lines with `#` comments and the documented keys mu, v, ell,
// v_min, v_max, steps, eps_min, eps_max, output, format.  Unknown flags or
// keys raise UsageError naming the offender; range violations against the
// target operation's preconditions do too.
RunConfig parse_config(const std::vector<std::string>& args);

// Dispatches the configured pipeline, writes the result in the requested
// format and returns the process exit code (0 only when the pipeline
// completed without TrackLost / UnmatchedResonance).
int run(const RunConfig& cfg, std::ostream& log);

// "a+bi" literals, comma separated: "2.9-0.62i,1i,3"
std::vector<Complex> parse_complex_list(const std::string& text);
Complex parse_complex(const std::string& text);

// --- serialization -----------------------------------------------------

void emit(const scans::SpectrumResult& r, Format f, const std::string& path);
void emit(const std::vector<scans::CaptureDepth>& r, double mu, Format f,
          const std::string& path);
void emit(const std::vector<scans::ResonanceTrajectory>& r, Format f,
          const std::string& path);
void emit(const core::DelayCurve& r, Format f, const std::string& path);
void emit(const scans::ConsistencyReport& r, Format f, const std::string& path);
void emit(const std::vector<core::RadialSpinor>& r, Format f,
          const std::string& path);

struct UnitRecord {
    std::vector<std::pair<std::string, double>> values;
};
void emit(const UnitRecord& r, Format f, const std::string& path);

// Eq.-of-units conversion, forward or inverse; round-trips to 1e-12.
struct UnitConstants {
    double R = 1.0, vF = 1.0, hbar = 1.0;
    double m = 0.0;
};
UnitRecord convert_units(Direction direction, const UnitRecord& values,
                         const UnitConstants& constants);

// --- CSV read-back (round-trip checks and downstream tooling) ----------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);

} // namespace diracdot::io

#endif
