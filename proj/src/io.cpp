#include "diracdot/io.hpp"
#include "diracdot/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace diracdot::io {

namespace {

using nlohmann::json;

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string state_name(core::ResonancePoint::Class c)
{
    switch (c) {
    case core::ResonancePoint::Class::Resonance: return "resonance";
    case core::ResonancePoint::Class::Bound: return "bound";
    case core::ResonancePoint::Class::Critical: return "critical";
    default: return "supercritical";
    }
}

std::string kind_name(core::DepthKind k)
{
    switch (k) {
    case core::DepthKind::Critical: return "critical";
    case core::DepthKind::Supercritical: return "supercritical";
    default: return "massless_bound";
    }
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path)
    {
        if (path.empty() || path == "-") {
            out_ = &std::cout;
        } else {
            file_.open(path);
            if (!file_)
                throw IoError("cannot open output file: " + path);
            out_ = &file_;
        }
    }
    ~Output()
    {
        if (file_.is_open()) {
            file_.close();
            if (!file_)
                std::cerr << "warning: short write to " << path_ << "\n";
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows)
{
    Output out(path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out.stream() << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out.stream() << row[i] << (i + 1 < row.size() ? "," : "\n");
    if (!out.stream())
        throw IoError("failed writing " + path);
}

void write_json(const std::string& path, const json& j)
{
    Output out(path);
    out.stream() << j.dump(2) << "\n";
    if (!out.stream())
        throw IoError("failed writing " + path);
}

// --- minimal XY chart ---------------------------------------------------

struct Series {
    std::vector<std::pair<double, double>> pts;
    bool dots = false;
    std::string color = "#1f77b4";
};

void write_svg(const std::string& path, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series)
{
    const double W = 800, H = 560, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (auto [x, y] : s.pts) {
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    Output out(path);
    std::ostream& os = out.stream();
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << title << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
       << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
       << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        double fx = xmin + (xmax - xmin) * t / 5.0;
        double fy = ymin + (ymax - ymin) * t / 5.0;
        os << "<text x=\"" << X(fx) << "\" y=\"" << H - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << num(fx) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(fy) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << num(fy) << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";

    for (const auto& s : series) {
        if (s.dots) {
            for (auto [x, y] : s.pts)
                os << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y)
                   << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"1.6\" points=\"";
            for (auto [x, y] : s.pts)
                os << X(x) << "," << Y(y) << " ";
            os << "\"/>\n";
        }
    }
    os << "</svg>\n";
    if (!os)
        throw IoError("failed writing " + path);
}

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

} // namespace

// --- complex literals ----------------------------------------------------

Complex parse_complex(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;
    if (s.empty())
        throw UsageError("empty complex literal");
    bool has_i = s.back() == 'i' || s.back() == 'I';
    // split at the last +/- that is not a leading sign or exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto to_d = [&](const std::string& t) {
        if (t.empty() || t == "+")
            return 1.0;
        if (t == "-")
            return -1.0;
        std::size_t pos = 0;
        double x;
        try {
            x = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw UsageError("bad number in complex literal: '" + text + "'");
        }
        if (pos != t.size())
            throw UsageError("trailing junk in complex literal: '" + text + "'");
        return x;
    };
    if (!has_i) {
        if (split != std::string::npos)
            throw UsageError("complex literal missing 'i': '" + text + "'");
        return {to_d(s), 0.0};
    }
    std::string body = s.substr(0, s.size() - 1); // drop the i
    if (split == std::string::npos)
        return {0.0, to_d(body)};
    return {to_d(s.substr(0, split)), to_d(body.substr(split))};
}

std::vector<Complex> parse_complex_list(const std::string& text)
{
    std::vector<Complex> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty())
            out.push_back(parse_complex(item));
    return out;
}

// --- config / CLI ---------------------------------------------------------

namespace {

Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    if (s == "svg") return Format::Svg;
    throw UsageError("unknown format '" + s + "' (expected csv, json or svg)");
}

double parse_double(const std::string& key, const std::string& s)
{
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("value for " + key + " is not a number: '" + s + "'");
    }
    if (pos != s.size())
        throw UsageError("value for " + key + " is not a number: '" + s + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& s)
{
    double x = parse_double(key, s);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        throw UsageError("value for " + key + " must be an integer: '" + s + "'");
    return int(x);
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read config file: " + path);
    static const char* allowed[] = {"mu", "v", "ell", "v_min", "v_max", "steps",
                                    "eps_min", "eps_max", "output", "format"};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string trimmed = strip(line);
        if (trimmed.empty())
            continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + " is not 'key = value'");
        std::string key = strip(trimmed.substr(0, eq));
        std::string val = strip(trimmed.substr(eq + 1));
        bool ok = false;
        for (const char* k : allowed)
            ok = ok || key == k;
        if (!ok)
            throw UsageError("unknown config key '" + key + "' in " + path);
        kv[key] = val;
    }
    return kv;
}

core::StateKind parse_state(const std::string& s)
{
    if (s == "bound") return core::StateKind::Bound;
    if (s == "critical") return core::StateKind::Critical;
    if (s == "supercritical") return core::StateKind::Supercritical;
    if (s == "scattering") return core::StateKind::Scattering;
    if (s == "massless-bound") return core::StateKind::MasslessBound;
    throw UsageError("unknown state '" + s + "'");
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args)
{
    if (args.empty())
        throw UsageError("missing subcommand (spectrum, capture, resonances, delay, consistency, spinor, convert)");

    RunConfig cfg;
    const std::string& cmd = args[0];
    if (cmd == "spectrum") cfg.command = Command::Spectrum;
    else if (cmd == "capture") cfg.command = Command::Capture;
    else if (cmd == "resonances") cfg.command = Command::Resonances;
    else if (cmd == "delay") cfg.command = Command::Delay;
    else if (cmd == "consistency") cfg.command = Command::Consistency;
    else if (cmd == "spinor") cfg.command = Command::Spinor;
    else if (cmd == "convert") cfg.command = Command::Convert;
    else throw UsageError("unknown subcommand '" + cmd + "'");

    // collect flag/value pairs first so --config can seed defaults
    std::map<std::string, std::string> flags;
    for (std::size_t k = 1; k < args.size(); ++k) {
        const std::string& a = args[k];
        if (a.rfind("--", 0) != 0)
            throw UsageError("expected a --flag, got '" + a + "'");
        if (k + 1 >= args.size())
            throw UsageError("flag " + a + " is missing its value");
        flags[a.substr(2)] = args[++k];
    }

    std::map<std::string, std::string> merged;
    if (auto it = flags.find("config"); it != flags.end()) {
        merged = read_config_file(it->second);
        flags.erase(it);
    }

    // map the generic config key "steps" onto the command's step count
    if (auto it = merged.find("steps"); it != merged.end()) {
        std::string steps = it->second;
        merged.erase(it);
        switch (cfg.command) {
        case Command::Delay:
        case Command::Consistency:
            merged["eps-steps"] = steps;
            break;
        case Command::Spinor:
            merged["rho-steps"] = steps;
            break;
        default:
            merged["v-steps"] = steps;
            break;
        }
    }
    // config uses underscores, flags use dashes
    for (const char* k : {"v_min", "v_max", "eps_min", "eps_max"}) {
        if (auto it = merged.find(k); it != merged.end()) {
            std::string key = k;
            std::replace(key.begin(), key.end(), '_', '-');
            merged[key] = it->second;
            merged.erase(k);
        }
    }
    for (auto& [k, v] : flags)
        merged[k] = v; // explicit flags override the config file

    bool eps_min_given = false, eps_max_given = false;
    for (const auto& [key, val] : merged) {
        if (key == "mu") cfg.params.mu = parse_double(key, val);
        else if (key == "ell") cfg.params.ell = parse_int(key, val);
        else if (key == "v") cfg.params.v = parse_double(key, val);
        else if (key == "v-min") cfg.v_min = parse_double(key, val);
        else if (key == "v-max") cfg.v_max = parse_double(key, val);
        else if (key == "v-steps") cfg.v_steps = parse_int(key, val);
        else if (key == "eps-min") { cfg.eps_min = parse_double(key, val); eps_min_given = true; }
        else if (key == "eps-max") { cfg.eps_max = parse_double(key, val); eps_max_given = true; }
        else if (key == "eps-steps") cfg.eps_steps = parse_int(key, val);
        else if (key == "count") cfg.count = parse_int(key, val);
        else if (key == "seeds") cfg.seeds = parse_complex_list(val);
        else if (key == "state") cfg.state = parse_state(val);
        else if (key == "eps") cfg.eps = parse_complex(val);
        else if (key == "rho-min") cfg.rho_min = parse_double(key, val);
        else if (key == "rho-max") cfg.rho_max = parse_double(key, val);
        else if (key == "rho-steps") cfg.rho_steps = parse_int(key, val);
        else if (key == "direction") {
            if (val == "to-natural") cfg.direction = Direction::ToNatural;
            else if (val == "from-natural") cfg.direction = Direction::FromNatural;
            else throw UsageError("unknown direction '" + val + "'");
        }
        else if (key == "E") cfg.E = parse_double(key, val);
        else if (key == "V0") cfg.V0 = parse_double(key, val);
        else if (key == "R") cfg.R = parse_double(key, val);
        else if (key == "m") cfg.m = parse_double(key, val);
        else if (key == "vF") cfg.vF = parse_double(key, val);
        else if (key == "hbar") cfg.hbar = parse_double(key, val);
        else if (key == "output") cfg.output_path = val;
        else if (key == "format") cfg.format = parse_format(val);
        else throw UsageError("unknown flag --" + key);
    }

    // precondition checks against the target operation
    double threshold = cfg.params.massless() ? 0.0 : cfg.params.mu;
    switch (cfg.command) {
    case Command::Spectrum:
        if (!(cfg.v_min < cfg.v_max) || !(cfg.v_max < 0.0))
            throw UsageError("spectrum requires v-min < v-max < 0");
        if (cfg.v_steps < 10)
            throw UsageError("spectrum requires v-steps >= 10");
        break;
    case Command::Delay:
    case Command::Consistency:
        if (!eps_min_given)
            cfg.eps_min = threshold + 0.01;
        if (!eps_max_given)
            cfg.eps_max = threshold + 6.0;
        if (!(cfg.eps_min > threshold))
            throw UsageError("eps-min must exceed the scattering threshold ("
                             + num(threshold) + ")");
        if (!(cfg.eps_max > cfg.eps_min))
            throw UsageError("eps-max must exceed eps-min");
        if (cfg.eps_steps < 100)
            throw UsageError("eps-steps must be >= 100");
        break;
    case Command::Resonances:
        if (!(cfg.v_min < cfg.v_max) || !(cfg.v_max < 0.0))
            throw UsageError("resonances requires v-min < v-max < 0");
        if (cfg.v_steps < 2)
            throw UsageError("resonances requires v-steps >= 2");
        break;
    case Command::Capture:
        if (cfg.count < 1)
            throw UsageError("capture requires count >= 1");
        break;
    case Command::Spinor:
        if (!(cfg.rho_min > 0.0) || !(cfg.rho_max > cfg.rho_min) || cfg.rho_steps < 2)
            throw UsageError("spinor requires 0 < rho-min < rho-max and rho-steps >= 2");
        break;
    case Command::Convert:
        if (!(cfg.R > 0.0) || !(cfg.vF > 0.0) || !(cfg.hbar > 0.0))
            throw UsageError("convert requires positive R, vF and hbar");
        break;
    }
    if (cfg.command != Command::Convert)
        try {
            core::validate(cfg.params);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    return cfg;
}

// --- serialization --------------------------------------------------------

void emit(const scans::SpectrumResult& r, Format f, const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t b = 0; b < r.branches.size(); ++b)
            for (std::size_t k = 0; k < r.branches[b].v_grid.size(); ++k)
                rows.push_back({std::to_string(b), "branch",
                                num(r.branches[b].v_grid[k]), num(r.branches[b].eps[k])});
        for (std::size_t k = 0; k < r.critical_depths.size(); ++k)
            rows.push_back({std::to_string(k), "critical", num(r.critical_depths[k]), num(r.mu)});
        for (std::size_t k = 0; k < r.supercritical_depths.size(); ++k)
            rows.push_back({std::to_string(k), "supercritical", num(r.supercritical_depths[k]), num(-r.mu)});
        write_csv(path, {"series", "kind", "v", "eps"}, rows);
    } else if (f == Format::Json) {
        json j;
        j["mu"] = r.mu;
        j["ell"] = r.ell;
        j["branches"] = json::array();
        for (const auto& b : r.branches)
            j["branches"].push_back({{"v_grid", b.v_grid}, {"eps", b.eps}});
        j["critical_depths"] = r.critical_depths;
        j["supercritical_depths"] = r.supercritical_depths;
        j["gaps"] = r.gaps;
        write_json(path, j);
    } else {
        std::vector<Series> series;
        for (std::size_t b = 0; b < r.branches.size(); ++b) {
            Series s;
            s.color = kPalette[b % 8];
            for (std::size_t k = 0; k < r.branches[b].v_grid.size(); ++k)
                s.pts.emplace_back(r.branches[b].v_grid[k], r.branches[b].eps[k]);
            series.push_back(std::move(s));
        }
        Series crit, sup;
        crit.dots = true;
        crit.color = "#d62728";
        for (double v : r.critical_depths)
            crit.pts.emplace_back(v, r.mu);
        sup.dots = true;
        sup.color = "#9467bd";
        for (double v : r.supercritical_depths)
            sup.pts.emplace_back(v, -r.mu);
        if (!crit.pts.empty())
            series.push_back(std::move(crit));
        if (!sup.pts.empty())
            series.push_back(std::move(sup));
        write_svg(path, "bound state levels", "v", "eps", series);
    }
}

void emit(const std::vector<scans::CaptureDepth>& r, double mu, Format f,
          const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& d : r)
            rows.push_back({num(d.v), kind_name(d.kind)});
        write_csv(path, {"v", "kind"}, rows);
    } else if (f == Format::Json) {
        json j = json::array();
        for (const auto& d : r)
            j.push_back({{"v", d.v}, {"kind", kind_name(d.kind)}});
        write_json(path, j);
    } else {
        Series s;
        s.dots = true;
        for (const auto& d : r) {
            double e = d.kind == core::DepthKind::Critical ? mu
                     : d.kind == core::DepthKind::Supercritical ? -mu : 0.0;
            s.pts.emplace_back(d.v, e);
        }
        write_svg(path, "capture depths", "v", "eps", {s});
    }
}

void emit(const std::vector<scans::ResonanceTrajectory>& r, Format f,
          const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& tr : r)
            for (const auto& p : tr.points)
                rows.push_back({num(p.v), num(p.eps.real()), num(p.eps.imag()),
                                num(p.residual), state_name(p.classification)});
        write_csv(path, {"v", "eps_R", "eps_I", "residual", "classification"}, rows);
    } else if (f == Format::Json) {
        json j = json::array();
        for (const auto& tr : r) {
            json t;
            t["mu"] = tr.mu;
            t["ell"] = tr.ell;
            t["lost"] = tr.lost;
            if (tr.lost)
                t["lost_at"] = tr.lost_at;
            t["points"] = json::array();
            for (const auto& p : tr.points)
                t["points"].push_back({{"v", p.v},
                                       {"eps_R", p.eps.real()},
                                       {"eps_I", p.eps.imag()},
                                       {"residual", p.residual},
                                       {"classification", state_name(p.classification)}});
            t["capture_events"] = json::array();
            for (const auto& ev : tr.capture_events)
                t["capture_events"].push_back({{"v", ev.v},
                                               {"v_grid", ev.v_grid},
                                               {"kind", kind_name(ev.kind)}});
            j.push_back(std::move(t));
        }
        write_json(path, j);
    } else {
        std::vector<Series> series;
        for (std::size_t k = 0; k < r.size(); ++k) {
            Series s;
            s.color = kPalette[k % 8];
            for (const auto& p : r[k].points)
                s.pts.emplace_back(p.eps.real(), p.eps.imag());
            series.push_back(std::move(s));
        }
        write_svg(path, "resonance trajectories", "eps_R", "eps_I", series);
    }
}

void emit(const core::DelayCurve& r, Format f, const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < r.energies.size(); ++k)
            rows.push_back({num(r.energies[k]), num(r.raw_phase[k]),
                            num(r.unwrapped_phase[k]), num(r.delay[k])});
        write_csv(path, {"eps", "raw_phase", "unwrapped_phase", "delay"}, rows);
    } else if (f == Format::Json) {
        json j;
        j["energies"] = r.energies;
        j["raw_phase"] = r.raw_phase;
        j["unwrapped_phase"] = r.unwrapped_phase;
        j["delay"] = r.delay;
        json flags = json::array();
        for (std::size_t k = 0; k < r.interpolated.size(); ++k)
            if (r.interpolated[k])
                flags.push_back(k);
        j["interpolated_indices"] = flags;
        write_json(path, j);
    } else {
        Series s;
        for (std::size_t k = 0; k < r.energies.size(); ++k)
            s.pts.emplace_back(r.energies[k], r.delay[k]);
        write_svg(path, "Wigner time delay", "eps", "tau", {s});
    }
}

void emit(const scans::ConsistencyReport& r, Format f, const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : r.rows)
            rows.push_back({num(row.eps_R), num(row.eps_I), num(row.delay_peak_eps),
                            num(row.delay_peak_value), num(row.gap)});
        write_csv(path, {"eps_R", "eps_I", "delay_peak_eps", "delay_peak_value", "gap"},
                  rows);
    } else if (f == Format::Json) {
        json j = json::array();
        for (const auto& row : r.rows)
            j.push_back({{"eps_R", row.eps_R},
                         {"eps_I", row.eps_I},
                         {"delay_peak_eps", row.delay_peak_eps},
                         {"delay_peak_value", row.delay_peak_value},
                         {"gap", row.gap}});
        write_json(path, j);
    } else {
        Series dots, peaks;
        dots.dots = true;
        dots.color = "#d62728";
        peaks.dots = true;
        peaks.color = "#2ca02c";
        for (const auto& row : r.rows) {
            dots.pts.emplace_back(row.eps_R, row.eps_I);
            peaks.pts.emplace_back(row.delay_peak_eps, 0.0);
        }
        write_svg(path, "resonances vs delay peaks", "eps_R", "eps_I", {dots, peaks});
    }
}

void emit(const std::vector<core::RadialSpinor>& r, Format f, const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& sp : r)
            rows.push_back({num(sp.rho), num(sp.phi1.real()), num(sp.phi1.imag()),
                            num(sp.phi2.real()), num(sp.phi2.imag()),
                            sp.region == core::Region::Inner ? "inner" : "outer"});
        write_csv(path, {"rho", "phi1_re", "phi1_im", "phi2_re", "phi2_im", "region"},
                  rows);
    } else if (f == Format::Json) {
        json j = json::array();
        for (const auto& sp : r)
            j.push_back({{"rho", sp.rho},
                         {"phi1", {sp.phi1.real(), sp.phi1.imag()}},
                         {"phi2", {sp.phi2.real(), sp.phi2.imag()}},
                         {"region", sp.region == core::Region::Inner ? "inner" : "outer"},
                         {"coeffs",
                          {{"a_i", {sp.coeffs.a_i.real(), sp.coeffs.a_i.imag()}},
                           {"a_o", {sp.coeffs.a_o.real(), sp.coeffs.a_o.imag()}},
                           {"A", {sp.coeffs.A.real(), sp.coeffs.A.imag()}},
                           {"B", {sp.coeffs.B.real(), sp.coeffs.B.imag()}}}}});
        write_json(path, j);
    } else {
        Series s1, s2;
        s1.color = "#1f77b4";
        s2.color = "#d62728";
        for (const auto& sp : r) {
            s1.pts.emplace_back(sp.rho, sp.phi1.real());
            s2.pts.emplace_back(sp.rho, sp.phi2.real());
        }
        write_svg(path, "radial spinor components", "rho", "phi", {s1, s2});
    }
}

void emit(const UnitRecord& r, Format f, const std::string& path)
{
    if (f == Format::Csv) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [k, v] : r.values)
            rows.push_back({k, num(v)});
        write_csv(path, {"key", "value"}, rows);
    } else if (f == Format::Json) {
        json j;
        for (const auto& [k, v] : r.values)
            j[k] = v;
        write_json(path, j);
    } else {
        throw UsageError("svg output is not defined for convert");
    }
}

UnitRecord convert_units(Direction direction, const UnitRecord& values,
                         const UnitConstants& c)
{
    if (!(c.R > 0.0) || !(c.vF > 0.0) || !(c.hbar > 0.0))
        throw DomainError("convert_units: R, vF and hbar must be positive");
    double scale = c.R / (c.hbar * c.vF);
    UnitRecord out;
    for (const auto& [key, x] : values.values) {
        if (direction == Direction::ToNatural) {
            if (key == "E") out.values.emplace_back("eps", x * scale);
            else if (key == "V0") out.values.emplace_back("v", x * scale);
            else if (key == "m") out.values.emplace_back("mu", x * c.vF * c.R / c.hbar);
            else throw DomainError("convert_units: unknown physical key '" + key + "'");
        } else {
            if (key == "eps") out.values.emplace_back("E", x / scale);
            else if (key == "v") out.values.emplace_back("V0", x / scale);
            else if (key == "mu") out.values.emplace_back("m", x * c.hbar / (c.vF * c.R));
            else throw DomainError("convert_units: unknown natural key '" + key + "'");
        }
    }
    return out;
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read csv: " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream is(line);
        while (std::getline(is, cell, ','))
            cells.push_back(cell);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

// --- dispatch ---------------------------------------------------------------

int run(const RunConfig& cfg, std::ostream& log)
{
    switch (cfg.command) {
    case Command::Spectrum: {
        auto r = scans::bound_spectrum(cfg.params.mu, cfg.params.ell, cfg.v_min,
                                       cfg.v_max, cfg.v_steps);
        emit(r, cfg.format, cfg.output_path);
        log << "spectrum: " << r.branches.size() << " branch(es), "
            << r.critical_depths.size() << " critical, "
            << r.supercritical_depths.size() << " supercritical depth(s)\n";
        return 0;
    }
    case Command::Capture: {
        auto r = scans::capture_depths(cfg.params.mu, cfg.params.ell, cfg.count);
        emit(r, cfg.params.mu, cfg.format, cfg.output_path);
        for (const auto& d : r) {
            char buf[64];
            // two-decimal convention for the log line only (truncated toward
            // zero, the way the depths are quoted in the literature)
            std::snprintf(buf, sizeof buf, "%.2f", std::trunc(d.v * 100.0) / 100.0);
            log << "capture: v = " << buf << " (" << kind_name(d.kind) << ")\n";
        }
        return 0;
    }
    case Command::Resonances: {
        std::vector<Complex> seeds = cfg.seeds;
        if (seeds.empty()) {
            auto found = scans::hunt_resonances(cfg.params.mu, cfg.params.ell, cfg.v_max);
            if (found.empty())
                throw NoConvergence("resonances: seed hunt found nothing at v = "
                                    + std::to_string(cfg.v_max));
            seeds.assign(found.begin(), found.begin() + std::min<std::size_t>(found.size(), 4));
            log << "resonances: hunted " << seeds.size() << " seed(s) at v = "
                << cfg.v_max << "\n";
        }
        std::vector<double> grid(size_t(cfg.v_steps) + 1);
        for (int k = 0; k <= cfg.v_steps; ++k)
            grid[size_t(k)] = cfg.v_max + (cfg.v_min - cfg.v_max) * double(k) / double(cfg.v_steps);
        auto r = scans::resonance_trajectories(cfg.params.mu, cfg.params.ell, grid, seeds);
        emit(r, cfg.format, cfg.output_path);
        bool lost = false;
        for (const auto& tr : r) {
            for (const auto& ev : tr.capture_events)
                log << "event: " << kind_name(ev.kind) << " at v = " << num(ev.v)
                    << " (grid " << num(ev.v_grid) << ")\n";
            if (tr.lost) {
                lost = true;
                log << "track lost at v = " << num(tr.lost_at) << "\n";
            }
        }
        return lost ? 3 : 0;
    }
    case Command::Delay: {
        auto r = scans::delay_scan(cfg.params.mu, cfg.params.ell, cfg.params.v,
                                   cfg.eps_min, cfg.eps_max, cfg.eps_steps);
        emit(r, cfg.format, cfg.output_path);
        return 0;
    }
    case Command::Consistency: {
        auto res = scans::hunt_resonances(cfg.params.mu, cfg.params.ell, cfg.params.v);
        std::vector<core::ResonancePoint> inside;
        for (Complex e : res) {
            if (e.real() > cfg.eps_min && e.real() < cfg.eps_max) {
                core::ResonancePoint p;
                p.v = cfg.params.v;
                p.eps = e;
                p.classification = core::classify(cfg.params, e);
                inside.push_back(p);
            }
        }
        auto curve = scans::delay_scan(cfg.params.mu, cfg.params.ell, cfg.params.v,
                                       cfg.eps_min, cfg.eps_max, cfg.eps_steps);
        auto rep = scans::consistency_report(cfg.params.mu, cfg.params.ell,
                                             cfg.params.v, inside, curve);
        emit(rep, cfg.format, cfg.output_path);
        for (const auto& row : rep.rows)
            log << "pair: eps_R = " << num(row.eps_R) << " peak = "
                << num(row.delay_peak_eps) << " gap = " << num(row.gap) << "\n";
        return 0;
    }
    case Command::Spinor: {
        std::vector<core::RadialSpinor> table;
        for (int k = 0; k <= cfg.rho_steps; ++k) {
            double rho = cfg.rho_min
                       + (cfg.rho_max - cfg.rho_min) * double(k) / double(cfg.rho_steps);
            table.push_back(core::radial_spinor(cfg.params, cfg.eps, rho, cfg.state));
        }
        emit(table, cfg.format, cfg.output_path);
        return 0;
    }
    case Command::Convert: {
        UnitRecord in;
        UnitConstants c{cfg.R, cfg.vF, cfg.hbar, cfg.m};
        if (cfg.direction == Direction::ToNatural) {
            in.values = {{"E", cfg.E}, {"V0", cfg.V0}, {"m", cfg.m}};
        } else {
            in.values = {{"eps", cfg.E}, {"v", cfg.V0}, {"mu", cfg.m}};
        }
        auto out = convert_units(cfg.direction, in, c);
        emit(out, cfg.format, cfg.output_path);
        return 0;
    }
    }
    throw Error("unreachable command");
}

} // namespace diracdot::io
