#include "diracdot/rootfind.hpp"
#include "diracdot/errors.hpp"

#include <cmath>
#include <limits>

namespace diracdot::rootfind {

std::vector<Bracket> bracket_roots(const std::function<double(double)>& f,
                                   double lo, double hi, int subdivisions)
{
    if (!(lo < hi))
        throw DomainError("bracket_roots: lo must be below hi");
    if (subdivisions < 2)
        throw DomainError("bracket_roots: need at least 2 subdivisions");

    std::vector<Bracket> out;
    double x_prev = lo;
    double f_prev;
    try {
        f_prev = f(lo);
    } catch (const std::exception& e) {
        throw EvaluationError(std::string("bracket_roots: f failed at grid point: ") + e.what());
    }
    for (int i = 1; i <= subdivisions; ++i) {
        double x = lo + (hi - lo) * double(i) / double(subdivisions);
        double fx;
        try {
            fx = f(x);
        } catch (const std::exception& e) {
            throw EvaluationError(std::string("bracket_roots: f failed at grid point: ") + e.what());
        }
        if (!std::isfinite(f_prev) || !std::isfinite(fx))
            throw EvaluationError("bracket_roots: non-finite sample");
        if (f_prev == 0.0)
            out.push_back({x_prev, x, f_prev, fx});
        else if (f_prev * fx < 0.0)
            out.push_back({x_prev, x, f_prev, fx});
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

double refine_root(const std::function<double(double)>& f, const Bracket& br,
                   double tol)
{
    if (!(br.lo < br.hi) || !(br.f_lo * br.f_hi <= 0.0))
        throw DomainError("refine_root: invalid bracket");
    if (!(tol > 0.0))
        throw DomainError("refine_root: tol must be positive");

    // Brent: inverse quadratic / secant with bisection safeguards.
    double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a;
    bool mflag = true;

    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fb) <= 1e-10 || std::abs(b - a) <= tol)
            return b;
        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc))
              + b * fa * fc / ((fb - fa) * (fb - fc))
              + c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        double lo14 = (3.0 * a + b) / 4.0;
        bool bad = !((s > std::min(lo14, b) && s < std::max(lo14, b)))
                   || (mflag && std::abs(s - b) >= std::abs(b - c) / 2.0)
                   || (!mflag && std::abs(s - b) >= std::abs(c - d) / 2.0)
                   || (mflag && std::abs(b - c) < tol)
                   || (!mflag && std::abs(c - d) < tol);
        if (bad) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    throw NoConvergence("refine_root: iteration cap reached");
}

namespace {

Complex newton_polish(const std::function<Complex(Complex)>& f, Complex x,
                      const ComplexRootOptions& opts, int budget)
{
    Complex fx = f(x);
    for (int it = 0; it < budget; ++it) {
        if (std::abs(fx) <= opts.tol)
            return x;
        double h = 1e-7 * (std::abs(x) + 1.0);
        Complex df = (f(x + h) - f(x - h)) / (2.0 * h);
        if (std::abs(df) == 0.0)
            throw NoConvergence("complex_root: Newton derivative vanished");
        Complex step = fx / df;
        // damping: shrink until the residual actually drops
        double lam = 1.0;
        for (int k = 0; k < 8; ++k) {
            Complex xn = x - lam * step;
            if (opts.escape_radius > 0.0 && std::abs(xn) > opts.escape_radius)
                throw EscapedRegion("complex_root: Newton iterate escaped");
            Complex fn = f(xn);
            if (std::abs(fn) < std::abs(fx)) {
                x = xn;
                fx = fn;
                break;
            }
            lam *= 0.5;
            if (k == 7)
                throw NoConvergence("complex_root: damped Newton stagnated");
        }
    }
    if (std::abs(fx) <= opts.tol)
        return x;
    throw NoConvergence("complex_root: Newton iteration cap reached");
}

} // namespace

Complex complex_root(const std::function<Complex(Complex)>& f, Complex seed,
                     const ComplexRootOptions& opts)
{
    const double h = 1e-3 * (std::abs(seed) + 1.0);
    Complex x0 = seed - h, x1 = seed + h, x2 = seed;
    Complex f0 = f(x0), f1 = f(x1), f2 = f(x2);

    double best = std::abs(f2);
    int stagnant = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (std::abs(f2) <= opts.tol)
            return x2;

        Complex q = (x1 != x0) ? (x2 - x1) / (x1 - x0) : Complex(0.5, 0.0);
        Complex A = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        Complex B = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        Complex C = (1.0 + q) * f2;
        Complex disc = std::sqrt(B * B - 4.0 * A * C);
        Complex den = (std::abs(B + disc) >= std::abs(B - disc)) ? B + disc : B - disc;
        Complex x3;
        if (std::abs(den) == 0.0)
            x3 = x2 * 1.0001 + Complex(1e-8, 1e-8);
        else
            x3 = x2 - (x2 - x1) * (2.0 * C / den);

        if (opts.escape_radius > 0.0 && std::abs(x3) > opts.escape_radius)
            throw EscapedRegion("complex_root: Muller iterate escaped the search region");

        x0 = x1; f0 = f1;
        x1 = x2; f1 = f2;
        x2 = x3; f2 = f(x2);

        double r = std::abs(f2);
        if (r < 0.7 * best) {
            best = r;
            stagnant = 0;
        } else if (++stagnant >= 8) {
            return newton_polish(f, x2, opts, opts.max_iter - it);
        }
    }
    throw NoConvergence("complex_root: Muller iteration cap reached");
}

std::vector<TrackedRoot>
track(const std::function<Complex(double, Complex)>& f_family,
      const std::vector<double>& v_grid, Complex seed, const TrackOptions& opts)
{
    if (v_grid.size() < 2)
        throw DomainError("track: grid needs at least 2 points");
    bool inc = v_grid[1] > v_grid[0];
    for (std::size_t i = 1; i < v_grid.size(); ++i)
        if ((v_grid[i] > v_grid[i - 1]) != inc)
            throw DomainError("track: v_grid must be monotone");

    auto solve_at = [&](double v, Complex guess) {
        ComplexRootOptions ro;
        ro.tol = opts.tol;
        ro.escape_radius = opts.escape_radius_scale * (std::abs(guess) + std::abs(v) + 1.0);
        return complex_root([&](Complex e) { return f_family(v, e); }, guess, ro);
    };

    std::vector<TrackedRoot> out;
    out.reserve(v_grid.size());

    Complex r0 = solve_at(v_grid[0], seed);
    if (std::abs(r0 - seed) > opts.jump_cap)
        throw TrackLost("track: seed does not solve the family at the first grid point", 0);
    out.push_back({v_grid[0], r0, std::abs(f_family(v_grid[0], r0)), true});

    Complex prev = r0, prev2 = r0;
    bool have2 = false;
    for (std::size_t i = 1; i < v_grid.size(); ++i) {
        double v_from = v_grid[i - 1];
        double v_to = v_grid[i];
        double dv = v_to - v_from;

        Complex guess = have2 ? prev + (prev - prev2) : prev;
        Complex root;
        bool direct = true;
        try {
            root = solve_at(v_to, guess);
            if (std::abs(root - prev) > opts.jump_cap)
                direct = false;
        } catch (const Error&) {
            direct = false;
        }

        if (!direct) {
            // walk v_from -> v_to in 2^k substeps until the whole leg holds
            bool reached = false;
            for (int k = 1; k <= opts.max_halvings && !reached; ++k) {
                int nsub = 1 << k;
                Complex p2 = prev2, p1 = prev;
                bool full_step_back = have2; // p2 is one whole grid step behind p1
                bool failed = false;
                for (int s = 1; s <= nsub; ++s) {
                    double v = v_from + dv * double(s) / double(nsub);
                    Complex slope = p1 - p2;
                    if (s == 1 && full_step_back)
                        slope /= double(nsub);
                    try {
                        Complex r = solve_at(v, p1 + slope);
                        if (std::abs(r - p1) > opts.jump_cap) {
                            failed = true;
                            break;
                        }
                        p2 = p1;
                        p1 = r;
                    } catch (const Error&) {
                        failed = true;
                        break;
                    }
                }
                if (!failed) {
                    root = p1;
                    reached = true;
                }
            }
            if (!reached)
                throw TrackLost("track: step halving exhausted at v = " + std::to_string(v_to),
                                out.size() - 1);
        }
        double res = std::abs(f_family(v_to, root));
        out.push_back({v_to, root, res, direct});
        prev2 = prev;
        prev = root;
        have2 = true;
    }
    return out;
}

} // namespace diracdot::rootfind
