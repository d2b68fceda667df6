#ifndef DIRACDOT_SPECFUN_HPP
#define DIRACDOT_SPECFUN_HPP

// Integer-order Bessel functions J_n, Y_n and Hankel functions H1_n, H2_n
// for real and complex arguments.
//
// Accuracy contract: relative error <= 1e-10 against an arbitrary-precision
// ascending-series oracle for |n| <= 12, |z| <= 100 (absolute 1e-12 near the
// real zeros of J_n, where the relative measure is meaningless).  Arguments
// are accepted up to |z| = 1e6; beyond 100 only the asymptotic regime is
// exercised, which keeps far more margin than the contract needs.
//
// Regimes: ascending power series for small |z|, Miller backward recurrence
// (normalized by a Neumann-type sum) for moderate |z|, Hankel asymptotic
// expansions for large |z|.  Y is obtained from the J array through the
// logarithmic Neumann sums for orders 0,1 plus the forward recurrence.
// The switchover radii are internal constants validated by the oracle suite.
//
// Branch convention: principal square root and logarithm everywhere; Y and
// H cut along the negative real axis.  All functions are pure and safe to
// call concurrently.

#include <complex>

namespace diracdot::specfun {

using Complex = std::complex<double>;

enum class Kind { J, Y, H1, H2 };

// A single member of the function family; negative orders are resolved by
// the reflection identities J_{-n} = (-1)^n J_n (same for Y, H1, H2) before
// dispatch.
struct FunctionKind {
    Kind kind;
    int order; // |order| <= 12
};

Complex bessel_j(int order, Complex z);
Complex bessel_y(int order, Complex z);
Complex hankel(Kind kind, int order, Complex z); // kind must be H1 or H2

Complex eval(FunctionKind fk, Complex z);

// Consecutive orders (n, n+1) from one family build; identical values to the
// single-order calls, cheaper for matching formulas that always need a pair.
struct OrderPair {
    Complex lo, hi;
};
OrderPair bessel_j_pair(int order, Complex z);
OrderPair hankel1_pair(int order, Complex z);

} // namespace diracdot::specfun

#endif
