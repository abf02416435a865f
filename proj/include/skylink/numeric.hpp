#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "error.hpp"

namespace skylink {

inline double to_db(double efficiency) { return 10.0 * std::log10(efficiency); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Binary Shannon entropy in bits; H2(0) = H2(1) = 0.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10,
                     int max_iter = 200) {
    double flo = f(lo);
    const double fhi = f(hi);
    require(flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0), ErrorKind::domain,
            "bisection bracket does not change sign");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth, int& evaluations) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw Error(ErrorKind::quadrature, "adaptive Simpson exceeded recursion depth");
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evaluations) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evaluations);
}

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b]. `rel_tol` is relative to a
/// coarse estimate of the integral; `abs_floor` guards integrals near zero.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-10, double abs_floor = 0.0,
                        int max_depth = 50) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(std::abs(whole) * rel_tol, abs_floor);
    int evaluations = 3;
    if (tol == 0.0) return whole;
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, evaluations);
}

} // namespace skylink
