#pragma once

#include <algorithm>
#include <cmath>

namespace eiginf::detail {

// Bisection on an open bracket (a, b). The endpoints are never evaluated:
// the caller supplies the sign of f just inside a. Runs to machine precision
// unless rel_tol stops it earlier.
template <class F>
double bisect(F&& f, double a, double b, int sign_a, double rel_tol = 0.0, int max_iter = 400)
{
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) break;
        double v = f(mid);
        if (v == 0.0) return mid;
        if ((v > 0.0) == (sign_a > 0))
            a = mid;
        else
            b = mid;
        if (b - a <= rel_tol * std::max(std::abs(a), std::abs(b))) break;
    }
    return 0.5 * (a + b);
}

} // namespace eiginf::detail
