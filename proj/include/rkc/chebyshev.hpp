#pragma once

#include <cmath>

#include "rkc/errors.hpp"

namespace rkc {

/// Chebyshev polynomial of the first kind evaluated together with its
/// first two derivatives.
struct ChebEval {
    double value = 1.0;
    double first_derivative = 0.0;
    double second_derivative = 0.0;
};

/// Evaluates T_degree(x), T'_degree(x) and T''_degree(x) by propagating
/// the three-term recurrence T_j = 2x T_{j-1} - T_{j-2} jointly with its
/// differentiated forms
///
///   T'_j  = 2 T_{j-1} + 2x T'_{j-1} - T'_{j-2},
///   T''_j = 4 T'_{j-1} + 2x T''_{j-1} - T''_{j-2},
///
/// so derivatives are exact algebraic propagations, never divided
/// differences. Valid for any real x (|x| > 1 included).
inline ChebEval cheb_eval(int degree, double x) {
    if (degree < 0) {
        throw InvalidInput("cheb_eval: degree must be nonnegative");
    }
    if (!std::isfinite(x)) {
        throw InvalidInput("cheb_eval: x must be finite");
    }
    ChebEval prev{1.0, 0.0, 0.0};  // T_0
    if (degree == 0) {
        return prev;
    }
    ChebEval cur{x, 1.0, 0.0};  // T_1
    for (int j = 2; j <= degree; ++j) {
        ChebEval next;
        next.value = 2.0 * x * cur.value - prev.value;
        next.first_derivative =
            2.0 * cur.value + 2.0 * x * cur.first_derivative - prev.first_derivative;
        next.second_derivative =
            4.0 * cur.first_derivative + 2.0 * x * cur.second_derivative - prev.second_derivative;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace rkc
