#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rkc/errors.hpp"

namespace rkc {

/// Runge-Kutta coefficients (A, b). Stage count is b.size().
///
/// Values are immutable by convention: every operation below returns a
/// fresh tableau.
struct ButcherTableau {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;

    int stages() const { return static_cast<int>(b.size()); }
};

/// A state method together with the costate method induced by the
/// symplecticity relations b̂_i = b_i, â_ij = b_j - (b_j/b_i) a_ji.
struct PartitionedPair {
    ButcherTableau state_tableau;
    ButcherTableau costate_tableau;
};

inline ButcherTableau explicit_euler_tableau() {
    ButcherTableau t;
    t.A = Eigen::MatrixXd::Zero(1, 1);
    t.b = Eigen::VectorXd::Constant(1, 1.0);
    return t;
}

inline ButcherTableau implicit_euler_tableau() {
    ButcherTableau t;
    t.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
    t.b = Eigen::VectorXd::Constant(1, 1.0);
    return t;
}

inline ButcherTableau heun_tableau() {
    ButcherTableau t;
    t.A = Eigen::MatrixXd::Zero(2, 2);
    t.A(1, 0) = 1.0;
    t.b = Eigen::VectorXd::Constant(2, 0.5);
    return t;
}

/// L-stable two-stage DIRK of order two, gamma = 1 - sqrt(2)/2.
inline ButcherTableau dirk2_tableau() {
    const double gamma = 1.0 - std::sqrt(2.0) / 2.0;
    ButcherTableau t;
    t.A = Eigen::MatrixXd::Zero(2, 2);
    t.A(0, 0) = gamma;
    t.A(1, 0) = 1.0 - 2.0 * gamma;
    t.A(1, 1) = gamma;
    t.b = Eigen::VectorXd::Constant(2, 0.5);
    return t;
}

inline bool is_strictly_lower(const Eigen::MatrixXd& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = i; j < A.cols(); ++j) {
            if (A(i, j) != 0.0) return false;
        }
    }
    return true;
}

inline bool is_strictly_upper(const Eigen::MatrixXd& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            if (A(i, j) != 0.0) return false;
        }
    }
    return true;
}

inline bool is_explicit(const ButcherTableau& t) { return is_strictly_lower(t.A); }

/// Same method with stages listed in reverse order
/// (indices i, j -> s+1-i, s+1-j). A permutation, not a new method.
inline ButcherTableau reverse_stages(const ButcherTableau& t) {
    const int s = t.stages();
    ButcherTableau r;
    r.A.resize(s, s);
    r.b.resize(s);
    for (int i = 0; i < s; ++i) {
        r.b(i) = t.b(s - 1 - i);
        for (int j = 0; j < s; ++j) {
            r.A(i, j) = t.A(s - 1 - i, s - 1 - j);
        }
    }
    return r;
}

/// True iff the stage-reversed tableau is strictly lower triangular,
/// i.e. the method is explicit once traversed in reverse stage order.
inline bool is_explicit_after_reversal(const ButcherTableau& t) {
    return is_strictly_upper(t.A);
}

/// Double adjoint (ã_ij, b̃_i) = ((b_j/b_i) a_ji, b_i): the explicit
/// scheme integrating the costate backward in time. Requires b_i != 0.
inline ButcherTableau double_adjoint(const ButcherTableau& t) {
    const int s = t.stages();
    for (int i = 0; i < s; ++i) {
        if (t.b(i) == 0.0) {
            throw DegenerateWeights("double_adjoint: b_i = 0 at stage " + std::to_string(i + 1));
        }
    }
    ButcherTableau d;
    d.A.resize(s, s);
    d.b = t.b;
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            d.A(i, j) = (t.b(j) / t.b(i)) * t.A(j, i);
        }
    }
    return d;
}

/// Time adjoint a*_ij = b_{s+1-j} - a_{s+1-i,s+1-j}, b*_i = b_{s+1-i}
/// (inverse map of the original method, stages re-permuted).
inline ButcherTableau time_adjoint(const ButcherTableau& t) {
    const int s = t.stages();
    ButcherTableau a;
    a.A.resize(s, s);
    a.b.resize(s);
    for (int i = 0; i < s; ++i) {
        a.b(i) = t.b(s - 1 - i);
        for (int j = 0; j < s; ++j) {
            a.A(i, j) = t.b(s - 1 - j) - t.A(s - 1 - i, s - 1 - j);
        }
    }
    return a;
}

/// Costate tableau from the symplecticity relations. The time adjoint of
/// the costate tableau is the double adjoint of t (up to the stage
/// permutation inherent in the time-adjoint convention above).
inline PartitionedPair hat_tableau(const ButcherTableau& t) {
    const int s = t.stages();
    for (int i = 0; i < s; ++i) {
        if (t.b(i) == 0.0) {
            throw DegenerateWeights("hat_tableau: b_i = 0 at stage " + std::to_string(i + 1));
        }
    }
    PartitionedPair pair;
    pair.state_tableau = t;
    pair.costate_tableau.A.resize(s, s);
    pair.costate_tableau.b = t.b;
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            pair.costate_tableau.A(i, j) = t.b(j) - (t.b(j) / t.b(i)) * t.A(j, i);
        }
    }
    return pair;
}

/// Entrywise residual r_ij = b_i â_ij + b̂_j a_ji - b_i b̂_j of the
/// symplecticity conditions; identically zero for a valid pair.
inline Eigen::MatrixXd symplecticity_residual(const PartitionedPair& pair) {
    const ButcherTableau& t = pair.state_tableau;
    const ButcherTableau& h = pair.costate_tableau;
    const int s = t.stages();
    Eigen::MatrixXd r(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            r(i, j) = t.b(i) * h.A(i, j) + h.b(j) * t.A(j, i) - t.b(i) * h.b(j);
        }
    }
    return r;
}

/// Stability function R(z) = det(I - zA + z 1 b^T) / det(I - zA),
/// evaluated through dense LU determinants. Oracle-scale s only.
inline double stability_function(const ButcherTableau& t, double z) {
    const int s = t.stages();
    const Eigen::MatrixXd N = Eigen::MatrixXd::Identity(s, s) - z * t.A;
    const double den = N.determinant();
    const double scale = std::max(1.0, std::pow(std::abs(z) * t.A.cwiseAbs().maxCoeff() + 1.0,
                                                static_cast<double>(s)));
    if (std::abs(den) < 1e-14 * scale) {
        throw PoleError("stability_function: I - zA singular at z = " + std::to_string(z));
    }
    const Eigen::MatrixXd M = N + z * Eigen::VectorXd::Ones(s) * t.b.transpose();
    return M.determinant() / den;
}

/// Order-two conditions sum(b) = 1 and sum(b_i a_ij) = 1/2, each within
/// 1e-12 (coefficients come in closed form; residuals are round-off).
inline bool check_order_two(const ButcherTableau& t) {
    const double tol = 1e-12;
    const double c1 = t.b.sum();
    const double c2 = t.b.dot(t.A.rowwise().sum());
    return std::abs(c1 - 1.0) <= tol && std::abs(c2 - 0.5) <= tol;
}

/// One step of the standard Runge-Kutta formulation. Brute-force oracle
/// for the recurrence implementations; s is capped because the standard
/// form accumulates round-off for large stage counts.
///
/// The tableau must be explicit directly or after stage reversal.
template <class Field>
Eigen::VectorXd apply_generic_rk(const ButcherTableau& t, Field&& f, const Eigen::VectorXd& y,
                                 double h) {
    const int s = t.stages();
    if (s > 12) {
        throw OracleSizeExceeded("apply_generic_rk: s = " + std::to_string(s) + " exceeds 12");
    }
    int first = 0, last = s, step = 1;
    if (is_strictly_lower(t.A)) {
        // forward substitution order
    } else if (is_strictly_upper(t.A)) {
        first = s - 1;
        last = -1;
        step = -1;
    } else {
        throw UnsupportedTableau("apply_generic_rk: tableau has implicit stages");
    }
    std::vector<Eigen::VectorXd> k(s);  // k_i = f(g_i)
    for (int i = first; i != last; i += step) {
        Eigen::VectorXd g = y;
        for (int j = 0; j < s; ++j) {
            if (t.A(i, j) != 0.0) {
                g += h * t.A(i, j) * k[j];
            }
        }
        k[i] = f(g);
    }
    Eigen::VectorXd out = y;
    for (int i = 0; i < s; ++i) {
        out += h * t.b(i) * k[i];
    }
    return out;
}

}  // namespace rkc
