#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "rkc/chebyshev.hpp"
#include "rkc/coefficients.hpp"
#include "rkc/control_problem.hpp"
#include "rkc/errors.hpp"
#include "rkc/format.hpp"
#include "rkc/ivp.hpp"
#include "rkc/sweeps.hpp"

namespace rkc {

enum class StabilityMethod { cheb1, rkc2_new, rkc_classical, cheb1_da, rkc2_da };

inline const char* stability_method_name(StabilityMethod m) {
    switch (m) {
        case StabilityMethod::cheb1: return "cheb1";
        case StabilityMethod::rkc2_new: return "rkc2-new";
        case StabilityMethod::rkc_classical: return "rkc-classical";
        case StabilityMethod::cheb1_da: return "cheb1-da";
        case StabilityMethod::rkc2_da: return "rkc2-da";
    }
    return "?";
}

/// Internal-stage amplification factors on the scalar test problem,
/// listed in evaluation order: forward methods hold y_{k_0}..y_{k_s},
/// double adjoints hold p_{k_s}..p_{k_0}. values[0] is always 1; final
/// is the full-step amplification R_s(z).
struct StageStabilityProfile {
    StabilityMethod method = StabilityMethod::cheb1;
    int s = 0;
    double eta = 0.0;
    double z = 0.0;
    std::vector<double> values;
    double final_value = 1.0;
};

namespace detail {

// Scalar linear test problem y' = lambda y as a control problem; the
// control channel is inert.
inline ControlProblem scalar_test_problem(double lambda) {
    ControlProblem p;
    p.state_dim = 1;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.initial_state = Eigen::VectorXd::Constant(1, 1.0);
    p.dynamics = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, lambda * y(0)).eval();
    };
    p.adjoint_product = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                 const Eigen::VectorXd& pv) {
        return Eigen::VectorXd::Constant(1, lambda * pv(0)).eval();
    };
    p.control_gradient = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&) {
        return Eigen::VectorXd::Zero(1).eval();
    };
    p.cost = [](const Eigen::VectorXd& y) { return y(0); };
    p.cost_gradient = [](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 1.0).eval();
    };
    p.lambda_max_estimator = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return std::abs(lambda);
    };
    return p;
}

}  // namespace detail

/// Evaluates the profile by applying the actual recurrences (forward
/// steppers or backward sweeps) to the scalar test problem with h = 1,
/// lambda = z.
inline StageStabilityProfile stage_stability(StabilityMethod method, int s, double eta,
                                             double z) {
    StageStabilityProfile profile;
    profile.method = method;
    profile.s = s;
    profile.eta = eta;
    profile.z = z;
    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 1.0);
    auto field = [z](const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, z * y(0)).eval();
    };
    switch (method) {
        case StabilityMethod::cheb1:
        case StabilityMethod::rkc2_new: {
            const StabilizedCoefficients c = (method == StabilityMethod::cheb1)
                                                 ? cheb1_coeffs(s, eta)
                                                 : rkc2_coeffs(s, eta);
            const IvpStepOutput out = (c.order == 1) ? cheb1_step(field, y0, 1.0, c, true)
                                                     : rkc2_step(field, y0, 1.0, c, true);
            for (const auto& stage : out.internal_stages) profile.values.push_back(stage(0));
            profile.final_value = out.next_state(0);
            break;
        }
        case StabilityMethod::rkc_classical: {
            const ClassicalRkcCoefficients c = classical_rkc_coeffs(s, eta);
            const IvpStepOutput out = classical_rkc_step(field, y0, 1.0, c, true);
            for (const auto& stage : out.internal_stages) profile.values.push_back(stage(0));
            profile.final_value = out.next_state(0);
            break;
        }
        case StabilityMethod::cheb1_da:
        case StabilityMethod::rkc2_da: {
            const StabilizedCoefficients c = (method == StabilityMethod::cheb1_da)
                                                 ? cheb1_coeffs(s, eta)
                                                 : rkc2_coeffs(s, eta);
            const ControlProblem problem = detail::scalar_test_problem(z);
            SweepRecord rec = make_record(problem, 1, s);
            const ControlStages U = constant_controls(1, s, Eigen::VectorXd::Zero(1));
            forward_sweep(problem, U, c, rec);
            if (c.order == 1) {
                costate_sweep_cheb(problem, rec, c);
            } else {
                costate_sweep_rkc(problem, rec, c);
            }
            profile.values.reserve(static_cast<std::size_t>(s) + 1);
            for (int i = s; i >= 1; --i) {
                profile.values.push_back(rec.costate_stages[0][i - 1](0));
            }
            profile.values.push_back(rec.costates[0](0));
            profile.final_value = rec.costates[0](0);
            break;
        }
    }
    return profile;
}

/// Closed-form internal-stage amplifications of the forward methods:
/// T_i(omega0 + omega z)/T_i(omega0) for the Chebyshev-style stages and
/// a_i + b_i T_i(omega0 + omega2 z) for classical RKC.
inline StageStabilityProfile closed_form_stage_stability(StabilityMethod method, int s,
                                                         double eta, double z) {
    StageStabilityProfile profile;
    profile.method = method;
    profile.s = s;
    profile.eta = eta;
    profile.z = z;
    profile.values.reserve(static_cast<std::size_t>(s) + 1);
    switch (method) {
        case StabilityMethod::cheb1:
        case StabilityMethod::rkc2_new: {
            const StabilizedCoefficients c = (method == StabilityMethod::cheb1)
                                                 ? cheb1_coeffs(s, eta)
                                                 : rkc2_coeffs(s, eta);
            const double arg = c.omega0 + c.omega * z;
            for (int i = 0; i <= s; ++i) {
                profile.values.push_back(cheb_eval(i, arg).value / cheb_eval(i, c.omega0).value);
            }
            profile.final_value =
                (c.order == 1) ? profile.values.back()
                               : c.a_final + c.b_final_T * profile.values.back();
            break;
        }
        case StabilityMethod::rkc_classical: {
            const ClassicalRkcCoefficients c = classical_rkc_coeffs(s, eta);
            const double arg = c.omega0 + c.omega2 * z;
            for (int i = 0; i <= s; ++i) {
                profile.values.push_back(c.a[i] + c.b[i] * cheb_eval(i, arg).value);
            }
            profile.final_value = profile.values.back();
            break;
        }
        default:
            throw InvalidInput(
                "closed_form_stage_stability: no closed form for double-adjoint stages");
    }
    return profile;
}

/// Maximum of max_i |R_{s,i}(z)| over a uniform grid on [zmin, zmax].
inline double scan_internal_bound(StabilityMethod method, int s, double eta, double zmin,
                                  double zmax, int grid_points) {
    if (!(zmax <= 0.0) || zmin > zmax) {
        throw InvalidInput("scan_internal_bound: interval must lie in (-inf, 0]");
    }
    if (grid_points < 2) {
        throw InvalidInput("scan_internal_bound: need at least two grid points");
    }
    double worst = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double z = zmin + (zmax - zmin) * g / (grid_points - 1);
        const StageStabilityProfile profile = stage_stability(method, s, eta, z);
        for (double v : profile.values) {
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

/// Integer coefficients of the Chebyshev expansion of the undamped
/// double-adjoint stages, computed both by the three-term induction and
/// by the parity closed form; the two tables must agree, and rows
/// normalized by 1/(i+1) sum to one.
struct GammaTable {
    int s = 0;
    std::vector<std::vector<long long>> by_induction;    // rows i = 0..s-1
    std::vector<std::vector<long long>> by_closed_form;
};

inline GammaTable gamma_table(int s) {
    if (s < 1) {
        throw InvalidInput("gamma_table: s must be >= 1");
    }
    GammaTable table;
    table.s = s;
    auto& ind = table.by_induction;
    ind.resize(s);
    for (int i = 0; i < s; ++i) ind[i].assign(static_cast<std::size_t>(i) + 1, 0);
    auto at = [&ind](int i, int j) -> long long {
        return (i >= 0 && j >= 0 && j <= i) ? ind[i][j] : 0;
    };
    ind[0][0] = 1;
    if (s >= 2) {
        ind[1][0] = 0;
        ind[1][1] = 2;
    }
    for (int i = 2; i < s; ++i) {
        ind[i][0] = at(i - 1, 1) - at(i - 2, 0);
        ind[i][1] = 2 * at(i - 1, 0) + at(i - 1, 2) - at(i - 2, 1);
        for (int j = 2; j <= i; ++j) {
            ind[i][j] = at(i - 1, j - 1) + at(i - 1, j + 1) - at(i - 2, j);
        }
    }
    auto& cls = table.by_closed_form;
    cls.resize(s);
    for (int i = 0; i < s; ++i) {
        cls[i].assign(static_cast<std::size_t>(i) + 1, 0);
        cls[i][0] = (i % 2 == 0) ? 1 : 0;
        for (int j = 1; j <= i; ++j) {
            cls[i][j] = ((i - j) % 2 == 0) ? 2 : 0;
        }
    }
    return table;
}

/// Verifies the proof identity for the undamped double adjoints: stage i
/// of the backward recurrence equals sum_j gamma^i_j T_j(1 + z/s^2)
/// (Chebyshev) or sum_j gamma^i_j T_j(1 + 3z/(s^2-1)) (RKC) for
/// i = 0..s-1. Returns the max residual over the grid.
inline double chebyshev_expansion_check(StabilityMethod method, int s,
                                        const std::vector<double>& z_grid) {
    if (method != StabilityMethod::cheb1_da && method != StabilityMethod::rkc2_da) {
        throw InvalidInput("chebyshev_expansion_check: double-adjoint methods only");
    }
    const GammaTable table = gamma_table(s);
    double worst = 0.0;
    for (double z : z_grid) {
        const StageStabilityProfile profile = stage_stability(method, s, 0.0, z);
        const double arg = (method == StabilityMethod::cheb1_da)
                               ? 1.0 + z / (static_cast<double>(s) * s)
                               : 1.0 + 3.0 * z / (static_cast<double>(s) * s - 1.0);
        for (int i = 0; i < s; ++i) {
            double expansion = 0.0;
            for (int j = 0; j <= i; ++j) {
                expansion +=
                    static_cast<double>(table.by_closed_form[i][j]) / (i + 1) *
                    cheb_eval(j, arg).value;
            }
            worst = std::max(worst, std::abs(profile.values[i] - expansion));
        }
    }
    return worst;
}

/// CSV rows (z, R_{s,0..s}, R_final) over a uniform grid; header only
/// when the grid is empty.
inline void emit_stability_csv(std::ostream& out, StabilityMethod method, int s, double eta,
                               double zmin, double zmax, int grid_points) {
    out << "z";
    for (int i = 0; i <= s; ++i) out << ",R" << i;
    out << ",Rfinal\n";
    for (int g = 0; g < grid_points; ++g) {
        const double z =
            (grid_points == 1) ? zmin : zmin + (zmax - zmin) * g / (grid_points - 1);
        const StageStabilityProfile profile = stage_stability(method, s, eta, z);
        out << format_full(z);
        for (double v : profile.values) out << ',' << format_full(v);
        out << ',' << format_full(profile.final_value) << '\n';
    }
}

}  // namespace rkc
