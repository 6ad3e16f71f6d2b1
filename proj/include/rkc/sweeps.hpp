#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rkc/coefficients.hpp"
#include "rkc/control_problem.hpp"
#include "rkc/errors.hpp"
#include "rkc/tableau.hpp"

namespace rkc {

/// Control stage values, one vector per (time step, stage slot).
using ControlStages = std::vector<std::vector<Eigen::VectorXd>>;

/// Per-solve storage of the grids and every internal stage.
///
/// Conventions (0-based arrays, s stage slots per step):
///  - state_stages[k][i] is the recurrence node y_{k_i}, i = 0..s;
///  - controls[k][i] is u_{k_i}, consumed together with the state node
///    i + control_stage_offset inside f;
///  - costate_stages[k][i] holds the (rescaled) costate stage p_{k_{i+1}},
///    the one paired with control slot i by the stationarity conditions.
///
/// control_stage_offset is 0 for the stabilized recurrences (f sees node
/// y_{k_i}) and 1 for standard-form tableaus (f sees RK stage g_{i+1}).
struct SweepRecord {
    std::vector<double> grid;
    std::vector<Eigen::VectorXd> states;
    std::vector<std::vector<Eigen::VectorXd>> state_stages;
    ControlStages controls;
    std::vector<Eigen::VectorXd> costates;
    std::vector<std::vector<Eigen::VectorXd>> costate_stages;
    int control_stage_offset = 0;

    int steps() const { return static_cast<int>(grid.size()) - 1; }
    double h() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

/// How stationarity systems grad_u H = 0 are solved per stage.
struct StationaritySolver {
    bool prefer_analytic = true;
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
};

inline SweepRecord make_record(const ControlProblem& problem, int N, int s,
                               int control_stage_offset = 0) {
    if (N < 1 || s < 1) {
        throw InvalidInput("make_record: need N >= 1 and s >= 1");
    }
    SweepRecord rec;
    rec.control_stage_offset = control_stage_offset;
    const double h = problem.horizon / N;
    rec.grid.resize(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) rec.grid[k] = k * h;
    rec.states.assign(static_cast<std::size_t>(N) + 1, problem.initial_state);
    rec.state_stages.assign(N, {});
    rec.controls.assign(
        N, std::vector<Eigen::VectorXd>(s, Eigen::VectorXd::Zero(problem.control_dim)));
    rec.costates.assign(static_cast<std::size_t>(N) + 1,
                        Eigen::VectorXd::Zero(problem.state_dim));
    rec.costate_stages.assign(N, {});
    return rec;
}

inline ControlStages constant_controls(int N, int s, const Eigen::VectorXd& u) {
    return ControlStages(N, std::vector<Eigen::VectorXd>(s, u));
}

inline ControlStages blend_controls(const ControlStages& a, const ControlStages& b, double theta) {
    ControlStages out = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            out[k][i] = (1.0 - theta) * a[k][i] + theta * b[k][i];
        }
    }
    return out;
}

inline double sup_difference(const ControlStages& a, const ControlStages& b) {
    double result = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            result = std::max(result, (a[k][i] - b[k][i]).cwiseAbs().maxCoeff());
        }
    }
    return result;
}

namespace detail {

inline void check_finite_sweep(const Eigen::VectorXd& v, long step, int stage,
                               const char* which) {
    if (!v.allFinite()) {
        throw OverflowError(std::string(which) + " sweep overflow at step " +
                                std::to_string(step) + ", stage " + std::to_string(stage),
                            step, stage);
    }
}

}  // namespace detail

/// Forward state sweep of the stabilized recurrence. Fills states and
/// state_stages of rec (controls are taken from U and copied into rec)
/// and returns the terminal cost Psi(y_N).
inline double forward_sweep(const ControlProblem& problem, const ControlStages& U,
                            const StabilizedCoefficients& c, SweepRecord& rec) {
    const int N = rec.steps();
    const int s = c.s;
    const double h = rec.h();
    rec.controls = U;
    rec.states[0] = problem.initial_state;
    for (int k = 0; k < N; ++k) {
        auto& nodes = rec.state_stages[k];
        nodes.assign(static_cast<std::size_t>(s) + 1, Eigen::VectorXd());
        nodes[0] = rec.states[k];
        nodes[1] = nodes[0] + (c.mu[1] * h) * problem.dynamics(U[k][0], nodes[0]);
        detail::check_finite_sweep(nodes[1], k, 1, "forward");
        for (int i = 2; i <= s; ++i) {
            nodes[i] = (c.mu[i] * h) * problem.dynamics(U[k][i - 1], nodes[i - 1]) +
                       c.nu[i] * nodes[i - 1] + (1.0 - c.nu[i]) * nodes[i - 2];
            detail::check_finite_sweep(nodes[i], k, i, "forward");
        }
        rec.states[k + 1] =
            (c.order == 1) ? nodes[s] : Eigen::VectorXd(c.a_final * nodes[0] + c.b_final_T * nodes[s]);
    }
    return problem.cost(rec.states[N]);
}

/// Same forward recurrence without stage storage; used by the line
/// search where only the terminal cost matters.
inline double forward_cost(const ControlProblem& problem, const ControlStages& U,
                           const StabilizedCoefficients& c, int N, double h) {
    const int s = c.s;
    Eigen::VectorXd y = problem.initial_state;
    for (int k = 0; k < N; ++k) {
        Eigen::VectorXd prev = y;
        Eigen::VectorXd cur = y + (c.mu[1] * h) * problem.dynamics(U[k][0], y);
        detail::check_finite_sweep(cur, k, 1, "forward");
        for (int i = 2; i <= s; ++i) {
            Eigen::VectorXd next = (c.mu[i] * h) * problem.dynamics(U[k][i - 1], cur) +
                                   c.nu[i] * cur + (1.0 - c.nu[i]) * prev;
            detail::check_finite_sweep(next, k, i, "forward");
            prev = std::move(cur);
            cur = std::move(next);
        }
        y = (c.order == 1) ? std::move(cur) : Eigen::VectorXd(c.a_final * y + c.b_final_T * cur);
    }
    return problem.cost(y);
}

namespace detail {

// Backward sweep shared by the Chebyshev and RKC double adjoints; the
// RKC closing step carries the extra a_s p_{k+1} term. Stage values are
// the alpha-rescaled costate stages, stored so that slot i pairs with
// control slot i.
inline void costate_sweep_stabilized(const ControlProblem& problem, SweepRecord& rec,
                                     const StabilizedCoefficients& c) {
    const int N = rec.steps();
    const int s = c.s;
    const double h = rec.h();
    for (int j = 1; j <= s; ++j) {
        if (c.alpha[j] == 0.0) {
            throw DegenerateRescaling("costate sweep: alpha_" + std::to_string(j) + " is zero");
        }
    }
    auto gradH = [&](int k, int node, const Eigen::VectorXd& p) {
        return problem.adjoint_product(rec.controls[k][node], rec.state_stages[k][node], p);
    };
    rec.costates[N] = problem.cost_gradient(rec.states[N]);
    for (int k = N - 1; k >= 0; --k) {
        const Eigen::VectorXd& pkp1 = rec.costates[k + 1];
        auto& stages = rec.costate_stages[k];
        stages.assign(s, Eigen::VectorXd());
        auto node = [&](int i) -> Eigen::VectorXd& { return stages[i - 1]; };  // p_{k_i}
        node(s) = pkp1;
        if (s >= 2) {
            node(s - 1) = node(s) + (c.mu[s] / c.nu[s] * h) * gradH(k, s - 1, node(s));
            detail::check_finite_sweep(node(s - 1), k, s - 1, "costate");
        }
        for (int j = 2; j <= s - 1; ++j) {
            const int i = s - j;
            node(i) = (c.mu[i + 1] * c.alpha[i + 1] / c.alpha[i] * h) *
                          gradH(k, i, node(i + 1)) +
                      (c.nu[i + 1] * c.alpha[i + 1] / c.alpha[i]) * node(i + 1) +
                      ((1.0 - c.nu[i + 2]) * c.alpha[i + 2] / c.alpha[i]) * node(i + 2);
            detail::check_finite_sweep(node(i), k, i, "costate");
        }
        Eigen::VectorXd p0 = (c.mu[1] * c.alpha[1] * h) * gradH(k, 0, node(1)) +
                             c.alpha[1] * node(1);
        if (s >= 2) {
            p0 += ((1.0 - c.nu[2]) * c.alpha[2]) * node(2);
        }
        if (c.order == 2) {
            p0 += c.a_final * pkp1;
        }
        detail::check_finite_sweep(p0, k, 0, "costate");
        rec.costates[k] = std::move(p0);
    }
}

}  // namespace detail

/// Backward costate sweep of the Chebyshev double adjoint: requires a
/// completed forward_sweep with the same coefficients. Fills costates
/// and costate_stages; costates[N] is set to grad Psi(y_N).
inline void costate_sweep_cheb(const ControlProblem& problem, SweepRecord& rec,
                               const StabilizedCoefficients& c) {
    if (c.order != 1) {
        throw InvalidInput("costate_sweep_cheb: coefficients are not order 1");
    }
    detail::costate_sweep_stabilized(problem, rec, c);
}

/// Backward costate sweep of the RKC double adjoint.
inline void costate_sweep_rkc(const ControlProblem& problem, SweepRecord& rec,
                              const StabilizedCoefficients& c) {
    if (c.order != 2) {
        throw InvalidInput("costate_sweep_rkc: coefficients are not order 2");
    }
    detail::costate_sweep_stabilized(problem, rec, c);
}

namespace detail {

// Newton iteration on grad_u H(u, y, p) = 0 with a finite-difference
// Hessian; m is small for every shipped problem.
inline Eigen::VectorXd newton_stationarity(const ControlProblem& problem,
                                           const Eigen::VectorXd& u0, const Eigen::VectorXd& y,
                                           const Eigen::VectorXd& p,
                                           const StationaritySolver& solver, long k, int i) {
    const int m = problem.control_dim;
    Eigen::VectorXd u = u0;
    const double pscale = 1.0 + p.cwiseAbs().maxCoeff();
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < solver.newton_max_iters; ++iter) {
        const Eigen::VectorXd g = problem.control_gradient(u, y, p);
        residual = g.cwiseAbs().maxCoeff();
        if (residual <= solver.newton_tol * pscale) {
            return u;
        }
        Eigen::MatrixXd hess(m, m);
        for (int j = 0; j < m; ++j) {
            const double du = 1e-6 * (1.0 + std::abs(u(j)));
            Eigen::VectorXd up = u, um = u;
            up(j) += du;
            um(j) -= du;
            hess.col(j) =
                (problem.control_gradient(up, y, p) - problem.control_gradient(um, y, p)) /
                (2.0 * du);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
        if (!lu.isInvertible()) {
            throw StationarityFailure("stationarity: singular Hessian at step " +
                                          std::to_string(k) + ", stage " + std::to_string(i),
                                      k, i, residual);
        }
        u -= lu.solve(g);
    }
    throw StationarityFailure("stationarity: Newton did not converge at step " +
                                  std::to_string(k) + ", stage " + std::to_string(i) +
                                  " (residual " + std::to_string(residual) + ")",
                              k, i, residual);
}

inline Eigen::VectorXd solve_stationarity(const ControlProblem& problem,
                                          const Eigen::VectorXd& u0, const Eigen::VectorXd& y,
                                          const Eigen::VectorXd& p,
                                          const StationaritySolver& solver, long k, int i) {
    if (solver.prefer_analytic && problem.analytic_stationarity) {
        Eigen::VectorXd u;
        try {
            u = problem.analytic_stationarity(y, p);
        } catch (const Error&) {
            return newton_stationarity(problem, u0, y, p, solver, k, i);
        }
        if (!u.allFinite()) {
            throw StationarityFailure("stationarity: analytic formula returned non-finite "
                                      "control at step " +
                                          std::to_string(k) + ", stage " + std::to_string(i),
                                      k, i, std::numeric_limits<double>::infinity());
        }
        return u;
    }
    return newton_stationarity(problem, u0, y, p, solver, k, i);
}

}  // namespace detail

/// Solves grad_u H = 0 at every (step, stage), pairing control slot i
/// with the state node i + offset and the costate stage stored in slot i
/// (the stage-index pairing of the optimality conditions).
inline ControlStages stationarity_update(const ControlProblem& problem, const SweepRecord& rec,
                                         const StationaritySolver& solver) {
    const int N = rec.steps();
    ControlStages out(N);
    for (int k = 0; k < N; ++k) {
        const int s = static_cast<int>(rec.controls[k].size());
        out[k].resize(s);
        for (int i = 0; i < s; ++i) {
            const Eigen::VectorXd& y = rec.state_stages[k][i + rec.control_stage_offset];
            const Eigen::VectorXd& p = rec.costate_stages[k][i];
            out[k][i] = detail::solve_stationarity(problem, rec.controls[k][i], y, p, solver, k, i);
        }
    }
    return out;
}

/// Control values on the time grid itself, from the stationarity system
/// at the grid pairs (y_k, p_k). This is the O(h^p) accurate control
/// representation used by the convergence studies.
inline std::vector<Eigen::VectorXd> grid_controls(const ControlProblem& problem,
                                                  const SweepRecord& rec,
                                                  const StationaritySolver& solver) {
    const int N = rec.steps();
    std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(N) + 1);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(problem.control_dim);
    for (int k = 0; k <= N; ++k) {
        out[k] = detail::solve_stationarity(problem, u0, rec.states[k], rec.costates[k], solver,
                                            k, 0);
    }
    return out;
}

/// Forward sweep in standard Runge-Kutta form on an explicit tableau.
/// Oracle path: stage i+1 consumes control slot i, control_stage_offset
/// must be 1 on the record.
inline double tableau_forward_sweep(const ControlProblem& problem, const ButcherTableau& t,
                                    const ControlStages& U, SweepRecord& rec) {
    const int N = rec.steps();
    const int s = t.stages();
    const double h = rec.h();
    if (!is_strictly_lower(t.A)) {
        throw UnsupportedTableau("tableau_forward_sweep: tableau must be explicit");
    }
    rec.controls = U;
    rec.states[0] = problem.initial_state;
    std::vector<Eigen::VectorXd> k_values(s);
    for (int k = 0; k < N; ++k) {
        auto& nodes = rec.state_stages[k];
        nodes.assign(static_cast<std::size_t>(s) + 1, Eigen::VectorXd());
        nodes[0] = rec.states[k];
        for (int i = 0; i < s; ++i) {
            Eigen::VectorXd g = rec.states[k];
            for (int j = 0; j < i; ++j) {
                if (t.A(i, j) != 0.0) g += (h * t.A(i, j)) * k_values[j];
            }
            detail::check_finite_sweep(g, k, i + 1, "forward");
            nodes[i + 1] = g;
            k_values[i] = problem.dynamics(U[k][i], g);
        }
        Eigen::VectorXd next = rec.states[k];
        for (int i = 0; i < s; ++i) {
            next += (h * t.b(i)) * k_values[i];
        }
        rec.states[k + 1] = std::move(next);
    }
    return problem.cost(rec.states[N]);
}

/// Backward costate sweep in standard form with a given costate tableau:
///   p_{k_i} = p_{k+1} + h sum_j C_ij grad_y H(u_j, g_j, p_{k_j}),
///   p_k     = p_{k+1} + h sum_i b_i grad_y H(u_i, g_i, p_{k_i}).
/// C strictly upper (double adjoints) is traversed in descending stage
/// order, strictly lower (the naive reuse of the forward tableau) in
/// ascending order. Costate stage i lands in slot i-1, pairing it with
/// control slot i-1 as in the standard-form optimality system.
inline void tableau_costate_sweep(const ControlProblem& problem, const ButcherTableau& costate,
                                  SweepRecord& rec) {
    const int N = rec.steps();
    const int s = costate.stages();
    const double h = rec.h();
    int first = 0, last = s, step = 1;
    if (is_strictly_lower(costate.A)) {
        // ascending
    } else if (is_strictly_upper(costate.A)) {
        first = s - 1;
        last = -1;
        step = -1;
    } else {
        throw UnsupportedTableau("tableau_costate_sweep: costate tableau has implicit stages");
    }
    rec.costates[N] = problem.cost_gradient(rec.states[N]);
    std::vector<Eigen::VectorXd> grads(s);
    for (int k = N - 1; k >= 0; --k) {
        auto& stages = rec.costate_stages[k];
        stages.assign(s, Eigen::VectorXd());
        for (int i = first; i != last; i += step) {
            Eigen::VectorXd p = rec.costates[k + 1];
            for (int j = 0; j < s; ++j) {
                if (costate.A(i, j) != 0.0) {
                    p += (h * costate.A(i, j)) * grads[j];
                }
            }
            detail::check_finite_sweep(p, k, i + 1, "costate");
            stages[i] = p;
            grads[i] = problem.adjoint_product(
                rec.controls[k][i], rec.state_stages[k][i + rec.control_stage_offset], p);
        }
        Eigen::VectorXd pk = rec.costates[k + 1];
        for (int i = 0; i < s; ++i) {
            pk += (h * costate.b(i)) * grads[i];
        }
        rec.costates[k] = std::move(pk);
    }
}

}  // namespace rkc
