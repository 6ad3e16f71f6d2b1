#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rkc/coefficients.hpp"
#include "rkc/control_problem.hpp"
#include "rkc/errors.hpp"
#include "rkc/sweeps.hpp"
#include "rkc/tableau.hpp"

namespace rkc {

enum class Method { cheb1, rkc2, dirk2, rkc2_naive };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::cheb1: return "cheb1";
        case Method::rkc2: return "rkc2";
        case Method::dirk2: return "dirk2";
        case Method::rkc2_naive: return "rkc2-naive";
    }
    return "?";
}

/// Either a pinned stage count or adaptive selection from the problem's
/// spectral radius estimate (once per solve by default; the refresh
/// option re-estimates each outer iteration, for nonlinear problems).
struct StagePolicy {
    std::optional<int> fixed_stages;
    bool refresh_each_iteration = false;
};

struct SolverConfig {
    double tol = 1e-8;  // sup norm over all control stage updates
    int max_iters = 500;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
    int trisection_iters = 40;
    int steps = 16;  // N
    Method method = Method::rkc2;
    std::optional<double> eta;
    StagePolicy stage_policy;
    std::optional<ControlStages> initial_control;  // default: zero stages
    StationaritySolver stationarity;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> cost_history;
    std::vector<double> update_norms;
    std::vector<int> stage_count_per_step;
    long total_f_evals = 0;
    bool converged = false;
    std::string abort_reason;  // nonempty when the solve aborted early
    SweepRecord final_record;
};

/// Trisection search for the minimizer of phi on [lo, hi]: each step
/// evaluates the two interior third-points and discards the outer third
/// adjacent to the larger value; returns the midpoint of the final
/// bracket.
inline double trisection_minimize(const std::function<double(double)>& phi, double lo, double hi,
                                  int iters) {
    if (!(hi > lo)) {
        throw InvalidInput("trisection_minimize: empty interval");
    }
    for (int it = 0; it < iters; ++it) {
        const double w = (hi - lo) / 3.0;
        const double m1 = lo + w;
        const double m2 = hi - w;
        const double f1 = phi(m1);
        const double f2 = phi(m2);
        if (!std::isfinite(f1) || !std::isfinite(f2)) {
            throw LineSearchFailure("trisection_minimize: non-finite objective value");
        }
        if (f1 > f2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// One forward/backward sweep pair; implementations differ per method.
class SweepEngine {
public:
    virtual ~SweepEngine() = default;
    virtual int stages() const = 0;
    virtual int record_offset() const = 0;
    virtual double forward(const ControlStages& U, SweepRecord& rec) = 0;
    virtual void backward(SweepRecord& rec) = 0;
    virtual double cost_only(const ControlStages& U) = 0;
};

class StabilizedEngine final : public SweepEngine {
public:
    StabilizedEngine(const ControlProblem& problem, StabilizedCoefficients coeffs, int steps,
                     double h)
        : problem_(problem), c_(std::move(coeffs)), steps_(steps), h_(h) {}

    int stages() const override { return c_.s; }
    int record_offset() const override { return 0; }
    double forward(const ControlStages& U, SweepRecord& rec) override {
        return forward_sweep(problem_, U, c_, rec);
    }
    void backward(SweepRecord& rec) override {
        if (c_.order == 1) {
            costate_sweep_cheb(problem_, rec, c_);
        } else {
            costate_sweep_rkc(problem_, rec, c_);
        }
    }
    double cost_only(const ControlStages& U) override {
        return forward_cost(problem_, U, c_, steps_, h_);
    }

private:
    const ControlProblem& problem_;
    StabilizedCoefficients c_;
    int steps_;
    double h_;
};

// Order-reduction witness: the forward RKC discretization kept as-is,
// the costate integrated by reusing the forward method instead of the
// double adjoint. Reusing the method for the backward sweep pairs its
// stages with the stored state stages in reverse chronological order,
// which in the stage alignment of the optimality system makes the
// costate coefficients the stage reversal of (a_ij, b_i); that tableau
// violates the mixed second-order conditions of the pair.
class NaiveRkcEngine final : public SweepEngine {
public:
    NaiveRkcEngine(const ControlProblem& problem, StabilizedCoefficients coeffs, int steps,
                   double h)
        : problem_(problem), c_(std::move(coeffs)),
          naive_costate_tableau_(reverse_stages(unroll_tableau(c_))), steps_(steps), h_(h) {}

    int stages() const override { return c_.s; }
    int record_offset() const override { return 0; }
    double forward(const ControlStages& U, SweepRecord& rec) override {
        return forward_sweep(problem_, U, c_, rec);
    }
    void backward(SweepRecord& rec) override {
        tableau_costate_sweep(problem_, naive_costate_tableau_, rec);
    }
    double cost_only(const ControlStages& U) override {
        return forward_cost(problem_, U, c_, steps_, h_);
    }

private:
    const ControlProblem& problem_;
    StabilizedCoefficients c_;
    ButcherTableau naive_costate_tableau_;
    int steps_;
    double h_;
};

// Implicit comparator. Stage systems are solved by a dense Newton with
// the Jacobian assembled row-by-row from the problem's adjoint product;
// the costate stages are linear in p and solved directly.
class Dirk2Engine final : public SweepEngine {
public:
    Dirk2Engine(const ControlProblem& problem, int steps, double h)
        : problem_(problem), t_(dirk2_tableau()), da_(double_adjoint(t_)), steps_(steps), h_(h) {
        if (problem.state_dim > 64) {
            throw InvalidInput("dirk2: dense Jacobian path supports state_dim <= 64");
        }
    }

    int stages() const override { return 2; }
    int record_offset() const override { return 1; }

    double forward(const ControlStages& U, SweepRecord& rec) override {
        const int N = rec.steps();
        const int s = t_.stages();
        rec.controls = U;
        rec.states[0] = problem_.initial_state;
        std::vector<Eigen::VectorXd> k_values(s);
        for (int k = 0; k < N; ++k) {
            auto& nodes = rec.state_stages[k];
            nodes.assign(static_cast<std::size_t>(s) + 1, Eigen::VectorXd());
            nodes[0] = rec.states[k];
            for (int i = 0; i < s; ++i) {
                Eigen::VectorXd rhs = rec.states[k];
                for (int j = 0; j < i; ++j) {
                    rhs += (h_ * t_.A(i, j)) * k_values[j];
                }
                nodes[i + 1] = solve_stage(U[k][i], rhs, t_.A(i, i), k, i + 1);
                k_values[i] = problem_.dynamics(U[k][i], nodes[i + 1]);
            }
            Eigen::VectorXd next = rec.states[k];
            for (int i = 0; i < s; ++i) {
                next += (h_ * t_.b(i)) * k_values[i];
            }
            rec.states[k + 1] = std::move(next);
        }
        return problem_.cost(rec.states[N]);
    }

    void backward(SweepRecord& rec) override {
        const int N = rec.steps();
        const int s = da_.stages();
        rec.costates[N] = problem_.cost_gradient(rec.states[N]);
        std::vector<Eigen::VectorXd> grads(s);
        for (int k = N - 1; k >= 0; --k) {
            auto& stages = rec.costate_stages[k];
            stages.assign(s, Eigen::VectorXd());
            for (int i = s - 1; i >= 0; --i) {
                Eigen::VectorXd rhs = rec.costates[k + 1];
                for (int j = i + 1; j < s; ++j) {
                    rhs += (h_ * da_.A(i, j)) * grads[j];
                }
                // (I - h C_ii J^T) p_i = rhs, exact because grad_y H is
                // linear in p.
                const Eigen::MatrixXd jt =
                    jacobian_transpose(rec.controls[k][i], rec.state_stages[k][i + 1]);
                const Eigen::MatrixXd lhs =
                    Eigen::MatrixXd::Identity(jt.rows(), jt.cols()) - h_ * da_.A(i, i) * jt;
                stages[i] = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(rhs);
                sweeps_check(stages[i], k, i + 1);
                grads[i] = problem_.adjoint_product(rec.controls[k][i],
                                                    rec.state_stages[k][i + 1], stages[i]);
            }
            Eigen::VectorXd pk = rec.costates[k + 1];
            for (int i = 0; i < s; ++i) {
                pk += (h_ * da_.b(i)) * grads[i];
            }
            rec.costates[k] = std::move(pk);
        }
    }

    double cost_only(const ControlStages& U) override {
        const int s = t_.stages();
        Eigen::VectorXd y = problem_.initial_state;
        std::vector<Eigen::VectorXd> k_values(s);
        for (int k = 0; k < steps_; ++k) {
            for (int i = 0; i < s; ++i) {
                Eigen::VectorXd rhs = y;
                for (int j = 0; j < i; ++j) {
                    rhs += (h_ * t_.A(i, j)) * k_values[j];
                }
                const Eigen::VectorXd g = solve_stage(U[k][i], rhs, t_.A(i, i), k, i + 1);
                k_values[i] = problem_.dynamics(U[k][i], g);
            }
            for (int i = 0; i < s; ++i) {
                y += (h_ * t_.b(i)) * k_values[i];
            }
        }
        return problem_.cost(y);
    }

private:
    Eigen::MatrixXd jacobian_transpose(const Eigen::VectorXd& u, const Eigen::VectorXd& y) const {
        const int n = problem_.state_dim;
        Eigen::MatrixXd jt(n, n);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < n; ++c) {
            e(c) = 1.0;
            jt.col(c) = problem_.adjoint_product(u, y, e);
            e(c) = 0.0;
        }
        return jt;
    }

    // Newton for g = rhs + h a f(u, g).
    Eigen::VectorXd solve_stage(const Eigen::VectorXd& u, const Eigen::VectorXd& rhs, double a,
                                long k, int stage) const {
        Eigen::VectorXd g = rhs;
        const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
        for (int iter = 0; iter < newton_max_iters_; ++iter) {
            const Eigen::VectorXd residual = g - rhs - (h_ * a) * problem_.dynamics(u, g);
            if (residual.cwiseAbs().maxCoeff() <= newton_tol_ * scale) {
                return g;
            }
            const Eigen::MatrixXd jt = jacobian_transpose(u, g);
            const Eigen::MatrixXd lhs =
                Eigen::MatrixXd::Identity(jt.rows(), jt.cols()) - (h_ * a) * jt.transpose();
            g -= Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(residual);
            if (!g.allFinite()) {
                throw OverflowError("dirk2: stage Newton diverged at step " + std::to_string(k) +
                                        ", stage " + std::to_string(stage),
                                    k, stage);
            }
        }
        throw StationarityFailure("dirk2: stage Newton did not converge at step " +
                                      std::to_string(k) + ", stage " + std::to_string(stage),
                                  k, stage, std::numeric_limits<double>::quiet_NaN());
    }

    static void sweeps_check(const Eigen::VectorXd& v, long k, int stage) {
        if (!v.allFinite()) {
            throw OverflowError("dirk2: costate sweep overflow at step " + std::to_string(k) +
                                    ", stage " + std::to_string(stage),
                                k, stage);
        }
    }

    const ControlProblem& problem_;
    ButcherTableau t_;
    ButcherTableau da_;
    int steps_;
    double h_;
    double newton_tol_ = 1e-12;
    int newton_max_iters_ = 25;
};

// The naive-costate system is not the gradient of the discrete cost, so
// Algorithm-style blend iterations either stall (line search) or diverge
// (theta = 1). Its solution is still locally unique, and every control
// stage enters smoothly, so Newton on the stationarity fixed-point
// residual U - G(U) recovers it; for linear-quadratic problems the
// residual is affine and one step suffices.
inline SolveReport naive_witness_solve(const ControlProblem& problem, const SolverConfig& cfg,
                                       NaiveRkcEngine& engine, SweepRecord& rec, int s,
                                       long& evals) {
    const int N = cfg.steps;
    const int m = problem.control_dim;
    const int dim = N * s * m;
    if (dim > 1024) {
        throw InvalidInput("rkc2-naive witness: N*s*m must be <= 1024");
    }
    SolveReport rep;
    rep.stage_count_per_step.assign(N, s);

    auto to_stack = [&](const ControlStages& U) {
        Eigen::VectorXd x(dim);
        for (int k = 0; k < N; ++k) {
            for (int i = 0; i < s; ++i) x.segment((k * s + i) * m, m) = U[k][i];
        }
        return x;
    };
    auto from_stack = [&](const Eigen::VectorXd& x) {
        ControlStages U(N, std::vector<Eigen::VectorXd>(s));
        for (int k = 0; k < N; ++k) {
            for (int i = 0; i < s; ++i) U[k][i] = x.segment((k * s + i) * m, m);
        }
        return U;
    };
    auto g_of = [&](const Eigen::VectorXd& x) {
        const ControlStages U = from_stack(x);
        engine.forward(U, rec);
        engine.backward(rec);
        return to_stack(stationarity_update(problem, rec, cfg.stationarity));
    };

    Eigen::VectorXd x = to_stack(cfg.initial_control ? *cfg.initial_control
                                                     : constant_controls(
                                                           N, s,
                                                           Eigen::VectorXd::Zero(m)));
    try {
        for (int iter = 0; iter < cfg.max_iters; ++iter) {
            const Eigen::VectorXd gx = g_of(x);
            rep.cost_history.push_back(engine.cost_only(from_stack(x)));
            const Eigen::VectorXd residual = x - gx;
            rep.iterations = iter + 1;
            if (residual.cwiseAbs().maxCoeff() <= cfg.tol) {
                rep.converged = true;
                rep.update_norms.push_back(residual.cwiseAbs().maxCoeff());
                break;
            }
            Eigen::MatrixXd jacobian(dim, dim);
            for (int j = 0; j < dim; ++j) {
                const double dxj = 1e-6 * (1.0 + std::abs(x(j)));
                Eigen::VectorXd xp = x;
                xp(j) += dxj;
                jacobian.col(j) = (xp - g_of(xp) - residual) / dxj;
            }
            const Eigen::VectorXd step =
                Eigen::PartialPivLU<Eigen::MatrixXd>(jacobian).solve(residual);
            x -= step;
            rep.update_norms.push_back(step.cwiseAbs().maxCoeff());
        }
        rep.cost_history.push_back(engine.forward(from_stack(x), rec));
        engine.backward(rec);
    } catch (const Error& e) {
        rep.abort_reason = e.what();
    }
    rec.controls = from_stack(x);
    rep.final_record = rec;
    rep.total_f_evals = evals;
    return rep;
}

inline std::unique_ptr<SweepEngine> make_engine(const ControlProblem& problem, Method method,
                                                int s, double eta, int steps, double h) {
    switch (method) {
        case Method::cheb1:
            return std::make_unique<StabilizedEngine>(problem, cheb1_coeffs(s, eta), steps, h);
        case Method::rkc2:
            return std::make_unique<StabilizedEngine>(problem, rkc2_coeffs(s, eta), steps, h);
        case Method::rkc2_naive:
            return std::make_unique<NaiveRkcEngine>(problem, rkc2_coeffs(s, eta), steps, h);
        case Method::dirk2:
            return std::make_unique<Dirk2Engine>(problem, steps, h);
    }
    throw InvalidInput("unknown method");
}

// Nearest-index remap when an adaptive refresh changes the stage count.
inline ControlStages remap_stages(const ControlStages& U, int s_new) {
    ControlStages out(U.size());
    for (std::size_t k = 0; k < U.size(); ++k) {
        const int s_old = static_cast<int>(U[k].size());
        out[k].resize(s_new);
        for (int i = 0; i < s_new; ++i) {
            const int src = (s_new == 1) ? 0
                                         : static_cast<int>(std::lround(
                                               static_cast<double>(i) * (s_old - 1) /
                                               std::max(1, s_new - 1)));
            out[k][i] = U[k][std::min(src, s_old - 1)];
        }
    }
    return out;
}

}  // namespace detail

/// Iterative optimality-system solver: alternates forward/backward
/// sweeps, the stagewise stationarity solve, and a trisection line
/// search on the control blend until the sup-norm control update falls
/// below tol.
inline SolveReport solve(const ControlProblem& problem, const SolverConfig& cfg) {
    if (!(cfg.tol > 0.0) || cfg.max_iters < 1 || cfg.steps < 1 ||
        !(cfg.theta_hi > cfg.theta_lo)) {
        throw InvalidInput("solve: invalid solver configuration");
    }
    const int N = cfg.steps;
    const double h = problem.horizon / N;
    const int order = (cfg.method == Method::cheb1) ? 1 : 2;
    const double eta =
        cfg.eta.value_or(order == 1 ? kDefaultEtaOrder1 : kDefaultEtaOrder2);

    long evals = 0;
    ControlProblem counted = problem;
    counted.dynamics = [fn = problem.dynamics, &evals](const Eigen::VectorXd& u,
                                                       const Eigen::VectorXd& y) {
        ++evals;
        return fn(u, y);
    };

    const Eigen::VectorXd u_zero = Eigen::VectorXd::Zero(problem.control_dim);
    ControlStages U;
    int s = 0;
    if (cfg.method == Method::dirk2) {
        s = 2;
    } else if (cfg.stage_policy.fixed_stages) {
        s = *cfg.stage_policy.fixed_stages;
    } else {
        const Eigen::VectorXd& u_probe =
            cfg.initial_control ? (*cfg.initial_control)[0][0] : u_zero;
        s = select_stages(h, problem.lambda_max_estimator(problem.initial_state, u_probe), order,
                          eta);
    }
    U = cfg.initial_control ? *cfg.initial_control : constant_controls(N, s, u_zero);
    if (static_cast<int>(U.size()) != N || static_cast<int>(U[0].size()) != s) {
        throw InvalidInput("solve: initial control stages have wrong dimensions");
    }

    if (cfg.method == Method::rkc2_naive) {
        detail::NaiveRkcEngine engine(counted, rkc2_coeffs(s, eta), N, h);
        SweepRecord rec = make_record(counted, N, s, engine.record_offset());
        return detail::naive_witness_solve(counted, cfg, engine, rec, s, evals);
    }

    SolveReport rep;
    rep.stage_count_per_step.assign(N, s);
    auto engine = detail::make_engine(counted, cfg.method, s, eta, N, h);
    SweepRecord rec = make_record(counted, N, s, engine->record_offset());

    auto abort = [&](const std::string& reason) {
        rep.abort_reason = reason;
        rep.total_f_evals = evals;
        rep.final_record = rec;
        return rep;
    };

    for (int l = 0; l < cfg.max_iters; ++l) {
        double cost = 0.0;
        try {
            cost = engine->forward(U, rec);
            engine->backward(rec);
        } catch (const Error& e) {
            return abort(e.what());
        }
        rep.cost_history.push_back(cost);

        ControlStages u_tilde;
        try {
            u_tilde = stationarity_update(counted, rec, cfg.stationarity);
        } catch (const Error& e) {
            return abort(e.what());
        }

        double theta = 0.0;
        auto phi = [&](double th) { return engine->cost_only(blend_controls(U, u_tilde, th)); };
        try {
            theta = trisection_minimize(phi, cfg.theta_lo, cfg.theta_hi, cfg.trisection_iters);
        } catch (const Error&) {
            double at_one = std::numeric_limits<double>::infinity();
            try {
                at_one = phi(1.0);
            } catch (const Error&) {
            }
            if (std::isfinite(at_one) && at_one < cost) {
                theta = 1.0;
            } else {
                return abort("line search failed and theta = 1 does not decrease the cost");
            }
        }

        ControlStages u_next = blend_controls(U, u_tilde, theta);
        const double delta = sup_difference(u_next, U);
        rep.update_norms.push_back(delta);
        U = std::move(u_next);
        rep.iterations = l + 1;
        if (delta <= cfg.tol) {
            rep.converged = true;
            break;
        }

        if (!cfg.stage_policy.fixed_stages && cfg.stage_policy.refresh_each_iteration &&
            cfg.method != Method::dirk2) {
            double lambda = 0.0;
            for (int k = 0; k <= N; ++k) {
                lambda = std::max(lambda, problem.lambda_max_estimator(rec.states[k], U[0][0]));
            }
            const int s_new = select_stages(h, lambda, order, eta);
            if (s_new != s) {
                s = s_new;
                U = detail::remap_stages(U, s);
                engine = detail::make_engine(counted, cfg.method, s, eta, N, h);
                rec = make_record(counted, N, s, engine->record_offset());
                rep.stage_count_per_step.assign(N, s);
            }
        }
    }

    // Final sweeps so the record and reported cost match the returned
    // control iterate.
    try {
        rep.cost_history.push_back(engine->forward(U, rec));
        engine->backward(rec);
    } catch (const Error& e) {
        return abort(e.what());
    }
    rep.final_record = rec;
    rep.total_f_evals = evals;
    return rep;
}

/// Algorithm with the DIRK2 state/costate sweeps (implicit comparator).
inline SolveReport dirk2_solve(const ControlProblem& problem, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.method = Method::dirk2;
    return solve(problem, c);
}

struct DirectOracleResult {
    bool conclusive = false;
    ControlStages controls;
    double cost = std::numeric_limits<double>::quiet_NaN();
    double gradient_norm = std::numeric_limits<double>::infinity();
};

/// Minimizes the discrete cost directly over all stacked stage controls
/// (BFGS with central-difference gradients). Tiny instances only; this
/// is the commuting-diagram oracle, clarity over speed.
inline DirectOracleResult direct_discrete_oracle(const ControlProblem& problem, Method method,
                                                 int N, int s,
                                                 std::optional<double> eta_opt = {}) {
    if (method != Method::cheb1 && method != Method::rkc2) {
        throw InvalidInput("direct_discrete_oracle: stabilized methods only");
    }
    const int m = problem.control_dim;
    const int dim = N * s * m;
    if (dim > 64) {
        throw OracleSizeExceeded("direct_discrete_oracle: N*s*m must be <= 64");
    }
    const int order = (method == Method::cheb1) ? 1 : 2;
    const double eta = eta_opt.value_or(order == 1 ? kDefaultEtaOrder1 : kDefaultEtaOrder2);
    const StabilizedCoefficients coeffs =
        (order == 1) ? cheb1_coeffs(s, eta) : rkc2_coeffs(s, eta);
    const double h = problem.horizon / N;

    auto unstack = [&](const Eigen::VectorXd& x) {
        ControlStages U(N, std::vector<Eigen::VectorXd>(s));
        for (int k = 0; k < N; ++k) {
            for (int i = 0; i < s; ++i) {
                U[k][i] = x.segment((k * s + i) * m, m);
            }
        }
        return U;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        return forward_cost(problem, unstack(x), coeffs, N, h);
    };
    auto gradient = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(dim);
        for (int j = 0; j < dim; ++j) {
            const double dx = 1e-6 * (1.0 + std::abs(x(j)));
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += dx;
            xm(j) -= dx;
            g(j) = (objective(xp) - objective(xm)) / (2.0 * dx);
        }
        return g;
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
    double fx = objective(x);
    Eigen::VectorXd g = gradient(x);
    const double gtol = 1e-8;
    for (int iter = 0; iter < 600 && g.cwiseAbs().maxCoeff() > gtol; ++iter) {
        Eigen::VectorXd d = -hinv * g;
        if (d.dot(g) >= 0.0) {  // not a descent direction; restart
            hinv.setIdentity();
            d = -g;
        }
        double t = 1.0;
        const double slope = g.dot(d);
        double f_new = objective(x + t * d);
        while (f_new > fx + 1e-4 * t * slope && t > 1e-14) {
            t *= 0.5;
            f_new = objective(x + t * d);
        }
        if (t <= 1e-14) {
            break;  // line search exhausted; report whatever gradient remains
        }
        const Eigen::VectorXd step = t * d;
        const Eigen::VectorXd g_new = gradient(x + step);
        const Eigen::VectorXd yv = g_new - g;
        const double sy = step.dot(yv);
        if (sy > 1e-12 * step.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            hinv = (eye - rho * step * yv.transpose()) * hinv *
                       (eye - rho * yv * step.transpose()) +
                   rho * step * step.transpose();
        }
        x += step;
        fx = f_new;
        g = g_new;
    }

    DirectOracleResult result;
    result.gradient_norm = g.cwiseAbs().maxCoeff();
    result.cost = fx;
    result.controls = unstack(x);
    result.conclusive = result.gradient_norm <= 1e-7;
    return result;
}

}  // namespace rkc
