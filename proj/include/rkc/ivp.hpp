#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rkc/coefficients.hpp"
#include "rkc/errors.hpp"

namespace rkc {

/// Result of one stabilized step. internal_stages holds the recurrence
/// nodes y_{k_0}..y_{k_s} when requested (the sweep engine needs them;
/// plain IVP use keeps them off to save memory).
struct IvpStepOutput {
    Eigen::VectorXd next_state;
    std::vector<Eigen::VectorXd> internal_stages;
    long evals = 0;
};

namespace detail {

inline void check_finite_stage(const Eigen::VectorXd& v, int stage) {
    if (!v.allFinite()) {
        throw OverflowError("stabilized step produced a non-finite stage " +
                                std::to_string(stage),
                            -1, stage);
    }
}

// Shared two-buffer recurrence of the Chebyshev and new-RKC methods;
// the closing rule is the only difference between the two.
template <class Field>
IvpStepOutput stabilized_step(Field&& f, const Eigen::VectorXd& y, double h,
                              const StabilizedCoefficients& c, bool store_stages) {
    IvpStepOutput out;
    if (store_stages) {
        out.internal_stages.reserve(static_cast<std::size_t>(c.s) + 1);
        out.internal_stages.push_back(y);
    }
    Eigen::VectorXd prev = y;                                 // y_{k_{i-2}}
    Eigen::VectorXd cur = y + (c.mu[1] * h) * f(y);           // y_{k_1}
    ++out.evals;
    check_finite_stage(cur, 1);
    if (store_stages) out.internal_stages.push_back(cur);
    for (int i = 2; i <= c.s; ++i) {
        Eigen::VectorXd next = (c.mu[i] * h) * f(cur) + c.nu[i] * cur + (1.0 - c.nu[i]) * prev;
        ++out.evals;
        check_finite_stage(next, i);
        prev = std::move(cur);
        cur = std::move(next);
        if (store_stages) out.internal_stages.push_back(cur);
    }
    if (c.order == 1) {
        out.next_state = std::move(cur);
    } else {
        out.next_state = c.a_final * y + c.b_final_T * cur;
    }
    return out;
}

}  // namespace detail

/// One step of the order-one Chebyshev method, y_{k+1} = y_{k_s}.
template <class Field>
IvpStepOutput cheb1_step(Field&& f, const Eigen::VectorXd& y, double h,
                         const StabilizedCoefficients& c, bool store_stages = false) {
    if (c.order != 1) {
        throw InvalidInput("cheb1_step: coefficients are not order 1");
    }
    return detail::stabilized_step(std::forward<Field>(f), y, h, c, store_stages);
}

/// One step of the order-two RKC method (new formulation),
/// y_{k+1} = a_s y_{k_0} + b_s T_s(omega0) y_{k_s}.
template <class Field>
IvpStepOutput rkc2_step(Field&& f, const Eigen::VectorXd& y, double h,
                        const StabilizedCoefficients& c, bool store_stages = false) {
    if (c.order != 2) {
        throw InvalidInput("rkc2_step: coefficients are not order 2");
    }
    return detail::stabilized_step(std::forward<Field>(f), y, h, c, store_stages);
}

/// One step of the classical RKC formulation (same stability function as
/// rkc2_step, different internal stages).
template <class Field>
IvpStepOutput classical_rkc_step(Field&& f, const Eigen::VectorXd& y, double h,
                                 const ClassicalRkcCoefficients& c, bool store_stages = false) {
    IvpStepOutput out;
    if (store_stages) {
        out.internal_stages.reserve(static_cast<std::size_t>(c.s) + 1);
        out.internal_stages.push_back(y);
    }
    const Eigen::VectorXd f0 = f(y);
    ++out.evals;
    Eigen::VectorXd prev = y;
    Eigen::VectorXd cur = y + (c.b[1] * c.omega2 * h) * f0;
    detail::check_finite_stage(cur, 1);
    if (store_stages) out.internal_stages.push_back(cur);
    for (int i = 2; i <= c.s; ++i) {
        Eigen::VectorXd next = y + c.mu_prime[i] * h * (f(cur) - c.a[i - 1] * f0) +
                               c.nu_prime[i] * (cur - y) + c.kappa_prime[i] * (prev - y);
        ++out.evals;
        detail::check_finite_stage(next, i);
        prev = std::move(cur);
        cur = std::move(next);
        if (store_stages) out.internal_stages.push_back(cur);
    }
    out.next_state = std::move(cur);
    return out;
}

enum class IvpMethod { cheb1, rkc2, classical_rkc };

/// Integration controls. Either pin the stage count or supply a spectral
/// radius estimate and let select_stages pick s each step.
struct IntegrateOptions {
    IvpMethod method = IvpMethod::rkc2;
    std::optional<double> eta;  // default: 0.05 (order 1), 0.15 (order 2)
    std::optional<int> fixed_stages;
    std::function<double(const Eigen::VectorXd&)> lambda_max;
    bool store_stages = false;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> states;
    std::vector<std::vector<Eigen::VectorXd>> stages;  // per step, when requested
    std::vector<int> stages_used;
    long total_evals = 0;
};

/// Integrates y' = f(y) over [0, T] with N uniform steps.
template <class Field>
Trajectory integrate(Field&& f, const Eigen::VectorXd& y0, double T, int N,
                     const IntegrateOptions& opts) {
    if (N < 1) {
        throw InvalidInput("integrate: N must be >= 1");
    }
    if (!opts.fixed_stages && !opts.lambda_max) {
        throw InvalidInput("integrate: need fixed_stages or a lambda_max estimator");
    }
    const int order = (opts.method == IvpMethod::cheb1) ? 1 : 2;
    const double eta = opts.eta.value_or(order == 1 ? kDefaultEtaOrder1 : kDefaultEtaOrder2);
    const double h = T / N;

    Trajectory traj;
    traj.t.resize(static_cast<std::size_t>(N) + 1);
    traj.states.reserve(static_cast<std::size_t>(N) + 1);
    traj.states.push_back(y0);
    traj.stages_used.reserve(N);
    for (int k = 0; k <= N; ++k) traj.t[k] = k * h;

    for (int k = 0; k < N; ++k) {
        const int s = opts.fixed_stages
                          ? *opts.fixed_stages
                          : select_stages(h, opts.lambda_max(traj.states.back()), order, eta);
        try {
            IvpStepOutput step;
            if (opts.method == IvpMethod::classical_rkc) {
                step = classical_rkc_step(f, traj.states.back(), h, classical_rkc_coeffs(s, eta),
                                          opts.store_stages);
            } else {
                const StabilizedCoefficients& c = cached_coeffs(order, s, eta);
                step = (order == 1) ? cheb1_step(f, traj.states.back(), h, c, opts.store_stages)
                                    : rkc2_step(f, traj.states.back(), h, c, opts.store_stages);
            }
            traj.total_evals += step.evals;
            traj.stages_used.push_back(s);
            if (opts.store_stages) traj.stages.push_back(std::move(step.internal_stages));
            traj.states.push_back(std::move(step.next_state));
        } catch (const OverflowError& e) {
            throw OverflowError("integrate: overflow at step " + std::to_string(k) + ", stage " +
                                    std::to_string(e.stage()),
                                k, e.stage());
        }
    }
    return traj;
}

}  // namespace rkc
