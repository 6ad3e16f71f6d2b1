#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "rkc/chebyshev.hpp"
#include "rkc/errors.hpp"
#include "rkc/tableau.hpp"

namespace rkc {

/// Recommended damping values. The order-two interval estimate
/// [-0.65 s^2, 0] used by select_stages assumes eta = 0.15.
inline constexpr double kDefaultEtaOrder1 = 0.05;
inline constexpr double kDefaultEtaOrder2 = 0.15;

/// Recurrence coefficients of the stabilized methods together with the
/// costate rescaling factors alpha.
///
/// Vectors are indexed by the 1-based stage subscript of the formulas
/// (slot 0 unused): mu[i] = mu_i for i = 1..s, nu[i] = nu_i for
/// i = 2..s, alpha[j] = alpha_j for j = 1..s.
struct StabilizedCoefficients {
    int s = 0;
    double eta = 0.0;
    int order = 1;
    double omega0 = 1.0;
    double omega = 1.0;    // omega_1 for order 1, omega_2 for order 2
    std::vector<double> mu;
    std::vector<double> nu;
    double a_final = 0.0;    // a_s; 0 for order 1
    double b_final_T = 1.0;  // b_s T_s(omega0); 1 for order 1
    std::vector<double> alpha;
};

/// Coefficients of the classical RKC formulation. Indexing as above:
/// mu_prime/nu_prime/kappa_prime valid for i = 2..s, a and b for
/// i = 0..s (b_0 = b_1 = b_2 by the suggested convention).
struct ClassicalRkcCoefficients {
    int s = 0;
    double eta = 0.0;
    double omega0 = 1.0;
    double omega2 = 1.0;
    std::vector<double> mu_prime;
    std::vector<double> nu_prime;
    std::vector<double> kappa_prime;
    std::vector<double> a;
    std::vector<double> b;
};

namespace detail {

// alpha_s given; alpha_{s-1} = nu_s alpha_s;
// alpha_{s-j} = nu_{s-j+1} alpha_{s-j+1} + (1 - nu_{s-j+2}) alpha_{s-j+2}.
inline std::vector<double> alpha_from_induction(int s, const std::vector<double>& nu,
                                                double alpha_s) {
    std::vector<double> alpha(static_cast<std::size_t>(s) + 1, 0.0);
    alpha[s] = alpha_s;
    if (s >= 2) {
        alpha[s - 1] = nu[s] * alpha[s];
    }
    for (int j = 2; j <= s - 1; ++j) {
        const int i = s - j;
        alpha[i] = nu[i + 1] * alpha[i + 1] + (1.0 - nu[i + 2]) * alpha[i + 2];
    }
    return alpha;
}

}  // namespace detail

/// Coefficients of the order-one Chebyshev method for given stage count
/// and damping: omega0 = 1 + eta/s^2, omega1 = T_s(omega0)/T'_s(omega0),
/// mu_1 = omega1/omega0, mu_i = 2 omega1 T_{i-1}(omega0)/T_i(omega0),
/// nu_i = 2 omega0 T_{i-1}(omega0)/T_i(omega0), alpha_s = 1.
inline StabilizedCoefficients cheb1_coeffs(int s, double eta) {
    if (s < 1) {
        throw InvalidInput("cheb1_coeffs: stage count must be >= 1");
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw InvalidInput("cheb1_coeffs: eta must be finite and nonnegative");
    }
    StabilizedCoefficients c;
    c.s = s;
    c.eta = eta;
    c.order = 1;
    c.omega0 = 1.0 + eta / (static_cast<double>(s) * s);
    const ChebEval ts = cheb_eval(s, c.omega0);
    c.omega = ts.value / ts.first_derivative;
    c.mu.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.nu.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.mu[1] = c.omega / c.omega0;
    for (int i = 2; i <= s; ++i) {
        const double t_prev = cheb_eval(i - 1, c.omega0).value;
        const double t_cur = cheb_eval(i, c.omega0).value;
        c.mu[i] = 2.0 * c.omega * t_prev / t_cur;
        c.nu[i] = 2.0 * c.omega0 * t_prev / t_cur;
    }
    c.a_final = 0.0;
    c.b_final_T = 1.0;
    c.alpha = detail::alpha_from_induction(s, c.nu, 1.0);
    return c;
}

/// Coefficients of the order-two RKC method in the two-term recurrence
/// formulation: omega2 = T'_s(omega0)/T''_s(omega0),
/// b_s = T''_s(omega0)/T'_s(omega0)^2, a_s = 1 - b_s T_s(omega0),
/// mu/nu as for order one with omega2 in place of omega1,
/// alpha_s = b_s T_s(omega0).
inline StabilizedCoefficients rkc2_coeffs(int s, double eta) {
    if (s < 2) {
        throw InvalidInput("rkc2_coeffs: stage count must be >= 2 for order two");
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw InvalidInput("rkc2_coeffs: eta must be finite and nonnegative");
    }
    StabilizedCoefficients c;
    c.s = s;
    c.eta = eta;
    c.order = 2;
    c.omega0 = 1.0 + eta / (static_cast<double>(s) * s);
    const ChebEval ts = cheb_eval(s, c.omega0);
    c.omega = ts.first_derivative / ts.second_derivative;
    const double b_s = ts.second_derivative / (ts.first_derivative * ts.first_derivative);
    c.b_final_T = b_s * ts.value;
    c.a_final = 1.0 - c.b_final_T;
    c.mu.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.nu.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.mu[1] = c.omega / c.omega0;
    for (int i = 2; i <= s; ++i) {
        const double t_prev = cheb_eval(i - 1, c.omega0).value;
        const double t_cur = cheb_eval(i, c.omega0).value;
        c.mu[i] = 2.0 * c.omega * t_prev / t_cur;
        c.nu[i] = 2.0 * c.omega0 * t_prev / t_cur;
    }
    c.alpha = detail::alpha_from_induction(s, c.nu, c.b_final_T);
    return c;
}

/// Classical RKC coefficients: b_i = T''_i(omega0)/T'_i(omega0)^2 and
/// a_i = 1 - b_i T_i(omega0) for i >= 2, with b_0 = b_1 = b_2;
/// mu'_i = 2 b_i omega2 / b_{i-1}, nu'_i = 2 b_i omega0 / b_{i-1},
/// kappa'_i = -b_i / b_{i-2}.
inline ClassicalRkcCoefficients classical_rkc_coeffs(int s, double eta) {
    if (s < 2) {
        throw InvalidInput("classical_rkc_coeffs: stage count must be >= 2");
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw InvalidInput("classical_rkc_coeffs: eta must be finite and nonnegative");
    }
    ClassicalRkcCoefficients c;
    c.s = s;
    c.eta = eta;
    c.omega0 = 1.0 + eta / (static_cast<double>(s) * s);
    const ChebEval ts = cheb_eval(s, c.omega0);
    c.omega2 = ts.first_derivative / ts.second_derivative;
    c.a.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.b.assign(static_cast<std::size_t>(s) + 1, 0.0);
    for (int i = 2; i <= s; ++i) {
        const ChebEval ti = cheb_eval(i, c.omega0);
        c.b[i] = ti.second_derivative / (ti.first_derivative * ti.first_derivative);
        c.a[i] = 1.0 - c.b[i] * ti.value;
    }
    c.b[0] = c.b[1] = c.b[2];
    c.a[0] = 1.0 - c.b[0];
    c.a[1] = 1.0 - c.b[1] * c.omega0;
    c.mu_prime.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.nu_prime.assign(static_cast<std::size_t>(s) + 1, 0.0);
    c.kappa_prime.assign(static_cast<std::size_t>(s) + 1, 0.0);
    for (int i = 2; i <= s; ++i) {
        c.mu_prime[i] = 2.0 * c.b[i] * c.omega2 / c.b[i - 1];
        c.nu_prime[i] = 2.0 * c.b[i] * c.omega0 / c.b[i - 1];
        c.kappa_prime[i] = -c.b[i] / c.b[i - 2];
    }
    return c;
}

/// Adaptive stage count covering the stiff spectrum:
///   order 1: s = [sqrt((h lambda_max + 1.5) / (2 - 4 eta / 3)) + 0.5]
///   order 2: s = [sqrt((h lambda_max + 1.5) / 0.65) + 0.5]
/// where [.] rounds half up. Clamped to >= 1 (order 1) or >= 2 (order 2).
inline int select_stages(double h, double lambda_max, int order, double eta) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidInput("select_stages: h must be positive and finite");
    }
    if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) {
        throw InvalidInput("select_stages: lambda_max must be nonnegative and finite");
    }
    if (!(eta >= 0.0)) {
        throw InvalidInput("select_stages: eta must be nonnegative");
    }
    double x = 0.0;
    int minimum = 1;
    if (order == 1) {
        const double divisor = 2.0 - 4.0 * eta / 3.0;
        if (!(divisor > 0.0)) {
            throw InvalidInput("select_stages: eta too large for order 1 formula");
        }
        x = std::sqrt((h * lambda_max + 1.5) / divisor) + 0.5;
    } else if (order == 2) {
        x = std::sqrt((h * lambda_max + 1.5) / 0.65) + 0.5;
        minimum = 2;
    } else {
        throw InvalidInput("select_stages: order must be 1 or 2");
    }
    const int rounded = static_cast<int>(std::floor(x + 0.5));
    return std::max(minimum, rounded);
}

/// Process-wide coefficient cache keyed by (order, s, eta). Safe for
/// concurrent readers with single-writer insertion.
inline const StabilizedCoefficients& cached_coeffs(int order, int s, double eta) {
    using Key = std::tuple<int, int, std::uint64_t>;
    static std::shared_mutex mutex;
    static std::map<Key, std::unique_ptr<const StabilizedCoefficients>> cache;

    std::uint64_t eta_bits = 0;
    static_assert(sizeof(eta_bits) == sizeof(eta));
    std::memcpy(&eta_bits, &eta, sizeof(eta));
    const Key key{order, s, eta_bits};
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto fresh = std::make_unique<const StabilizedCoefficients>(
        order == 1 ? cheb1_coeffs(s, eta) : rkc2_coeffs(s, eta));
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(fresh));
    return *it->second;
}

/// Unrolls the recurrence into standard Runge-Kutta form. Oracle use
/// only: the standard form is round-off unstable for large s.
///
/// Stage i of the tableau is the recurrence node y_{k_{i-1}} (the points
/// where f is evaluated), so A rows follow
///   row_{i+1} = nu_i row_i + (1 - nu_i) row_{i-1} + mu_i e_i
/// and the weight vector comes from the final node combined with the
/// method's closing rule.
inline ButcherTableau unroll_tableau(const StabilizedCoefficients& c) {
    const int s = c.s;
    ButcherTableau t;
    t.A = Eigen::MatrixXd::Zero(s, s);
    Eigen::VectorXd w(s);
    if (s == 1) {
        w(0) = c.mu[1];
    } else {
        t.A(1, 0) = c.mu[1];
        for (int i = 2; i <= s - 1; ++i) {
            t.A.row(i) = c.nu[i] * t.A.row(i - 1) + (1.0 - c.nu[i]) * t.A.row(i - 2);
            t.A(i, i - 1) += c.mu[i];
        }
        w = (c.nu[s] * t.A.row(s - 1) + (1.0 - c.nu[s]) * t.A.row(s - 2)).transpose();
        w(s - 1) += c.mu[s];
    }
    t.b = (c.order == 1) ? w : Eigen::VectorXd(c.b_final_T * w);
    return t;
}

}  // namespace rkc
