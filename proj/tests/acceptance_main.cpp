// Acceptance suite: one self-contained check per criterion, each printing
// a single PASS/FAIL line with the measured quantity and its tolerance.
// Exit code is the number of failed criteria.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rkc/chebyshev.hpp"
#include "rkc/coefficients.hpp"
#include "rkc/ivp.hpp"
#include "rkc/problems.hpp"
#include "rkc/solver.hpp"
#include "rkc/stability.hpp"
#include "rkc/sweeps.hpp"
#include "rkc/tableau.hpp"
#include "support/oracles.hpp"

using namespace rkc;

namespace {

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("[%s] %s  %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    if (!pass) ++failures;
}

double fit_slope(const std::vector<double>& logh, const std::vector<double>& loge) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(logh.size());
    for (int i = 0; i < n; ++i) {
        sx += logh[i];
        sy += loge[i];
        sxx += logh[i] * logh[i];
        sxy += logh[i] * loge[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// 1. recurrence sweeps vs the unrolled standard-form optimality system
void criterion_01() {
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int order : {1, 2}) {
        const double eta = (order == 1) ? 0.05 : 0.15;
        for (int s = 2; s <= 6; ++s) {
            for (int N = 1; N <= 4; ++N) {
                const ControlProblem p = test::random_smooth_problem(rng, 3, 2);
                const ControlStages U = test::random_controls(rng, N, s, 2, 0.5);
                const auto c = (order == 1) ? cheb1_coeffs(s, eta) : rkc2_coeffs(s, eta);

                SweepRecord rec = make_record(p, N, s);
                forward_sweep(p, U, c, rec);
                if (order == 1) {
                    costate_sweep_cheb(p, rec, c);
                } else {
                    costate_sweep_rkc(p, rec, c);
                }

                const ButcherTableau t = unroll_tableau(c);
                SweepRecord oracle = make_record(p, N, s, 1);
                tableau_forward_sweep(p, t, U, oracle);
                tableau_costate_sweep(p, double_adjoint(t), oracle);

                for (int k = 0; k <= N; ++k) {
                    worst = std::max(
                        worst, (rec.states[k] - oracle.states[k]).cwiseAbs().maxCoeff());
                    worst = std::max(
                        worst, (rec.costates[k] - oracle.costates[k]).cwiseAbs().maxCoeff());
                }
            }
        }
    }
    report("01 tableau-oracle-equivalence", worst <= 1e-10,
           fmt("max state/costate deviation %.2e (tol 1e-10)", worst));
}

// 2. stability-function identity across the three evaluation routes
void criterion_02() {
    double worst_three = 0.0;  // s <= 8, all three routes
    double worst_two = 0.0;    // s <= 30, recurrence vs closed form
    for (int order : {1, 2}) {
        for (double eta :
            order == 1 ? std::vector<double>{0.0, 0.05} : std::vector<double>{0.0, 0.15}) {
            for (int s = order; s <= 30; ++s) {
                if (order == 2 && s < 2) continue;
                const auto c = (order == 1) ? cheb1_coeffs(s, eta) : rkc2_coeffs(s, eta);
                const double beta = (order == 1)
                                        ? (2.0 - 4.0 * eta / 3.0) * s * s
                                        : (eta == 0.0 ? (2.0 / 3.0) * (s * s - 1.0)
                                                      : 0.6 * s * s);
                const StabilityMethod m =
                    (order == 1) ? StabilityMethod::cheb1 : StabilityMethod::rkc2_new;
                ButcherTableau t;
                if (s <= 8) t = unroll_tableau(c);
                for (int g = 0; g <= 200; ++g) {
                    const double z = -beta * g / 200.0;
                    const double recurrence = stage_stability(m, s, eta, z).final_value;
                    const double ratio =
                        cheb_eval(s, c.omega0 + c.omega * z).value / cheb_eval(s, c.omega0).value;
                    const double closed =
                        (order == 1) ? ratio : c.a_final + c.b_final_T * ratio;
                    worst_two = std::max(worst_two, std::abs(recurrence - closed));
                    if (s <= 8) {
                        const double det = stability_function(t, z);
                        worst_three = std::max(worst_three, std::abs(recurrence - det));
                        worst_three = std::max(worst_three, std::abs(closed - det));
                    }
                }
            }
        }
    }
    report("02 stability-function-identity", worst_three <= 1e-10 && worst_two <= 1e-10,
           fmt("three-route %.2e, two-route %.2e (tol 1e-10)", worst_three, worst_two));
}

// 3. internal-stage bounds of the undamped double adjoints
void criterion_03() {
    double worst = 0.0;
    for (int s = 1; s <= 30; ++s) {
        worst = std::max(worst, scan_internal_bound(StabilityMethod::cheb1_da, s, 0.0,
                                                    -2.0 * s * s, 0.0, 20 * s * s));
    }
    for (int s = 2; s <= 30; ++s) {
        worst = std::max(worst,
                         scan_internal_bound(StabilityMethod::rkc2_da, s, 0.0,
                                             -(2.0 / 3.0) * (s * s - 1.0), 0.0, 20 * s * s));
    }
    report("03 internal-stage-bounds", worst <= 1.0 + 1e-12,
           fmt("max_i max_z |R_{s,i}(z)| = %.15f (bound 1 + 1e-12)", worst));
}

// 4. gamma tables: induction == closed form, rows normalized, expansion
void criterion_04() {
    bool tables_equal = true;
    bool rows_ok = true;
    for (int s = 1; s <= 60; ++s) {
        const GammaTable t = gamma_table(s);
        tables_equal = tables_equal && (t.by_induction == t.by_closed_form);
        for (int i = 0; i < s; ++i) {
            long long sum = 0;
            for (long long v : t.by_induction[i]) sum += v;
            rows_ok = rows_ok && (sum == i + 1);
        }
    }
    const int s = 12;
    std::vector<double> grid_cheb, grid_rkc;
    for (int g = 0; g < 500; ++g) {
        grid_cheb.push_back(-2.0 * s * s * g / 499.0);
        grid_rkc.push_back(-(2.0 / 3.0) * (s * s - 1.0) * g / 499.0);
    }
    const double res_cheb = chebyshev_expansion_check(StabilityMethod::cheb1_da, s, grid_cheb);
    const double res_rkc = chebyshev_expansion_check(StabilityMethod::rkc2_da, s, grid_rkc);
    const double residual = std::max(res_cheb, res_rkc);
    report("04 gamma-tables", tables_equal && rows_ok && residual <= 1e-9,
           std::string(tables_equal && rows_ok ? "tables equal, " : "tables UNEQUAL, ") +
               fmt("expansion residual %.2e (tol 1e-9)", residual));
}

// 5. ODE orders on a nonstiff scalar problem
void criterion_05() {
    const auto field = [](const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, y(0) * (1.0 - y(0))).eval();
    };
    const auto exact = [](double t) { return 0.2 / (0.2 + 0.8 * std::exp(-t)); };
    const double T = 4.0;
    bool pass = true;
    std::string detail;
    for (int order : {1, 2}) {
        std::vector<double> logh, loge;
        for (int i = 3; i <= 9; ++i) {
            const double h = std::pow(2.0, -i);
            const int N = static_cast<int>(std::llround(T / h));
            IntegrateOptions opts;
            opts.method = (order == 1) ? IvpMethod::cheb1 : IvpMethod::rkc2;
            opts.fixed_stages = 5;
            const auto traj = integrate(field, Eigen::VectorXd::Constant(1, 0.2), T, N, opts);
            double err = 0.0;
            for (int k = 0; k <= N; ++k) {
                err = std::max(err, std::abs(traj.states[k](0) - exact(traj.t[k])));
            }
            logh.push_back(std::log(h));
            loge.push_back(std::log(err));
        }
        const double slope = fit_slope(logh, loge);
        pass = pass && std::abs(slope - order) <= 0.1;
        detail += fmt("order-%g slope %.3f  ", order, slope);
    }
    report("05 ode-orders", pass, detail + "(tol +-0.1)");
}

struct HagerLadder {
    double state_slope = 0.0;
    double control_slope = 0.0;
    bool converged = true;
};

HagerLadder hager_ladder(Method method, int stages) {
    const ControlProblem p = hager_problem();
    HagerLadder out;
    std::vector<double> logh, le_state, le_control;
    for (int i = 3; i <= 7; ++i) {
        const int N = 1 << i;
        SolverConfig cfg;
        cfg.method = method;
        cfg.steps = N;
        cfg.stage_policy.fixed_stages = stages;
        const SolveReport rep = solve(p, cfg);
        out.converged = out.converged && rep.converged;
        if (!rep.converged) break;
        const auto controls = grid_controls(p, rep.final_record, StationaritySolver{});
        double es = 0.0, ec = 0.0;
        for (int k = 0; k <= N; ++k) {
            const double t = rep.final_record.grid[k];
            es = std::max(es, std::abs(rep.final_record.states[k](1) - hager_x_star(t)));
            ec = std::max(ec, std::abs(controls[k](0) - hager_u_star(t)));
        }
        logh.push_back(std::log(1.0 / N));
        le_state.push_back(std::log(es));
        le_control.push_back(std::log(ec));
    }
    if (out.converged) {
        out.state_slope = fit_slope(logh, le_state);
        out.control_slope = fit_slope(logh, le_control);
    }
    return out;
}

// 6. optimal-control orders on the analytic benchmark
void criterion_06() {
    const HagerLadder cheb = hager_ladder(Method::cheb1, 5);
    const HagerLadder rkc = hager_ladder(Method::rkc2, 5);
    const bool pass = cheb.converged && rkc.converged &&
                      std::abs(cheb.state_slope - 1.0) <= 0.15 &&
                      std::abs(cheb.control_slope - 1.0) <= 0.15 &&
                      std::abs(rkc.state_slope - 2.0) <= 0.15 &&
                      std::abs(rkc.control_slope - 2.0) <= 0.15;
    report("06 oc-orders", pass,
           fmt("cheb1 slopes %.3f/%.3f, ", cheb.state_slope, cheb.control_slope) +
               fmt("rkc2 slopes %.3f/%.3f (tol +-0.15)", rkc.state_slope, rkc.control_slope));
}

// 7. order reduction of the naive same-tableau costate sweep
void criterion_07() {
    const HagerLadder naive = hager_ladder(Method::rkc2_naive, 5);
    const bool pass = naive.converged && std::abs(naive.control_slope - 1.0) <= 0.2;
    report("07 order-reduction-witness", pass,
           fmt("naive control slope %.3f (target 1 +- 0.2), state slope %.3f",
               naive.control_slope, naive.state_slope));
}

// 8. stiff stage counts and convergence
void criterion_08() {
    const double lambda = 1e3;  // eps = 1e-3
    const int expected[] = {40, 28, 20, 14, 10};
    bool counts_ok = true;
    for (int i = 0; i <= 4; ++i) {
        counts_ok = counts_ok &&
                    (select_stages(std::pow(2.0, -i), lambda, 2, 0.15) == expected[i]);
    }
    const int s5 = select_stages(std::pow(2.0, -5), lambda, 2, 0.15);
    counts_ok = counts_ok && (s5 == 7 || s5 == 8);
    counts_ok = counts_ok && (select_stages(std::pow(2.0, -7), lambda, 2, 0.15) == 4);

    // slope 2 +- 0.2 against the h = 2^-7 reference for both epsilons;
    // eps = 1e-3 with the adaptive stage counts above, eps = 1e-1 with a
    // pinned s = 5 so the error constant stays uniform over the ladder
    auto stiff_slope = [](double eps, std::optional<int> fixed) {
        const ControlProblem p = stiff_sp_problem(eps);
        SolverConfig rc;
        rc.method = Method::rkc2;
        rc.steps = 128;
        rc.stage_policy.fixed_stages = fixed;
        const SolveReport ref = solve(p, rc);
        std::vector<double> logh, loge;
        for (int i = 0; i <= 5; ++i) {
            const int N = 1 << i;
            SolverConfig cfg;
            cfg.method = Method::rkc2;
            cfg.steps = N;
            cfg.stage_policy.fixed_stages = fixed;
            const SolveReport rep = solve(p, cfg);
            if (!rep.converged || !ref.converged) return 0.0;
            double err = 0.0;
            const int stride = 128 / N;
            for (int k = 0; k <= N; ++k) {
                err = std::max(err, (rep.final_record.states[k] -
                                     ref.final_record.states[k * stride])
                                        .cwiseAbs()
                                        .maxCoeff());
            }
            logh.push_back(std::log(1.0 / N));
            loge.push_back(std::log(err));
        }
        return fit_slope(logh, loge);
    };
    const double slope_mild = stiff_slope(1e-1, 5);
    const double slope_stiff = stiff_slope(1e-3, std::nullopt);
    const bool pass = counts_ok && std::abs(slope_mild - 2.0) <= 0.2 &&
                      std::abs(slope_stiff - 2.0) <= 0.2;
    report("08 stiff-stage-counts-and-order", pass,
           fmt("counts ok %g, slopes eps=1e-1: %.3f, eps=1e-3: %.3f (tol +-0.2)",
               static_cast<double>(counts_ok), slope_mild, slope_stiff));
}

// 9. commuting diagram on tiny instances
void criterion_09() {
    const ControlProblem p = hager_problem();
    double worst = 0.0;
    bool ok = true;
    struct Instance {
        Method method;
        int N;
        int s;
    };
    for (const Instance inst : {Instance{Method::cheb1, 2, 2}, Instance{Method::rkc2, 4, 3}}) {
        SolverConfig cfg;
        cfg.method = inst.method;
        cfg.steps = inst.N;
        cfg.stage_policy.fixed_stages = inst.s;
        cfg.tol = 1e-11;
        const SolveReport rep = solve(p, cfg);
        const DirectOracleResult oracle =
            direct_discrete_oracle(p, inst.method, inst.N, inst.s);
        ok = ok && rep.converged && oracle.conclusive;
        if (ok) {
            worst = std::max(worst, sup_difference(rep.final_record.controls, oracle.controls));
        }
    }
    report("09 commuting-diagram", ok && worst <= 1e-5,
           fmt("max control gap %.2e (tol 1e-5)", worst));
}

// 10. Burgers benchmark properties
void criterion_10() {
    // (a) stage count at the reference resolution, (b) monotone cost
    // history
    const BurgersGrid grid99 = make_burgers_grid(99, 0.1, 0.02, 0.01);
    const ControlProblem p99 = burgers_problem(grid99, 2.5);
    SolverConfig cfg99;
    cfg99.method = Method::rkc2;
    cfg99.steps = 30;
    cfg99.stage_policy.refresh_each_iteration = true;
    const SolveReport rep99 = solve(p99, cfg99);
    const int s99 = rep99.stage_count_per_step.empty() ? 0 : rep99.stage_count_per_step.front();
    const bool stages_ok = rep99.converged && (s99 == 23 || s99 == 24);
    bool monotone = true;
    for (std::size_t i = 1; i < rep99.cost_history.size(); ++i) {
        monotone = monotone && rep99.cost_history[i] <= rep99.cost_history[i - 1] + 1e-12;
    }

    // (d) explicit Euler cost factor at dx = 1/100
    const double factor = euler_cost_factor(2.5 / 30.0, s99, grid99.dx);

    // (c) self-convergence at M = 49
    const BurgersGrid grid49 = make_burgers_grid(49, 0.1, 0.02, 0.02);
    const ControlProblem p49 = burgers_problem(grid49, 2.5);
    auto solve49 = [&](int steps, Method m) {
        SolverConfig cfg;
        cfg.method = m;
        cfg.steps = steps;
        cfg.stage_policy.refresh_each_iteration = (m != Method::dirk2);
        return solve(p49, cfg);
    };
    const SolveReport ref = solve49(256, Method::rkc2);
    std::vector<double> logh, loge;
    std::vector<SolveReport> ladder;
    bool conv_ok = ref.converged;
    for (int i = 3; i <= 5; ++i) {
        const int N = 1 << i;
        const SolveReport rep = solve49(N, Method::rkc2);
        conv_ok = conv_ok && rep.converged;
        if (!conv_ok) break;
        double err = 0.0;
        const int stride = 256 / N;
        for (int k = 0; k <= N; ++k) {
            err = std::max(err, (rep.final_record.states[k] -
                                 ref.final_record.states[k * stride])
                                    .cwiseAbs()
                                    .maxCoeff());
        }
        logh.push_back(std::log(2.5 / N));
        loge.push_back(std::log(err));
        ladder.push_back(rep);
    }
    const double slope = conv_ok ? fit_slope(logh, loge) : 0.0;

    // (e) DIRK2 comparator at matching steps stays within 3x the RKC
    // discretization error
    bool dirk_ok = false;
    double dirk_ratio = 0.0;
    if (conv_ok) {
        const int N = 8;
        const SolveReport dirk = solve49(N, Method::dirk2);
        if (dirk.converged) {
            double rkc_err = std::exp(loge.front());
            double gap = 0.0;
            for (int k = 0; k <= N; ++k) {
                gap = std::max(gap, (dirk.final_record.states[k] -
                                     ladder.front().final_record.states[k])
                                        .cwiseAbs()
                                        .maxCoeff());
            }
            dirk_ratio = gap / rkc_err;
            dirk_ok = dirk_ratio <= 3.0;
        }
    }

    const bool pass = stages_ok && monotone && factor >= 50.0 && conv_ok &&
                      std::abs(slope - 2.0) <= 0.3 && dirk_ok;
    report("10 burgers-benchmark", pass,
           fmt("s=%g, euler factor %.1f, self-slope %.3f, ", s99, factor, slope) +
               fmt("dirk gap ratio %.2f (<=3), monotone %g", dirk_ratio,
                   static_cast<double>(monotone)));
}

// 11. work scaling in function evaluations
void criterion_11() {
    std::vector<double> logeps, logevals;
    bool conv = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const ControlProblem p = stiff_sp_problem(eps);
        SolverConfig cfg;
        cfg.method = Method::rkc2;
        cfg.steps = 4;
        const SolveReport rep = solve(p, cfg);
        conv = conv && rep.converged;
        logeps.push_back(std::log(eps));
        logevals.push_back(std::log(static_cast<double>(rep.total_f_evals)));
    }
    const double slope = conv ? fit_slope(logeps, logevals) : 0.0;
    report("11 work-scaling", conv && std::abs(slope + 0.5) <= 0.15,
           fmt("f-evals vs eps slope %.3f (target -0.5 +- 0.15)", slope));
}

// 12. gradient consistency of every shipped problem
void criterion_12() {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    const std::vector<ControlProblem> problems = {
        hager_problem(), stiff_sp_problem(1e-2), burgers_problem(make_burgers_grid(12), 1.0)};
    for (const ControlProblem& p : problems) {
        for (int t = 0; t < 100; ++t) {
            auto randv = [&](int n) {
                return Eigen::VectorXd::NullaryExpr(n, [&]() { return unit(rng); }).eval();
            };
            const Eigen::VectorXd u = randv(p.control_dim);
            const Eigen::VectorXd y = randv(p.state_dim);
            const Eigen::VectorXd pv = randv(p.state_dim);
            const Eigen::VectorXd ga = p.adjoint_product(u, y, pv);
            const Eigen::VectorXd gf = test::fd_adjoint_product(p, u, y, pv);
            worst = std::max(worst, (ga - gf).cwiseAbs().maxCoeff() /
                                        (1.0 + ga.cwiseAbs().maxCoeff()));
            const Eigen::VectorXd ca = p.control_gradient(u, y, pv);
            const Eigen::VectorXd cf = test::fd_control_gradient(p, u, y, pv);
            worst = std::max(worst, (ca - cf).cwiseAbs().maxCoeff() /
                                        (1.0 + ca.cwiseAbs().maxCoeff()));
        }
    }
    report("12 gradient-consistency", worst <= 1e-5,
           fmt("max relative deviation %.2e (tol 1e-5)", worst));
}

}  // namespace

int main() {
    criterion_01();
    criterion_02();
    criterion_03();
    criterion_04();
    criterion_05();
    criterion_06();
    criterion_07();
    criterion_08();
    criterion_09();
    criterion_10();
    criterion_11();
    criterion_12();
    if (failures == 0) {
        std::printf("all 12 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
