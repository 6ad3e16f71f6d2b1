#include "rkc/sweeps.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "rkc/problems.hpp"
#include "rkc/solver.hpp"
#include "support/oracles.hpp"

using namespace rkc;

namespace {

ControlProblem scalar_linear(double lambda) {
    ControlProblem p;
    p.state_dim = 1;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.initial_state = Eigen::VectorXd::Constant(1, 1.0);
    p.dynamics = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd& y) {
        return (lambda * y).eval();
    };
    p.adjoint_product = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd&,
                                 const Eigen::VectorXd& pv) { return (lambda * pv).eval(); };
    p.control_gradient = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
    p.cost = [](const Eigen::VectorXd& y) { return y(0); };
    p.cost_gradient = [](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 1.0).eval();
    };
    p.lambda_max_estimator = [lambda](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return std::abs(lambda);
    };
    return p;
}

void run_sweeps(const ControlProblem& p, const ControlStages& U,
                const StabilizedCoefficients& c, SweepRecord& rec) {
    forward_sweep(p, U, c, rec);
    if (c.order == 1) {
        costate_sweep_cheb(p, rec, c);
    } else {
        costate_sweep_rkc(p, rec, c);
    }
}

}  // namespace

TEST_CASE("zero control and f = u keeps the state constant", "[sweeps]") {
    ControlProblem p;
    p.state_dim = 1;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.initial_state = Eigen::VectorXd::Constant(1, 0.4);
    p.dynamics = [](const Eigen::VectorXd& u, const Eigen::VectorXd&) { return u; };
    p.adjoint_product = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
    p.cost = [](const Eigen::VectorXd& y) { return y(0); };
    p.cost_gradient = [](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 1.0).eval();
    };

    const auto c = cheb1_coeffs(4, 0.05);
    SweepRecord rec = make_record(p, 3, 4);
    const double cost = forward_sweep(p, constant_controls(3, 4, Eigen::VectorXd::Zero(1)), c, rec);
    CHECK_THAT(cost, Catch::Matchers::WithinAbs(0.4, 1e-14));
    for (const auto& y : rec.states) {
        CHECK_THAT(y(0), Catch::Matchers::WithinAbs(0.4, 1e-14));
    }
}

TEST_CASE("y-independent dynamics propagate the terminal costate exactly", "[sweeps]") {
    // grad_y H vanishes, so every p_k must equal p_N; this exercises the
    // alpha-weight and a_s bookkeeping of the closing steps.
    ControlProblem p = scalar_linear(0.0);
    p.dynamics = [](const Eigen::VectorXd& u, const Eigen::VectorXd&) {
        return (0.3 * u).eval();
    };
    p.adjoint_product = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
    for (int order : {1, 2}) {
        for (int s : {2, 3, 7, 16}) {
            const auto c = (order == 1) ? cheb1_coeffs(s, 0.05) : rkc2_coeffs(s, 0.15);
            SweepRecord rec = make_record(p, 4, s);
            run_sweeps(p, constant_controls(4, s, Eigen::VectorXd::Constant(1, 0.7)), c, rec);
            for (int k = 0; k <= 4; ++k) {
                REQUIRE(std::abs(rec.costates[k](0) - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("undamped costate sweep reduces to the printed recurrence", "[sweeps]") {
    // independent re-implementation of the eta = 0 double adjoint with
    // its literal coefficients 2j/((j+1)s^2), 2j/(j+1), (1-j)/(j+1)
    for (int s : {2, 3, 5, 9}) {
        for (double z : {-0.8, -0.3, 0.0}) {
            const ControlProblem p = scalar_linear(z);  // h = 1, so h*lambda = z
            const auto c = cheb1_coeffs(s, 0.0);
            SweepRecord rec = make_record(p, 1, s);
            run_sweeps(p, constant_controls(1, s, Eigen::VectorXd::Zero(1)), c, rec);

            std::vector<double> node(s + 1, 0.0);
            const double s2 = static_cast<double>(s) * s;
            node[s] = 1.0;
            if (s >= 2) node[s - 1] = node[s] + z / s2 * node[s];
            for (int j = 2; j <= s - 1; ++j) {
                node[s - j] = 2.0 * j / ((j + 1.0) * s2) * z * node[s - j + 1] +
                              2.0 * j / (j + 1.0) * node[s - j + 1] +
                              (1.0 - j) / (j + 1.0) * node[s - j + 2];
            }
            node[0] = (s >= 2) ? z / s * node[1] + s * node[1] + (1.0 - s) * node[2]
                               : (1.0 + z) * node[1];
            for (int i = 1; i <= s; ++i) {
                REQUIRE(std::abs(rec.costate_stages[0][i - 1](0) - node[i]) <= 1e-12);
            }
            REQUIRE(std::abs(rec.costates[0](0) - node[0]) <= 1e-12);
        }
    }
}

TEST_CASE("sweeps match the unrolled standard-form optimality system", "[sweeps]") {
    // the central oracle equivalence: recurrences vs forward tableau plus
    // double adjoint on random smooth problems
    std::mt19937 rng(101);
    for (int order : {1, 2}) {
        const double eta = (order == 1) ? 0.05 : 0.15;
        for (int s = 2; s <= 6; ++s) {
            for (int N = 1; N <= 4; ++N) {
                const ControlProblem p = test::random_smooth_problem(rng, 3, 2);
                const ControlStages U = test::random_controls(rng, N, s, 2, 0.5);
                const auto c = (order == 1) ? cheb1_coeffs(s, eta) : rkc2_coeffs(s, eta);

                SweepRecord rec = make_record(p, N, s);
                run_sweeps(p, U, c, rec);

                const ButcherTableau t = unroll_tableau(c);
                SweepRecord oracle = make_record(p, N, s, 1);
                tableau_forward_sweep(p, t, U, oracle);
                tableau_costate_sweep(p, double_adjoint(t), oracle);

                for (int k = 0; k <= N; ++k) {
                    REQUIRE((rec.states[k] - oracle.states[k]).cwiseAbs().maxCoeff() <= 1e-10);
                    REQUIRE((rec.costates[k] - oracle.costates[k]).cwiseAbs().maxCoeff() <=
                            1e-10);
                }
                for (int k = 0; k < N; ++k) {
                    for (int i = 0; i < s; ++i) {
                        REQUIRE((rec.state_stages[k][i] - oracle.state_stages[k][i + 1])
                                    .cwiseAbs()
                                    .maxCoeff() <= 1e-10);
                        REQUIRE((rec.costate_stages[k][i] - oracle.costate_stages[k][i])
                                    .cwiseAbs()
                                    .maxCoeff() <= 1e-11);
                    }
                }
            }
        }
    }
}

TEST_CASE("backward sweep amplification stays inside the stability interval", "[sweeps]") {
    for (int order : {1, 2}) {
        for (int s : {3, 8, 15}) {
            const double beta =
                (order == 1) ? 2.0 * s * s : (2.0 / 3.0) * (static_cast<double>(s) * s - 1.0);
            const auto c = (order == 1) ? cheb1_coeffs(s, 0.0) : rkc2_coeffs(s, 0.0);
            for (int g = 0; g <= 100; ++g) {
                const double z = -beta * g / 100.0;
                const ControlProblem p = scalar_linear(z);
                SweepRecord rec = make_record(p, 1, s);
                run_sweeps(p, constant_controls(1, s, Eigen::VectorXd::Zero(1)), c, rec);
                REQUIRE(std::abs(rec.costates[0](0)) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("backward amplification equals the forward stability function", "[sweeps]") {
    for (int s : {2, 5, 12}) {
        const auto c = rkc2_coeffs(s, 0.15);
        for (double z : {-0.6 * s * s, -0.2 * s * s, -1.0, 0.0}) {
            const ControlProblem p = scalar_linear(z);
            SweepRecord rec = make_record(p, 1, s);
            run_sweeps(p, constant_controls(1, s, Eigen::VectorXd::Zero(1)), c, rec);
            const double forward =
                c.a_final + c.b_final_T * cheb_eval(s, c.omega0 + c.omega * z).value /
                                cheb_eval(s, c.omega0).value;
            REQUIRE(std::abs(rec.costates[0](0) - forward) <= 1e-10);
        }
    }
}

TEST_CASE("rescaled costate stages approach p_{k+1} linearly in h", "[sweeps]") {
    const double lambda = -2.0;
    auto stage_deviation = [&](double h) {
        ControlProblem p = scalar_linear(lambda * h);  // recurrence runs at h = 1 internally
        const auto c = rkc2_coeffs(6, 0.15);
        SweepRecord rec = make_record(p, 1, 6);
        run_sweeps(p, constant_controls(1, 6, Eigen::VectorXd::Zero(1)), c, rec);
        double dev = 0.0;
        for (int i = 0; i < 6; ++i) {
            dev = std::max(dev, std::abs(rec.costate_stages[0][i](0) - 1.0));
        }
        return dev;
    };
    const double d1 = stage_deviation(0.2);
    const double d2 = stage_deviation(0.1);
    const double d3 = stage_deviation(0.05);
    CHECK(d2 <= 0.7 * d1);
    CHECK(d3 <= 0.7 * d2);
}

TEST_CASE("stationarity solves the quadratic channel analytically", "[sweeps]") {
    // H = p_c u^2/2 + p_x u + (u-independent): the update must return
    // -p_x/p_c at the paired stage values.
    const ControlProblem p = hager_problem();
    const auto c = rkc2_coeffs(3, 0.15);
    const int N = 2;
    SweepRecord rec = make_record(p, N, 3);
    run_sweeps(p, constant_controls(N, 3, Eigen::VectorXd::Constant(1, -0.5)), c, rec);

    StationaritySolver analytic;
    const ControlStages u_analytic = stationarity_update(p, rec, analytic);
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < 3; ++i) {
            const auto& pv = rec.costate_stages[k][i];
            REQUIRE(std::abs(u_analytic[k][i](0) - (-pv(1) / pv(0))) <= 1e-14);
        }
    }

    StationaritySolver newton;
    newton.prefer_analytic = false;
    const ControlStages u_newton = stationarity_update(p, rec, newton);
    CHECK(sup_difference(u_analytic, u_newton) <= 1e-10);
}

TEST_CASE("Burgers stationarity channel: analytic equals Newton", "[sweeps]") {
    const BurgersGrid grid = make_burgers_grid(6);
    const ControlProblem p = burgers_problem(grid, 0.5);
    const auto c = rkc2_coeffs(4, 0.15);
    SweepRecord rec = make_record(p, 2, 4);
    run_sweeps(p, constant_controls(2, 4, Eigen::VectorXd::Zero(p.control_dim)), c, rec);

    StationaritySolver analytic;
    StationaritySolver newton;
    newton.prefer_analytic = false;
    const ControlStages ua = stationarity_update(p, rec, analytic);
    const ControlStages un = stationarity_update(p, rec, newton);
    CHECK(sup_difference(ua, un) <= 1e-9);

    // the trapezoid-weight formula itself
    for (int i = 0; i < 4; ++i) {
        const auto& pv = rec.costate_stages[1][i];
        for (int m = 1; m <= grid.interior_points; ++m) {
            REQUIRE(std::abs(ua[1][i](m) - (-pv(1 + m) / (pv(0) * grid.weights(m)))) <= 1e-12);
        }
        CHECK(ua[1][i](0) == 0.0);
        CHECK(ua[1][i](grid.interior_points + 1) == 0.0);
    }
}

TEST_CASE("singular control Hessian raises instead of silently passing", "[sweeps]") {
    // H linear in u: grad_u H is constant and nonzero, the Hessian is 0.
    ControlProblem p = scalar_linear(-1.0);
    p.control_gradient = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 1.0).eval();
    };
    const auto c = cheb1_coeffs(3, 0.05);
    SweepRecord rec = make_record(p, 1, 3);
    run_sweeps(p, constant_controls(1, 3, Eigen::VectorXd::Zero(1)), c, rec);
    StationaritySolver newton;
    newton.prefer_analytic = false;
    CHECK_THROWS_AS(stationarity_update(p, rec, newton), StationarityFailure);
}

TEST_CASE("forward sweep with the analytic optimal control lands near the optimum", "[sweeps]") {
    // sample u* at the stage abscissae of the unrolled tableau
    const ControlProblem p = hager_problem();
    const int N = 64, s = 4;
    const auto c = rkc2_coeffs(s, 0.15);
    const ButcherTableau t = unroll_tableau(c);
    const Eigen::VectorXd abscissae = t.A.rowwise().sum();
    const double h = p.horizon / N;
    ControlStages U(N, std::vector<Eigen::VectorXd>(s));
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < s; ++i) {
            U[k][i] = Eigen::VectorXd::Constant(1, hager_u_star((k + abscissae(i)) * h));
        }
    }
    SweepRecord rec = make_record(p, N, s);
    const double cost = forward_sweep(p, U, c, rec);

    // continuous optimal cost by fine trapezoid quadrature of the printed forms
    const int Q = 200000;
    double jstar = 0.0;
    for (int q = 0; q <= Q; ++q) {
        const double tq = static_cast<double>(q) / Q;
        const double u = hager_u_star(tq);
        const double x = hager_x_star(tq);
        const double w = (q == 0 || q == Q) ? 0.5 : 1.0;
        jstar += w * 0.5 * (u * u + 2.0 * x * x) / Q;
    }
    CHECK(std::abs(cost - jstar) <= 5e-4);
    CHECK(std::abs(rec.states[N](1) - hager_x_star(1.0)) <= 1e-4);
}
