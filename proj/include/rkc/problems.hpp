#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rkc/control_problem.hpp"
#include "rkc/errors.hpp"

namespace rkc {

/// Closed-form optimum of the linear-quadratic test problem
///   min (1/2) int_0^1 (u^2 + 2 x^2) dt,  x' = x/2 + u,  x(0) = 1.
inline double hager_u_star(double t) {
    const double e3 = std::exp(3.0);
    return 2.0 * (std::exp(3.0 * t) - e3) / (std::exp(1.5 * t) * (2.0 + e3));
}

inline double hager_x_star(double t) {
    const double e3 = std::exp(3.0);
    return (2.0 * std::exp(3.0 * t) + e3) / (std::exp(1.5 * t) * (2.0 + e3));
}

/// The problem above in Mayer form with the running cost absorbed into a
/// cost channel: state y = (c, x), Psi(y) = c(1).
inline ControlProblem hager_problem() {
    ControlProblem p;
    p.state_dim = 2;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.initial_state = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
    p.dynamics = [](const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
        Eigen::VectorXd f(2);
        f(0) = 0.5 * (u(0) * u(0) + 2.0 * y(1) * y(1));
        f(1) = 0.5 * y(1) + u(0);
        return f;
    };
    p.adjoint_product = [](const Eigen::VectorXd&, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& pv) {
        Eigen::VectorXd g(2);
        g(0) = 0.0;
        g(1) = 2.0 * y(1) * pv(0) + 0.5 * pv(1);
        return g;
    };
    p.control_gradient = [](const Eigen::VectorXd& u, const Eigen::VectorXd&,
                            const Eigen::VectorXd& pv) {
        return Eigen::VectorXd::Constant(1, pv(0) * u(0) + pv(1)).eval();
    };
    p.analytic_stationarity = [](const Eigen::VectorXd&, const Eigen::VectorXd& pv) {
        if (pv(0) == 0.0) {
            throw DegenerateRescaling("hager stationarity: cost-channel costate is zero");
        }
        return Eigen::VectorXd::Constant(1, -pv(1) / pv(0)).eval();
    };
    p.cost = [](const Eigen::VectorXd& y) { return y(0); };
    p.cost_gradient = [](const Eigen::VectorXd&) {
        return (Eigen::VectorXd(2) << 1.0, 0.0).finished();
    };
    p.lambda_max_estimator = [](const Eigen::VectorXd& y, const Eigen::VectorXd&) {
        return std::max(0.5, 2.0 * std::abs(y(1)));
    };
    return p;
}

/// Singularly perturbed variant: states (c, x, z) with
///   c' = (u^2 + x^2 + 4 z^2)/2,  x' = z + u,  z' = (x/2 - z)/eps,
/// Psi = c(1). The spectral radius estimate is the dominant Jacobian
/// entry 1/eps.
inline ControlProblem stiff_sp_problem(double epsilon) {
    if (!(epsilon > 0.0)) {
        throw InvalidInput("stiff_sp_problem: epsilon must be positive");
    }
    ControlProblem p;
    p.state_dim = 3;
    p.control_dim = 1;
    p.horizon = 1.0;
    p.initial_state = (Eigen::VectorXd(3) << 0.0, 1.0, 0.5).finished();
    p.dynamics = [epsilon](const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
        Eigen::VectorXd f(3);
        f(0) = 0.5 * (u(0) * u(0) + y(1) * y(1) + 4.0 * y(2) * y(2));
        f(1) = y(2) + u(0);
        f(2) = (0.5 * y(1) - y(2)) / epsilon;
        return f;
    };
    p.adjoint_product = [epsilon](const Eigen::VectorXd&, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& pv) {
        Eigen::VectorXd g(3);
        g(0) = 0.0;
        g(1) = y(1) * pv(0) + pv(2) / (2.0 * epsilon);
        g(2) = 4.0 * y(2) * pv(0) + pv(1) - pv(2) / epsilon;
        return g;
    };
    p.control_gradient = [](const Eigen::VectorXd& u, const Eigen::VectorXd&,
                            const Eigen::VectorXd& pv) {
        return Eigen::VectorXd::Constant(1, pv(0) * u(0) + pv(1)).eval();
    };
    p.analytic_stationarity = [](const Eigen::VectorXd&, const Eigen::VectorXd& pv) {
        if (pv(0) == 0.0) {
            throw DegenerateRescaling("stiff stationarity: cost-channel costate is zero");
        }
        return Eigen::VectorXd::Constant(1, -pv(1) / pv(0)).eval();
    };
    p.cost = [](const Eigen::VectorXd& y) { return y(0); };
    p.cost_gradient = [](const Eigen::VectorXd&) {
        return (Eigen::VectorXd(3) << 1.0, 0.0, 0.0).finished();
    };
    p.lambda_max_estimator = [epsilon](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return 1.0 / epsilon;
    };
    return p;
}

/// Space grid and model constants of the Burgers control problem,
/// discretized by central finite differences on M interior points with
/// homogeneous Dirichlet boundaries.
struct BurgersGrid {
    int interior_points = 0;      // M
    double dx = 0.0;              // 1/(M+1)
    double diffusion = 0.1;       // mu
    double advection = 0.02;      // nu
    double regularization = 0.01; // alpha
    Eigen::VectorXd target;       // y_target at nodes x_0..x_{M+1}
    Eigen::VectorXd initial;      // g at nodes
    Eigen::VectorXd weights;      // trapezoid quadrature weights, dx factor included

    double node(int m) const { return m * dx; }
};

inline BurgersGrid make_burgers_grid(int M, double mu = 0.1, double nu = 0.02,
                                     double alpha = 0.01) {
    if (M < 2) {
        throw InvalidInput("make_burgers_grid: need at least two interior points");
    }
    BurgersGrid g;
    g.interior_points = M;
    g.dx = 1.0 / (M + 1);
    g.diffusion = mu;
    g.advection = nu;
    g.regularization = alpha;
    g.target.resize(M + 2);
    g.initial.resize(M + 2);
    g.weights.resize(M + 2);
    for (int m = 0; m <= M + 1; ++m) {
        const double x = g.node(m);
        g.target(m) = 0.5 * std::sin(10.0 * x) * (1.0 - x);
        g.initial(m) = 1.5 * x * (1.0 - x) * (1.0 - x);
        g.weights(m) = (m == 0 || m == M + 1) ? 0.5 * g.dx : g.dx;
    }
    return g;
}

/// Jacobian bound 4 mu / dx^2 + (nu / dx) max_m |y_m| for the discrete
/// diffusion-advection operator; Y holds the M+2 nodal values.
inline double estimate_lambda_max_burgers(const BurgersGrid& grid, const Eigen::VectorXd& Y) {
    return 4.0 * grid.diffusion / (grid.dx * grid.dx) +
           grid.advection / grid.dx * Y.cwiseAbs().maxCoeff();
}

/// Burgers optimal control problem in Mayer form. The state is
/// (c, y_0..y_{M+1}) of dimension M+3; controls act on all M+2 nodes
/// (boundary controls only enter the cost and are zero at optimum).
/// Boundary values stay exactly zero: their dynamics are pinned to zero
/// and the initial profile vanishes there.
inline ControlProblem burgers_problem(const BurgersGrid& grid, double T = 2.5) {
    const int M = grid.interior_points;
    const double dx = grid.dx;
    const double mu = grid.diffusion;
    const double nu = grid.advection;
    const double alpha = grid.regularization;

    ControlProblem p;
    p.state_dim = M + 3;
    p.control_dim = M + 2;
    p.horizon = T;
    p.initial_state = Eigen::VectorXd::Zero(M + 3);
    p.initial_state.tail(M + 2) = grid.initial;

    p.dynamics = [grid, M, dx, mu, nu](const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
        Eigen::VectorXd f = Eigen::VectorXd::Zero(M + 3);
        double quad = 0.0;
        for (int m = 0; m <= M + 1; ++m) {
            quad += grid.weights(m) * u(m) * u(m);
        }
        f(0) = 0.5 * quad;
        for (int m = 1; m <= M; ++m) {
            const double ym = y(1 + m);
            const double yl = y(1 + m - 1);
            const double yr = y(1 + m + 1);
            f(1 + m) = mu / (dx * dx) * (yr - 2.0 * ym + yl) +
                       nu / (4.0 * dx) * (yr * yr - yl * yl) + u(m);
        }
        return f;
    };
    p.adjoint_product = [M, dx, mu, nu](const Eigen::VectorXd&, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& pv) {
        // Interior costates only feed the transpose stencil; pinned
        // boundary rows of F contribute nothing.
        auto pmask = [&](int j) { return (j >= 1 && j <= M) ? pv(1 + j) : 0.0; };
        Eigen::VectorXd g = Eigen::VectorXd::Zero(M + 3);
        for (int m = 0; m <= M + 1; ++m) {
            const double pl = pmask(m - 1);
            const double pc = pmask(m);
            const double pr = pmask(m + 1);
            g(1 + m) = mu / (dx * dx) * (pl - 2.0 * pc + pr) +
                       nu / (2.0 * dx) * y(1 + m) * (pl - pr);
        }
        return g;
    };
    p.control_gradient = [grid, M](const Eigen::VectorXd& u, const Eigen::VectorXd&,
                                   const Eigen::VectorXd& pv) {
        Eigen::VectorXd g(M + 2);
        for (int m = 0; m <= M + 1; ++m) {
            g(m) = pv(0) * grid.weights(m) * u(m);
            if (m >= 1 && m <= M) g(m) += pv(1 + m);
        }
        return g;
    };
    p.analytic_stationarity = [grid, M](const Eigen::VectorXd&, const Eigen::VectorXd& pv) {
        if (pv(0) == 0.0) {
            throw DegenerateRescaling("burgers stationarity: cost-channel costate is zero");
        }
        Eigen::VectorXd u = Eigen::VectorXd::Zero(M + 2);
        for (int m = 1; m <= M; ++m) {
            u(m) = -pv(1 + m) / (pv(0) * grid.weights(m));
        }
        return u;
    };
    p.cost = [grid, M, alpha](const Eigen::VectorXd& y) {
        double misfit = 0.0;
        for (int m = 0; m <= M + 1; ++m) {
            const double d = y(1 + m) - grid.target(m);
            misfit += grid.weights(m) * d * d;
        }
        return 0.5 * misfit + alpha * y(0);
    };
    p.cost_gradient = [grid, M, alpha](const Eigen::VectorXd& y) {
        Eigen::VectorXd g(M + 3);
        g(0) = alpha;
        for (int m = 0; m <= M + 1; ++m) {
            g(1 + m) = grid.weights(m) * (y(1 + m) - grid.target(m));
        }
        return g;
    };
    p.lambda_max_estimator = [grid](const Eigen::VectorXd& y, const Eigen::VectorXd&) {
        return estimate_lambda_max_burgers(grid, y.tail(grid.interior_points + 2));
    };
    return p;
}

/// Function-evaluation cost ratio of an explicit Euler double-adjoint
/// pair at its stability limit dt <= dx^2/2 versus one stabilized step.
inline double euler_cost_factor(double dt, int s, double dx) {
    return dt / (s * dx * dx / 2.0);
}

}  // namespace rkc
