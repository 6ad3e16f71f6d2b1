#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rkc {

/// Callback bundle describing a Mayer-form optimal control problem
///   min Psi(y(T)),  y' = f(u, y),  y(0) = y0,
/// with the pseudo-Hamiltonian H(u, y, p) = p^T f(u, y).
///
/// adjoint_product returns grad_y H = (df/dy)^T p as a product (no n x n
/// Jacobian is materialized); control_gradient returns grad_u H.
/// analytic_stationarity, when set, solves grad_u H = 0 in closed form;
/// otherwise the sweep engine falls back to Newton.
struct ControlProblem {
    int state_dim = 0;
    int control_dim = 0;
    double horizon = 1.0;
    Eigen::VectorXd initial_state;

    std::function<Eigen::VectorXd(const Eigen::VectorXd& u, const Eigen::VectorXd& y)> dynamics;
    std::function<Eigen::VectorXd(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& p)>
        adjoint_product;
    std::function<Eigen::VectorXd(const Eigen::VectorXd& u, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& p)>
        control_gradient;
    std::function<Eigen::VectorXd(const Eigen::VectorXd& y, const Eigen::VectorXd& p)>
        analytic_stationarity;  // optional
    std::function<double(const Eigen::VectorXd& yT)> cost;
    std::function<Eigen::VectorXd(const Eigen::VectorXd& yT)> cost_gradient;
    std::function<double(const Eigen::VectorXd& y, const Eigen::VectorXd& u)> lambda_max_estimator;
};

}  // namespace rkc
