// Command-line front end: coefficient dumps, tableau algebra, stability
// scans, ODE/OCP convergence ladders, single solves, and the Burgers
// control benchmark. Emits CSV/JSON artifacts; all commands are
// deterministic, so repeated runs are byte-identical.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rkc/coefficients.hpp"
#include "rkc/format.hpp"
#include "rkc/ivp.hpp"
#include "rkc/problems.hpp"
#include "rkc/solver.hpp"
#include "rkc/stability.hpp"
#include "rkc/sweeps.hpp"
#include "rkc/tableau.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Strict key-value config: every key must name a long option of the
// subcommand, and command-line flags win over config values.
void apply_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw ConfigError("unknown config key '" + key + "' for command " +
                              cmd->get_name());
        }
        if (opt->count() > 0) {
            continue;  // explicit flag wins
        }
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else {
            text = value.dump();
        }
        opt->add_result(text);
        opt->run_callback();
    }
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) {
        return std::cout;
    }
    file.open(path);
    if (!file) {
        throw ConfigError("cannot open output file: " + path);
    }
    return file;
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

rkc::StabilityMethod parse_stability_method(const std::string& name) {
    if (name == "cheb1") return rkc::StabilityMethod::cheb1;
    if (name == "rkc2-new") return rkc::StabilityMethod::rkc2_new;
    if (name == "rkc-classical") return rkc::StabilityMethod::rkc_classical;
    if (name == "cheb1-da") return rkc::StabilityMethod::cheb1_da;
    if (name == "rkc2-da") return rkc::StabilityMethod::rkc2_da;
    throw ConfigError("unknown stability method: " + name);
}

rkc::Method parse_method(const std::string& name) {
    if (name == "cheb1") return rkc::Method::cheb1;
    if (name == "rkc2") return rkc::Method::rkc2;
    if (name == "dirk2") return rkc::Method::dirk2;
    if (name == "rkc2-naive") return rkc::Method::rkc2_naive;
    throw ConfigError("unknown method: " + name);
}

// ---------------------------------------------------------------- coeffs

struct CoeffsArgs {
    int order = 1;
    int stages = 0;
    double eta = -1.0;  // sentinel: default per order
    std::string output;
};

int run_coeffs(const CoeffsArgs& a) {
    if (a.order != 1 && a.order != 2) {
        throw ConfigError("--order must be 1 or 2");
    }
    const double eta = a.eta >= 0.0
                           ? a.eta
                           : (a.order == 1 ? rkc::kDefaultEtaOrder1 : rkc::kDefaultEtaOrder2);
    const rkc::StabilizedCoefficients c =
        a.order == 1 ? rkc::cheb1_coeffs(a.stages, eta) : rkc::rkc2_coeffs(a.stages, eta);
    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "i,mu,nu,alpha,omega0,omega,a_final,b_final_T\n";
    for (int i = 1; i <= c.s; ++i) {
        out << i << ',' << rkc::format_full(c.mu[i]) << ',';
        if (i >= 2) out << rkc::format_full(c.nu[i]);
        out << ',' << rkc::format_full(c.alpha[i]) << ',' << rkc::format_full(c.omega0) << ','
            << rkc::format_full(c.omega) << ',' << rkc::format_full(c.a_final) << ','
            << rkc::format_full(c.b_final_T) << '\n';
    }
    return 0;
}

// --------------------------------------------------------------- tableau

struct TableauArgs {
    std::string name = "rkc2";
    int stages = 4;
    double eta = -1.0;
    std::string output;
};

int run_tableau(const TableauArgs& a) {
    rkc::ButcherTableau t;
    if (a.name == "euler") {
        t = rkc::explicit_euler_tableau();
    } else if (a.name == "implicit-euler") {
        t = rkc::implicit_euler_tableau();
    } else if (a.name == "heun") {
        t = rkc::heun_tableau();
    } else if (a.name == "dirk2") {
        t = rkc::dirk2_tableau();
    } else if (a.name == "cheb1") {
        t = rkc::unroll_tableau(
            rkc::cheb1_coeffs(a.stages, a.eta >= 0.0 ? a.eta : rkc::kDefaultEtaOrder1));
    } else if (a.name == "rkc2") {
        t = rkc::unroll_tableau(
            rkc::rkc2_coeffs(a.stages, a.eta >= 0.0 ? a.eta : rkc::kDefaultEtaOrder2));
    } else {
        throw ConfigError("unknown tableau name: " + a.name);
    }
    const rkc::ButcherTableau da = rkc::double_adjoint(t);
    const Eigen::MatrixXd residual = rkc::symplecticity_residual(rkc::hat_tableau(t));

    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "section,i,j,value\n";
    const int s = t.stages();
    auto emit_matrix = [&](const char* section, const Eigen::MatrixXd& m) {
        for (int i = 0; i < s; ++i) {
            for (int j = 0; j < s; ++j) {
                out << section << ',' << i + 1 << ',' << j + 1 << ','
                    << rkc::format_full(m(i, j)) << '\n';
            }
        }
    };
    auto emit_vector = [&](const char* section, const Eigen::VectorXd& v) {
        for (int i = 0; i < s; ++i) {
            out << section << ',' << i + 1 << ",," << rkc::format_full(v(i)) << '\n';
        }
    };
    emit_matrix("A", t.A);
    emit_vector("b", t.b);
    emit_matrix("A_double_adjoint", da.A);
    emit_vector("b_double_adjoint", da.b);
    emit_matrix("symplecticity_residual", residual);
    return 0;
}

// ------------------------------------------------------------- stability

struct StabilityArgs {
    std::string method = "cheb1";
    int stages = 10;
    double eta = 0.0;
    double zmin = -200.0;
    double zmax = 0.0;
    int points = 400;
    std::string output;
};

int run_stability(const StabilityArgs& a) {
    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    rkc::emit_stability_csv(out, parse_stability_method(a.method), a.stages, a.eta, a.zmin,
                            a.zmax, a.points);
    return 0;
}

// ----------------------------------------------------------- converge-ode

struct ConvergeOdeArgs {
    std::string problem = "logistic";
    std::string method = "rkc2";
    int stages = 5;
    double eta = -1.0;
    int imin = 3;
    int imax = 9;
    std::string output;
};

int run_converge_ode(const ConvergeOdeArgs& a) {
    const bool classical = (a.method == "classical-rkc");
    rkc::IvpMethod method = rkc::IvpMethod::rkc2;
    if (a.method == "cheb1") {
        method = rkc::IvpMethod::cheb1;
    } else if (a.method == "rkc2") {
        method = rkc::IvpMethod::rkc2;
    } else if (classical) {
        method = rkc::IvpMethod::classical_rkc;
    } else {
        throw ConfigError("unknown converge-ode method: " + a.method);
    }

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> field;
    std::function<double(const Eigen::VectorXd&)> lambda_max;
    Eigen::VectorXd y0;
    double horizon = 0.0;
    std::function<Eigen::VectorXd(double)> exact;  // may stay empty

    if (a.problem == "logistic") {
        y0 = Eigen::VectorXd::Constant(1, 0.2);
        horizon = 4.0;
        field = [](const Eigen::VectorXd& y) {
            return Eigen::VectorXd::Constant(1, y(0) * (1.0 - y(0))).eval();
        };
        lambda_max = [](const Eigen::VectorXd&) { return 1.0; };
        exact = [](double t) {
            const double y0v = 0.2;
            return Eigen::VectorXd::Constant(1, y0v / (y0v + (1.0 - y0v) * std::exp(-t)))
                .eval();
        };
    } else if (a.problem == "heat") {
        const int n = 40;
        const double dx = 1.0 / (n + 1);
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            L(i, i) = -2.0 / (dx * dx);
            if (i > 0) L(i, i - 1) = 1.0 / (dx * dx);
            if (i + 1 < n) L(i, i + 1) = 1.0 / (dx * dx);
        }
        y0.resize(n);
        for (int i = 0; i < n; ++i) y0(i) = std::sin(M_PI * (i + 1) * dx);
        horizon = 0.02;
        field = [L](const Eigen::VectorXd& y) { return (L * y).eval(); };
        const double lam = L.cwiseAbs().rowwise().sum().maxCoeff();
        lambda_max = [lam](const Eigen::VectorXd&) { return lam; };
    } else {
        throw ConfigError("unknown converge-ode problem: " + a.problem);
    }

    auto run = [&](int steps, std::optional<int> s) {
        rkc::IntegrateOptions opts;
        opts.method = method;
        if (a.eta >= 0.0) opts.eta = a.eta;
        if (s) {
            opts.fixed_stages = s;
        } else {
            opts.lambda_max = lambda_max;
        }
        return rkc::integrate(field, y0, horizon, steps, opts);
    };

    std::optional<int> fixed =
        a.stages > 0 ? std::optional<int>(a.stages) : std::nullopt;
    std::vector<Eigen::VectorXd> reference;
    int ref_steps = 0;
    if (!exact) {
        ref_steps = static_cast<int>(std::llround(horizon * std::pow(2.0, a.imax + 3)));
        reference = run(ref_steps, std::nullopt).states;
    }

    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "h,error\n";
    for (int i = a.imin; i <= a.imax; ++i) {
        const double h = std::pow(2.0, -i);
        const int steps = static_cast<int>(std::llround(horizon / h));
        const auto traj = run(steps, fixed);
        double err = 0.0;
        if (exact) {
            for (int k = 0; k <= steps; ++k) {
                err = std::max(err,
                               (traj.states[k] - exact(traj.t[k])).cwiseAbs().maxCoeff());
            }
        } else {
            const int stride = ref_steps / steps;
            for (int k = 0; k <= steps; ++k) {
                err = std::max(
                    err, (traj.states[k] - reference[k * stride]).cwiseAbs().maxCoeff());
            }
        }
        out << rkc::format_full(h) << ',' << rkc::format_full(err) << '\n';
    }
    return 0;
}

// ----------------------------------------------------------- converge-ocp

struct ConvergeOcpArgs {
    std::string problem = "hager";
    std::string method = "rkc2";
    double epsilon = 1e-3;
    int imin = 3;
    int imax = 7;
    int ref_exp = 7;
    int stages = 0;  // 0: adaptive
    double eta = -1.0;
    double tol = 1e-8;
    int max_iters = 500;
    int grid_m = 49;
    double alpha = 0.02;
    std::string output;
};

struct LadderPoint {
    double h = 0.0;
    double state_error = 0.0;
    double control_error = 0.0;
    int s_used = 0;
    long f_evals = 0;
};

int run_converge_ocp(const ConvergeOcpArgs& a) {
    const rkc::Method method = parse_method(a.method);
    rkc::ControlProblem problem;
    if (a.problem == "hager") {
        problem = rkc::hager_problem();
    } else if (a.problem == "stiff-sp") {
        problem = rkc::stiff_sp_problem(a.epsilon);
    } else if (a.problem == "burgers") {
        problem = rkc::burgers_problem(rkc::make_burgers_grid(a.grid_m, 0.1, 0.02, a.alpha));
    } else {
        throw ConfigError("unknown converge-ocp problem: " + a.problem);
    }

    auto solve_at = [&](int steps, rkc::Method m) {
        rkc::SolverConfig cfg;
        cfg.method = m;
        cfg.steps = steps;
        cfg.tol = a.tol;
        cfg.max_iters = a.max_iters;
        if (a.eta >= 0.0) cfg.eta = a.eta;
        if (a.stages > 0) {
            cfg.stage_policy.fixed_stages = a.stages;
        } else if (m == rkc::Method::rkc2_naive || a.problem == "hager") {
            // the nonstiff ladder exercises the recurrences with a
            // nontrivial fixed stage count
            cfg.stage_policy.fixed_stages = 5;
        }
        if (a.problem == "burgers") {
            cfg.stage_policy.refresh_each_iteration = true;
        }
        return rkc::solve(problem, cfg);
    };

    const bool analytic_reference = (a.problem == "hager");
    rkc::SolveReport reference;
    int ref_steps = 0;
    if (!analytic_reference) {
        ref_steps = 1 << a.ref_exp;
        reference = solve_at(ref_steps, method == rkc::Method::dirk2 ? rkc::Method::rkc2
                                                                      : rkc::Method::rkc2);
        if (!reference.converged) {
            std::cerr << "reference solve failed: " << reference.abort_reason << "\n";
            return kExitNumerical;
        }
    }
    const rkc::StationaritySolver stationarity;
    std::vector<Eigen::VectorXd> ref_controls;
    if (!analytic_reference) {
        ref_controls = rkc::grid_controls(problem, reference.final_record, stationarity);
    }

    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << "h,state_error,control_error,s_used,f_evals\n";
    for (int i = a.imin; i <= a.imax; ++i) {
        const int steps = static_cast<int>(std::llround(problem.horizon * std::pow(2.0, i)));
        const rkc::SolveReport rep = solve_at(steps, method);
        if (!rep.converged) {
            out << "error," << rep.abort_reason << ",,,\n";
            return kExitNumerical;
        }
        LadderPoint pt;
        pt.h = problem.horizon / steps;
        pt.s_used = rep.stage_count_per_step.front();
        pt.f_evals = rep.total_f_evals;
        const auto controls = rkc::grid_controls(problem, rep.final_record, stationarity);
        for (int k = 0; k <= steps; ++k) {
            const double t = rep.final_record.grid[k];
            if (analytic_reference) {
                pt.state_error = std::max(
                    pt.state_error,
                    std::abs(rep.final_record.states[k](1) - rkc::hager_x_star(t)));
                pt.control_error = std::max(pt.control_error,
                                            std::abs(controls[k](0) - rkc::hager_u_star(t)));
            } else {
                const int stride = ref_steps / steps;
                pt.state_error =
                    std::max(pt.state_error, (rep.final_record.states[k] -
                                              reference.final_record.states[k * stride])
                                                 .cwiseAbs()
                                                 .maxCoeff());
                pt.control_error = std::max(
                    pt.control_error,
                    (controls[k] - ref_controls[k * stride]).cwiseAbs().maxCoeff());
            }
        }
        out << rkc::format_full(pt.h) << ',' << rkc::format_full(pt.state_error) << ','
            << rkc::format_full(pt.control_error) << ',' << pt.s_used << ',' << pt.f_evals
            << '\n';
    }
    return 0;
}

// ----------------------------------------------------------------- solve

struct SolveArgs {
    std::string problem = "hager";
    std::string method = "rkc2";
    double epsilon = 1e-3;
    int steps = 16;
    int stages = 0;
    double eta = -1.0;
    double tol = 1e-8;
    int max_iters = 500;
    int grid_m = 49;
    double alpha = 0.01;
    std::string output;
    std::string trajectory;
};

int run_solve(const SolveArgs& a) {
    rkc::ControlProblem problem;
    if (a.problem == "hager") {
        problem = rkc::hager_problem();
    } else if (a.problem == "stiff-sp") {
        problem = rkc::stiff_sp_problem(a.epsilon);
    } else if (a.problem == "burgers") {
        problem = rkc::burgers_problem(rkc::make_burgers_grid(a.grid_m, 0.1, 0.02, a.alpha));
    } else {
        throw ConfigError("unknown solve problem: " + a.problem);
    }
    rkc::SolverConfig cfg;
    cfg.method = parse_method(a.method);
    cfg.steps = a.steps;
    cfg.tol = a.tol;
    cfg.max_iters = a.max_iters;
    if (a.eta >= 0.0) cfg.eta = a.eta;
    if (a.stages > 0) cfg.stage_policy.fixed_stages = a.stages;
    if (a.problem == "burgers") cfg.stage_policy.refresh_each_iteration = true;

    const rkc::SolveReport rep = rkc::solve(problem, cfg);

    json report;
    report["problem"] = a.problem;
    report["method"] = a.method;
    report["steps"] = a.steps;
    report["stages"] = rep.stage_count_per_step.empty() ? 0 : rep.stage_count_per_step.front();
    report["iterations"] = rep.iterations;
    report["converged"] = rep.converged;
    report["cost_history"] = rep.cost_history;
    report["update_norms"] = rep.update_norms;
    report["total_f_evals"] = rep.total_f_evals;
    if (!rep.abort_reason.empty()) {
        report["abort_reason"] = rep.abort_reason;
    }
    if (!rep.cost_history.empty()) {
        report["final_cost"] = rep.cost_history.back();
    }

    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    out << report.dump(2) << '\n';

    if (!a.trajectory.empty() && rep.converged) {
        std::ofstream traj(a.trajectory);
        if (!traj) {
            throw ConfigError("cannot open trajectory file: " + a.trajectory);
        }
        const auto& rec = rep.final_record;
        const auto controls = rkc::grid_controls(problem, rec, rkc::StationaritySolver{});
        traj << "t";
        for (int c = 0; c < problem.state_dim; ++c) traj << ",y" << c;
        for (int c = 0; c < problem.state_dim; ++c) traj << ",p" << c;
        for (int c = 0; c < problem.control_dim; ++c) traj << ",u" << c;
        traj << '\n';
        for (int k = 0; k <= rec.steps(); ++k) {
            traj << rkc::format_full(rec.grid[k]);
            for (int c = 0; c < problem.state_dim; ++c)
                traj << ',' << rkc::format_full(rec.states[k](c));
            for (int c = 0; c < problem.state_dim; ++c)
                traj << ',' << rkc::format_full(rec.costates[k](c));
            for (int c = 0; c < problem.control_dim; ++c)
                traj << ',' << rkc::format_full(controls[k](c));
            traj << '\n';
        }
    }
    return rep.converged ? 0 : kExitNumerical;
}

// --------------------------------------------------------------- burgers

struct BurgersArgs {
    int grid_m = 99;
    int steps = 30;
    double alpha = 0.01;
    double mu = 0.1;
    double nu = 0.02;
    double horizon = 2.5;
    double tol = 1e-8;
    int max_iters = 500;
    int snapshots = 6;
    std::string output;  // base path for artifacts; empty = report to stdout
};

int run_burgers(const BurgersArgs& a) {
    const rkc::BurgersGrid grid = rkc::make_burgers_grid(a.grid_m, a.mu, a.nu, a.alpha);
    const rkc::ControlProblem problem = rkc::burgers_problem(grid, a.horizon);
    rkc::SolverConfig cfg;
    cfg.method = rkc::Method::rkc2;
    cfg.steps = a.steps;
    cfg.tol = a.tol;
    cfg.max_iters = a.max_iters;
    cfg.stage_policy.refresh_each_iteration = true;

    const rkc::SolveReport rep = rkc::solve(problem, cfg);
    const int s_used = rep.stage_count_per_step.empty() ? 0 : rep.stage_count_per_step.front();
    const double dt = a.horizon / a.steps;

    double misfit = 0.0;
    if (rep.converged) {
        const Eigen::VectorXd& yT = rep.final_record.states.back();
        for (int m = 0; m <= a.grid_m + 1; ++m) {
            const double d = yT(1 + m) - grid.target(m);
            misfit += grid.weights(m) * d * d;
        }
        misfit = std::sqrt(misfit);
    }

    json report;
    report["grid_m"] = a.grid_m;
    report["dx"] = grid.dx;
    report["dt"] = dt;
    report["alpha"] = a.alpha;
    report["stages"] = s_used;
    report["iterations"] = rep.iterations;
    report["converged"] = rep.converged;
    report["cost_history"] = rep.cost_history;
    report["total_f_evals"] = rep.total_f_evals;
    report["euler_cost_factor"] = rkc::euler_cost_factor(dt, s_used, grid.dx);
    report["final_misfit_l2"] = misfit;
    if (!rep.abort_reason.empty()) {
        report["abort_reason"] = rep.abort_reason;
    }

    std::ofstream file;
    std::ostream& out = open_output(file, a.output.empty() ? "" : a.output + ".json");
    out << report.dump(2) << '\n';
    if (!rep.converged) {
        return kExitNumerical;
    }
    if (a.output.empty()) {
        return 0;
    }

    const auto& rec = rep.final_record;
    const auto controls = rkc::grid_controls(problem, rec, rkc::StationaritySolver{});
    const int stride = std::max(1, a.steps / std::max(1, a.snapshots - 1));

    // state and control surfaces sampled at snapshot times
    auto write_surface = [&](const std::string& path, bool control) {
        std::ofstream csv(path);
        csv << "x";
        for (int k = 0; k <= a.steps; k += stride) {
            csv << ",t" << rkc::format_full(rec.grid[k]);
        }
        csv << '\n';
        for (int m = 0; m <= a.grid_m + 1; ++m) {
            csv << rkc::format_full(grid.node(m));
            for (int k = 0; k <= a.steps; k += stride) {
                const double v = control ? controls[k](m) : rec.states[k](1 + m);
                csv << ',' << rkc::format_full(v);
            }
            csv << '\n';
        }
    };
    write_surface(a.output + "_state.csv", false);
    write_surface(a.output + "_control.csv", true);

    std::ofstream final_csv(a.output + "_final.csv");
    final_csv << "x,y_final,y_target\n";
    for (int m = 0; m <= a.grid_m + 1; ++m) {
        final_csv << rkc::format_full(grid.node(m)) << ','
                  << rkc::format_full(rec.states.back()(1 + m)) << ','
                  << rkc::format_full(grid.target(m)) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit stabilized (Chebyshev/RKC) integrators for stiff optimal control"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    long seed = 0;  // accepted for interface compatibility; nothing is randomized
    app.add_option("--config", config_path, "JSON config file (strict keys)");
    app.add_option("--seed", seed, "unused; no stochastic components");

    CoeffsArgs coeffs;
    CLI::App* cmd_coeffs = app.add_subcommand("coeffs", "print stabilized coefficients as CSV");
    cmd_coeffs->add_option("--order", coeffs.order);
    cmd_coeffs->add_option("--stages", coeffs.stages);
    cmd_coeffs->add_option("--eta", coeffs.eta);
    cmd_coeffs->add_option("--output", coeffs.output);

    TableauArgs tableau;
    CLI::App* cmd_tableau =
        app.add_subcommand("tableau", "print a tableau, its double adjoint, and residuals");
    cmd_tableau->add_option("--name", tableau.name);
    cmd_tableau->add_option("--stages", tableau.stages);
    cmd_tableau->add_option("--eta", tableau.eta);
    cmd_tableau->add_option("--output", tableau.output);

    StabilityArgs stability;
    CLI::App* cmd_stability =
        app.add_subcommand("stability", "internal-stage stability scan as CSV");
    cmd_stability->add_option("--method", stability.method);
    cmd_stability->add_option("--stages", stability.stages);
    cmd_stability->add_option("--eta", stability.eta);
    cmd_stability->add_option("--zmin", stability.zmin);
    cmd_stability->add_option("--zmax", stability.zmax);
    cmd_stability->add_option("--points", stability.points);
    cmd_stability->add_option("--output", stability.output);

    ConvergeOdeArgs ode;
    CLI::App* cmd_ode = app.add_subcommand("converge-ode", "ODE convergence ladder (h, error)");
    cmd_ode->add_option("--problem", ode.problem);
    cmd_ode->add_option("--method", ode.method);
    cmd_ode->add_option("--stages", ode.stages);
    cmd_ode->add_option("--eta", ode.eta);
    cmd_ode->add_option("--imin", ode.imin);
    cmd_ode->add_option("--imax", ode.imax);
    cmd_ode->add_option("--output", ode.output);

    ConvergeOcpArgs ocp;
    CLI::App* cmd_ocp =
        app.add_subcommand("converge-ocp", "optimal-control convergence ladder");
    cmd_ocp->add_option("--problem", ocp.problem);
    cmd_ocp->add_option("--method", ocp.method);
    cmd_ocp->add_option("--epsilon", ocp.epsilon);
    cmd_ocp->add_option("--imin", ocp.imin);
    cmd_ocp->add_option("--imax", ocp.imax);
    cmd_ocp->add_option("--ref-exp", ocp.ref_exp);
    cmd_ocp->add_option("--stages", ocp.stages);
    cmd_ocp->add_option("--eta", ocp.eta);
    cmd_ocp->add_option("--tol", ocp.tol);
    cmd_ocp->add_option("--max-iters", ocp.max_iters);
    cmd_ocp->add_option("--grid-m", ocp.grid_m);
    cmd_ocp->add_option("--alpha", ocp.alpha);
    cmd_ocp->add_option("--output", ocp.output);

    SolveArgs solve_args;
    CLI::App* cmd_solve = app.add_subcommand("solve", "single optimal-control solve");
    cmd_solve->add_option("--problem", solve_args.problem);
    cmd_solve->add_option("--method", solve_args.method);
    cmd_solve->add_option("--epsilon", solve_args.epsilon);
    cmd_solve->add_option("--steps", solve_args.steps);
    cmd_solve->add_option("--stages", solve_args.stages);
    cmd_solve->add_option("--eta", solve_args.eta);
    cmd_solve->add_option("--tol", solve_args.tol);
    cmd_solve->add_option("--max-iters", solve_args.max_iters);
    cmd_solve->add_option("--grid-m", solve_args.grid_m);
    cmd_solve->add_option("--alpha", solve_args.alpha);
    cmd_solve->add_option("--output", solve_args.output);
    cmd_solve->add_option("--trajectory", solve_args.trajectory);

    BurgersArgs burgers;
    CLI::App* cmd_burgers =
        app.add_subcommand("burgers", "Burgers control benchmark with CSV artifacts");
    cmd_burgers->add_option("--grid-m", burgers.grid_m);
    cmd_burgers->add_option("--steps", burgers.steps);
    cmd_burgers->add_option("--alpha", burgers.alpha);
    cmd_burgers->add_option("--mu", burgers.mu);
    cmd_burgers->add_option("--nu", burgers.nu);
    cmd_burgers->add_option("--horizon", burgers.horizon);
    cmd_burgers->add_option("--tol", burgers.tol);
    cmd_burgers->add_option("--max-iters", burgers.max_iters);
    cmd_burgers->add_option("--snapshots", burgers.snapshots);
    cmd_burgers->add_option("--output", burgers.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) {
            apply_config(active, config_path);
        }
        if (active == cmd_coeffs) return run_coeffs(coeffs);
        if (active == cmd_tableau) return run_tableau(tableau);
        if (active == cmd_stability) return run_stability(stability);
        if (active == cmd_ode) return run_converge_ode(ode);
        if (active == cmd_ocp) return run_converge_ocp(ocp);
        if (active == cmd_solve) return run_solve(solve_args);
        if (active == cmd_burgers) return run_burgers(burgers);
        std::cerr << "no command selected\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rkc::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rkc::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
