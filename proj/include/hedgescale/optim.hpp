#pragma once

#include <Eigen/Core>
#include <functional>

namespace hedgescale::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct Options {
    double grad_tol = 1e-6;    // sup-norm of the gradient at the solution
    int max_iterations = 500;
    double step_tol = 1e-12;   // give up when the line-search step collapses
};

struct Result {
    Eigen::VectorXd x;
    double f = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    bool line_search_failed = false;
};

/// BFGS with backtracking Armijo line search. `grad` must return the gradient
/// of `f`; the Hessian approximation restarts to identity when curvature
/// information degenerates.
[[nodiscard]] Result bfgs_minimize(const Objective& f, const Gradient& grad,
                                   const Eigen::VectorXd& x0, const Options& opts = {});

struct NelderMeadOptions {
    double f_tol = 1e-12;
    int max_evaluations = 20000;
    double initial_step = 0.25;
};

/// Derivative-free simplex descent; used as a fallback when the line search
/// stalls on a kinked or flat region.
[[nodiscard]] Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0,
                                 const NelderMeadOptions& opts = {});

/// Central-difference gradient; step scales with |x_i| (absolute floor 1).
/// Shared by the numerical-gradient estimation path and the test oracles.
[[nodiscard]] Eigen::VectorXd central_difference_gradient(const Objective& f,
                                                          const Eigen::VectorXd& x,
                                                          double rel_step = 1e-6);

/// Variant with explicit per-coordinate steps, for parameters whose scales
/// differ by orders of magnitude.
[[nodiscard]] Eigen::VectorXd central_difference_gradient(const Objective& f,
                                                          const Eigen::VectorXd& x,
                                                          const Eigen::VectorXd& steps);

/// A few damped Newton steps on the finite-difference Jacobian of `grad`,
/// used to polish a quasi-Newton solution below a tight gradient tolerance.
[[nodiscard]] Result newton_polish(const Objective& f, const Gradient& grad,
                                   const Eigen::VectorXd& x0, const Options& opts = {},
                                   int max_steps = 8);

}  // namespace hedgescale::optim
