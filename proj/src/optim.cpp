#include "hedgescale/optim.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace hedgescale::optim {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Result bfgs_minimize(const Objective& f, const Gradient& grad, const Eigen::VectorXd& x0,
                     const Options& opts) {
    const Eigen::Index n = x0.size();
    Result res;
    res.x = x0;
    res.f = f(res.x);
    Eigen::VectorXd g = grad(res.x);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);

    if (!finite(res.f) || !g.allFinite()) {
        res.line_search_failed = true;
        res.grad_norm = std::numeric_limits<double>::infinity();
        return res;
    }

    bool first_update = true;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        res.grad_norm = g.cwiseAbs().maxCoeff();
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            return res;
        }

        Eigen::VectorXd direction = -(h_inv * g);
        double slope = g.dot(direction);
        if (!(slope < 0.0) || !direction.allFinite()) {
            // Degenerate curvature estimate: restart from steepest descent.
            h_inv.setIdentity();
            direction = -g;
            slope = g.dot(direction);
        }

        // Backtracking Armijo search.
        double step = 1.0;
        const double c1 = 1e-4;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        bool accepted = false;
        while (step > opts.step_tol) {
            x_new = res.x + step * direction;
            f_new = f(x_new);
            if (finite(f_new) && f_new <= res.f + c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.line_search_failed = true;
            return res;
        }

        Eigen::VectorXd g_new = grad(x_new);
        if (!g_new.allFinite()) {
            res.line_search_failed = true;
            res.x = x_new;
            res.f = f_new;
            return res;
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (first_update) {
                // Shanno-Phua scaling: size the initial inverse Hessian from
                // the first observed curvature so badly scaled objectives do
                // not spend dozens of iterations recovering from identity.
                h_inv *= sy / y.squaredNorm();
                first_update = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
            h_inv = (ident - rho * s * y.transpose()) * h_inv *
                        (ident - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        } else {
            h_inv.setIdentity();
            first_update = true;
        }

        const double f_change = std::abs(res.f - f_new);
        res.x = x_new;
        res.f = f_new;
        g = g_new;

        if (f_change < 1e-14 * (1.0 + std::abs(res.f)) && s.norm() < 1e-12) {
            res.grad_norm = g.cwiseAbs().maxCoeff();
            res.converged = res.grad_norm <= opts.grad_tol;
            return res;
        }
    }
    res.iterations = opts.max_iterations;
    res.grad_norm = g.cwiseAbs().maxCoeff();
    res.converged = res.grad_norm <= opts.grad_tol;
    return res;
}

Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
    const Eigen::Index n = x0.size();
    const std::size_t m = static_cast<std::size_t>(n) + 1;

    std::vector<Eigen::VectorXd> simplex(m, x0);
    std::vector<double> values(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double delta = (x0[i] != 0.0) ? opts.initial_step * std::abs(x0[i])
                                            : opts.initial_step;
        simplex[static_cast<std::size_t>(i) + 1][i] += delta;
    }
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return finite(v) ? v : std::numeric_limits<double>::max();
    };
    for (std::size_t i = 0; i < m; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(m);
    Result res;
    while (evals < opts.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[m - 2];

        if (std::abs(values[worst] - values[best]) <=
            opts.f_tol * (1.0 + std::abs(values[best]))) {
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < m; ++i) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double f_ref = eval(reflected);
        if (f_ref < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double f_exp = eval(expanded);
            if (f_exp < f_ref) {
                simplex[worst] = expanded;
                values[worst] = f_exp;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_ref;
            }
        } else if (f_ref < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_ref;
        } else {
            const Eigen::VectorXd contracted =
                centroid + 0.5 * (simplex[worst] - centroid);
            const double f_con = eval(contracted);
            if (f_con < values[worst]) {
                simplex[worst] = contracted;
                values[worst] = f_con;
            } else {
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
    res.x = simplex[best];
    res.f = values[best];
    res.iterations = evals;
    res.converged = true;  // simplex termination is by f-spread, not gradient
    return res;
}

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& steps) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = steps[i];
        xp[i] = x[i] + h;
        const double f_plus = f(xp);
        xp[i] = x[i] - h;
        const double f_minus = f(xp);
        xp[i] = x[i];
        g[i] = (f_plus - f_minus) / (2.0 * h);
    }
    return g;
}

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                            double rel_step) {
    Eigen::VectorXd steps(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        steps[i] = rel_step * std::max(std::abs(x[i]), 1.0);
    }
    return central_difference_gradient(f, x, steps);
}

Result newton_polish(const Objective& f, const Gradient& grad, const Eigen::VectorXd& x0,
                     const Options& opts, int max_steps) {
    const Eigen::Index n = x0.size();
    Result res;
    res.x = x0;
    res.f = f(res.x);
    Eigen::VectorXd g = grad(res.x);
    res.grad_norm = g.cwiseAbs().maxCoeff();

    for (int step = 0; step < max_steps; ++step) {
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            return res;
        }
        // Finite-difference Jacobian of the gradient.
        Eigen::MatrixXd hess(n, n);
        Eigen::VectorXd xp = res.x;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = 1e-5 * std::max(1.0, std::abs(res.x[j]));
            xp[j] = res.x[j] + h;
            const Eigen::VectorXd gp = grad(xp);
            xp[j] = res.x[j] - h;
            const Eigen::VectorXd gm = grad(xp);
            xp[j] = res.x[j];
            hess.col(j) = (gp - gm) / (2.0 * h);
        }
        hess = 0.5 * (hess + hess.transpose()).eval();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success) break;
        const Eigen::VectorXd delta = ldlt.solve(g);
        if (!delta.allFinite()) break;

        // Damped acceptance on the gradient norm.
        double scale = 1.0;
        bool accepted = false;
        for (int half = 0; half < 12; ++half) {
            const Eigen::VectorXd x_new = res.x - scale * delta;
            const double f_new = f(x_new);
            if (std::isfinite(f_new)) {
                const Eigen::VectorXd g_new = grad(x_new);
                if (g_new.allFinite() && g_new.cwiseAbs().maxCoeff() < res.grad_norm) {
                    res.x = x_new;
                    res.f = f_new;
                    g = g_new;
                    res.grad_norm = g.cwiseAbs().maxCoeff();
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        ++res.iterations;
        if (!accepted) break;
    }
    res.converged = res.grad_norm <= opts.grad_tol;
    return res;
}

}  // namespace hedgescale::optim
