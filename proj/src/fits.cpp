#include <algorithm>
#include <cmath>
#include <limits>

#include "rollwave/evolution.hpp"

namespace rollwave {

namespace {

// Three-point derivative on a nonuniform grid at interior index i.
double centered_derivative(const std::vector<double>& t, const std::vector<double>& y, std::size_t i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    return -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
}

// Weights with int_0^h e^{-theta (h - s)} f(s) ds = w0 f(0) + w1 f(h) exactly for linear f.
void exponential_weights(double theta, double h, double& w0, double& w1) {
    const double a = theta * h;
    if (std::abs(a) < 1e-2) {
        // w0 = h sum (-a)^k / (k! (k + 2)), w1 = h sum (-a)^k / (k! (k + 1) (k + 2))
        w0 = w1 = 0.0;
        double term = 1.0;
        for (int k = 0; k <= 6; ++k) {
            w0 += term / (k + 2);
            w1 += term / ((k + 1) * (k + 2));
            term *= -a / (k + 1);
        }
        w0 *= h;
        w1 *= h;
        return;
    }
    const double e = std::exp(-a);
    w1 = h * (1.0 - (1.0 - e) / a) / a;
    w0 = h * (1.0 - e) / a - w1;
}

// r_i = int_0^{t_i} e^{-theta (t_i - s)} forcing(s) ds with forcing linear between samples.
std::vector<double> damped_convolution(const std::vector<double>& t, const std::vector<double>& f, double theta) {
    std::vector<double> r(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        double w0, w1;
        exponential_weights(theta, t[i] - t[i - 1], w0, w1);
        r[i] = std::exp(-theta * (t[i] - t[i - 1])) * r[i - 1] + w0 * f[i - 1] + w1 * f[i];
    }
    return r;
}

void check_samples(const std::vector<double>& t, std::size_t n, const char* what) {
    if (t.size() < 3 || n != t.size()) throw DomainError(std::string(what) + ": need at least 3 aligned samples");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw DomainError(std::string(what) + ": sample times must increase");
}

}  // namespace

DampingFit damping_fit(const EnergyTrace& trace, const DampingFitOptions& opts) {
    const auto& t = trace.times;
    const auto& E = trace.E_values;
    check_samples(t, E.size(), "damping_fit");
    if (trace.L2_values.size() != t.size()) throw DomainError("damping_fit: missing L2 samples");
    const std::size_t n = t.size();
    std::vector<double> dE(n, 0.0), N(n);
    for (std::size_t i = 0; i < n; ++i) N[i] = trace.L2_values[i] * trace.L2_values[i];
    double max_rate = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        dE[i] = centered_derivative(t, E, i);
        if (E[i] > 0.0) max_rate = std::max(max_rate, -dE[i] / E[i]);
    }
    const double eta_max = opts.eta_max > 0.0 ? opts.eta_max : std::max(1.0, 1.25 * max_rate);
    const int grid = std::max(2, opts.grid_points);

    DampingFit best;
    double best_tight = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int j = 0; j < grid; ++j) {
        const double eta = eta_max * j / (grid - 1);
        double C = 0.0;
        bool feasible = true;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double lhs = dE[i] + eta * E[i];
            const double tol = 1e-12 * (std::abs(dE[i]) + eta * std::abs(E[i]));
            if (N[i] > 0.0) {
                C = std::max(C, lhs / N[i]);
            } else if (lhs > tol) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        // Discrete Gronwall bound B' = -eta B + C N, B(0) = E(0).
        double B = E[0], tight = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double h = t[i] - t[i - 1];
            double w0, w1;
            exponential_weights(eta, h, w0, w1);
            B = std::exp(-eta * h) * B + C * (w0 * N[i - 1] + w1 * N[i]);
            tight += (B - E[i]) / (std::abs(B) + std::abs(E[i]) + 1e-300);
        }
        tight /= static_cast<double>(n - 1);
        if (!found || tight <= best_tight + 1e-12) {
            found = true;
            best_tight = std::min(best_tight, tight);
            best.eta = eta;
            best.C = C;
            best.tightness = tight;
        }
    }
    if (!found) throw NumericalError("damping_fit: no feasible eta on the grid");
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double lhs = dE[i] + best.eta * E[i] - best.C * N[i];
        const double scale = std::abs(dE[i]) + best.eta * std::abs(E[i]) + best.C * N[i];
        if (lhs > 1e-10 * scale) ++best.violation_count;
    }
    return best;
}

void apply_damping_fit(EnergyTrace& trace, const DampingFitOptions& opts) {
    const DampingFit fit = damping_fit(trace, opts);
    trace.fitted_eta = fit.eta;
    trace.fitted_C = fit.C;
    trace.violation_count = fit.violation_count;
}

IntegralBoundFit fit_integral_bound(const std::vector<double>& t, const std::vector<double>& lhs, double initial,
                                    const std::vector<double>& forcing, int grid_points, double theta_max) {
    check_samples(t, lhs.size(), "fit_integral_bound");
    if (forcing.size() != t.size()) throw DomainError("fit_integral_bound: forcing not aligned with times");
    const std::size_t n = t.size();
    if (!(theta_max > 0.0)) {
        double observed = 0.0;
        if (lhs[0] > 0.0)
            for (std::size_t i = 1; i < n; ++i)
                if (lhs[i] > 0.0) observed = std::max(observed, -std::log(lhs[i] / lhs[0]) / (t[i] - t[0]));
        // With lhs ~ l0 e^{-r t} and forcing ~ f0 e^{-r t}, C stays at its t = 0 value up to
        // theta = r + f0 / l0, so the grid has to reach past that point.
        const double lift = initial > 0.0 ? forcing[0] / initial : 0.0;
        theta_max = std::max(1.0, 2.0 * (observed + lift));
    }
    const int grid = std::max(2, grid_points);

    IntegralBoundFit best;
    double best_tight = std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<double> rhs(n);
    // theta = 0 is excluded: the bound is only meaningful with a positive rate
    for (int j = 1; j < grid; ++j) {
        const double theta = theta_max * j / (grid - 1);
        const std::vector<double> conv = damped_convolution(t, forcing, theta);
        double C = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = std::exp(-theta * (t[i] - t[0])) * initial + conv[i];
            if (rhs[i] > 0.0) C = std::max(C, lhs[i] / rhs[i]);
            else if (lhs[i] > 0.0) feasible = false;
        }
        if (!feasible) continue;
        double tight = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double b = C * rhs[i];
            tight += (b - lhs[i]) / (std::abs(b) + std::abs(lhs[i]) + 1e-300);
        }
        tight /= static_cast<double>(n);
        if (!found || tight <= best_tight + 1e-12) {
            found = true;
            best_tight = std::min(best_tight, tight);
            best.theta = theta;
            best.C = C;
        }
    }
    if (!found) throw NumericalError("fit_integral_bound: no feasible theta on the grid");
    const std::vector<double> conv = damped_convolution(t, forcing, best.theta);
    best.max_gap = -std::numeric_limits<double>::infinity();
    best.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double b = best.C * (std::exp(-best.theta * (t[i] - t[0])) * initial + conv[i]);
        best.max_gap = std::max(best.max_gap, lhs[i] - b);
        if (b > 0.0) best.min_slack = std::min(best.min_slack, (b - lhs[i]) / b);
        if (lhs[i] - b > 1e-12 * std::max(std::abs(b), std::abs(lhs[i]))) ++best.violation_count;
    }
    return best;
}

IntegralBoundFit lemma_sample_check(const EnergyTrace& trace) {
    return fit_integral_bound(trace.times, trace.H1_values, trace.H1_values.front(), trace.L2_values);
}

}  // namespace rollwave
