#include "rollwave/shock.hpp"

#include <cmath>

namespace rollwave {

namespace {

void require_gas(const ModelParams& params) {
    params.validate();
    if (params.system != SystemKind::IsentropicGas) throw DomainError("shock profiles need the isentropic gas system");
}

// Least-squares slope of log|y| against x over the samples passing the floor.
double tail_slope(const Vec& x, const Vec& y, double lo, double hi, double floor, bool& ok) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x[j] < lo || x[j] > hi || std::abs(y[j]) <= floor) continue;
        const double ly = std::log(std::abs(y[j]));
        sx += x[j];
        sy += ly;
        sxx += x[j] * x[j];
        sxy += x[j] * ly;
        ++count;
    }
    ok = count >= 5;
    if (!ok) return 0.0;
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

// Decay rates of y on the left and right tails, |x| in [0.3 L, 0.8 L].
std::pair<double, double> tail_rates(const Vec& x, const Vec& y_left, const Vec& y_right, double floor,
                                     double fallback_left, double fallback_right) {
    const double L = x[x.size() - 1];
    bool ok = false;
    double left = tail_slope(x, y_left, -0.8 * L, -0.3 * L, floor, ok);
    if (!ok) left = fallback_left;
    double right = -tail_slope(x, y_right, 0.3 * L, 0.8 * L, floor, ok);
    if (!ok) right = fallback_right;
    return {left, right};
}

}  // namespace

double shock_speed(const ModelParams& params, double tau_minus, double tau_plus) {
    require_gas(params);
    if (!(tau_minus > 0.0 && tau_plus > 0.0)) throw DomainError("shock endstates must be positive");
    if (tau_minus == tau_plus) throw DomainError("shock endstates must differ");
    const double c2 = -(params.flux(tau_plus) - params.flux(tau_minus)) / (tau_plus - tau_minus);
    if (!(c2 > 0.0)) throw NoProfileError("Rankine-Hugoniot speed is not real");
    return std::copysign(std::sqrt(c2), tau_plus - tau_minus);
}

double endstate_rate(const ModelParams& params, double speed, double tau, bool unit_viscosity_form) {
    const double nu = unit_viscosity_form ? 1.0 : params.nu;
    return tau * std::abs(speed * speed + params.flux_slope(tau)) / (nu * std::abs(speed));
}

double default_half_width(const ModelParams& params, double tau_minus, double tau_plus) {
    const double c = shock_speed(params, tau_minus, tau_plus);
    const double rate = std::min(endstate_rate(params, c, tau_minus), endstate_rate(params, c, tau_plus));
    return 20.0 / rate;
}

ShockProfile solve_shock_profile(const ModelParams& params_in, double tau_minus, double tau_plus,
                                 const ShockOptions& opts) {
    require_gas(params_in);
    if (opts.n < 5 || opts.n % 2 == 0) throw DomainError("shock grid needs an odd number of nodes >= 5");
    ShockProfile s;
    s.params = params_in;
    s.tau_minus = tau_minus;
    s.tau_plus = tau_plus;
    s.u_minus = opts.u_minus;
    s.unit_viscosity_form = opts.unit_viscosity_form;
    const double c = shock_speed(params_in, tau_minus, tau_plus);
    s.speed = c;
    s.params.speed = c;
    const ModelParams& P = s.params;
    const double c2 = c * c;
    s.rh_residual = std::abs(c2 + (P.flux(tau_plus) - P.flux(tau_minus)) / (tau_plus - tau_minus));
    for (double t : {tau_minus, tau_plus})
        if (std::abs(c2 + P.flux_slope(t)) <= 1e-12 * (c2 + std::abs(P.flux_slope(t))))
            throw NoProfileError("characteristic shock: p'(tau) = -c^2 at an endstate");
    s.q = c2 * tau_minus + P.flux(tau_minus);
    const double nu = opts.unit_viscosity_form ? 1.0 : P.nu;
    const double q = s.q;
    auto rhs = [&](double tau) { return -(tau / (nu * c)) * (c2 * tau + P.flux(tau) - q); };

    // The right side must keep one sign strictly between the endstates.
    const double jump = tau_plus - tau_minus;
    for (int k = 1; k < 64; ++k) {
        const double t = tau_minus + jump * k / 64.0;
        if (!(rhs(t) * jump > 0.0)) throw NoProfileError("no connecting orbit between the endstates");
    }

    s.linear_rate_minus = endstate_rate(P, c, tau_minus, opts.unit_viscosity_form);
    s.linear_rate_plus = endstate_rate(P, c, tau_plus, opts.unit_viscosity_form);
    const double slow = std::min(s.linear_rate_minus, s.linear_rate_plus);
    s.half_width = opts.half_width > 0.0 ? opts.half_width : 20.0 / slow;
    const int n = opts.n;
    const int mid = n / 2;
    s.x = Vec::LinSpaced(n, -s.half_width, s.half_width);
    s.x[mid] = 0.0;
    const double dx = 2.0 * s.half_width / (n - 1);
    s.tau_bar.resize(n);
    s.tau_bar[mid] = 0.5 * (tau_minus + tau_plus);

    auto rk4 = [&](double tau, double h) {
        const double k1 = rhs(tau);
        const double k2 = rhs(tau + 0.5 * h * k1);
        const double k3 = rhs(tau + 0.5 * h * k2);
        const double k4 = rhs(tau + h * k3);
        return tau + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    const int sub = std::max(1, opts.substeps);
    for (int dir : {1, -1}) {
        double tau = s.tau_bar[mid];
        const double h = dir * dx / sub;
        for (int j = mid + dir; j >= 0 && j < n; j += dir) {
            for (int k = 0; k < sub; ++k) tau = rk4(tau, h);
            s.tau_bar[j] = tau;
        }
    }
    if (!s.tau_bar.allFinite() || s.tau_bar.minCoeff() <= 0.0) throw NumericalError("shock profile integration failed");

    s.tau_x.resize(n);
    for (int j = 0; j < n; ++j) s.tau_x[j] = rhs(s.tau_bar[j]);
    s.u_bar = (opts.u_minus - c * (s.tau_bar.array() - tau_minus)).matrix();
    s.u_x = -c * s.tau_x;

    s.endstate_gap = std::max(std::abs(s.tau_bar[0] - tau_minus), std::abs(s.tau_bar[n - 1] - tau_plus));
    if (s.endstate_gap > opts.endstate_tolerance * std::abs(jump))
        throw DomainError("half-width too small: profile has not reached its endstates");

    const Vec left = (s.tau_bar.array() - tau_minus).matrix();
    const Vec right = (s.tau_bar.array() - tau_plus).matrix();
    const auto rates = tail_rates(s.x, left, right, 1e-11 * std::abs(jump), s.linear_rate_minus, s.linear_rate_plus);
    s.decay_rate_minus = rates.first;
    s.decay_rate_plus = rates.second;
    s.decay_rate = std::min(rates.first, rates.second);
    return s;
}

Vec shock_alpha(const ShockProfile& s) {
    const ModelParams& P = s.params;
    Vec a(s.size());
    for (int j = 0; j < s.size(); ++j)
        a[j] = -P.flux_slope(s.tau_bar[j]) + P.viscosity_slope(s.tau_bar[j]) * s.u_x[j];
    return a;
}

LinearCoefficients shock_linearization(const ShockProfile& s) {
    LinearCoefficients lc;
    lc.params = s.params;
    lc.speed = s.speed;
    lc.period = 2.0 * s.half_width;
    lc.tau_bar = s.tau_bar;
    lc.u_bar = s.u_bar;
    lc.alpha = shock_alpha(s);
    const int n = s.size();
    lc.viscosity.resize(n);
    lc.m21.resize(n);
    lc.m22.resize(n);
    for (int j = 0; j < n; ++j) {
        lc.viscosity[j] = s.params.viscosity(s.tau_bar[j]);
        lc.m21[j] = s.params.source_tau(s.tau_bar[j], s.u_bar[j]);
        lc.m22[j] = s.params.source_u(s.tau_bar[j], s.u_bar[j]);
    }
    return lc;
}

ShockInterpolant build_interpolant(const ShockProfile& s, double theta) {
    if (theta > s.decay_rate * (1.0 + 1e-9))
        throw DomainError("requested decay exceeds the profile decay rate");
    const double target = theta > 0.0 ? theta : s.decay_rate;
    ShockInterpolant I;
    const LinearCoefficients lc = shock_linearization(s);
    I.rate = lc.rate();
    const ModelParams& P = s.params;
    I.w_minus = -P.flux_slope(s.tau_minus) / P.viscosity(s.tau_minus);
    I.w_plus = -P.flux_slope(s.tau_plus) / P.viscosity(s.tau_plus);
    // Transition width of the profile itself, capped so the switch converges
    // at twice the target rate or faster.
    const double slope = s.tau_x.cwiseAbs().maxCoeff();
    const double fit = slope > 0.0 ? std::abs(s.tau_plus - s.tau_minus) / slope : 1.0 / target;
    I.width = std::min(fit, 1.0 / target);
    const int n = s.size();
    I.values.resize(n);
    for (int j = 0; j < n; ++j)
        I.values[j] = I.w_minus + (I.w_plus - I.w_minus) * 0.5 * (1.0 + std::tanh(s.x[j] / I.width));
    const Vec diff = I.rate - I.values;
    I.sup_difference = diff.cwiseAbs().maxCoeff();
    const double scale = std::max(std::abs(I.w_plus), std::abs(I.w_minus));
    const auto rates = tail_rates(s.x, diff, diff, 1e-11 * scale, s.decay_rate_minus, s.decay_rate_plus);
    I.fitted_decay = std::min(rates.first, rates.second);
    return I;
}

Eigen::MatrixXd fd_derivative_matrix(int n, double h) {
    if (n < 5) throw DomainError("finite differences need at least 5 nodes");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    const double s = 1.0 / (12.0 * h);
    D.row(0).head(5) << -25, 48, -36, 16, -3;
    D.row(1).head(5) << -3, -10, 18, -6, 1;
    for (int j = 2; j < n - 2; ++j) {
        D(j, j - 2) = 1;
        D(j, j - 1) = -8;
        D(j, j + 1) = 8;
        D(j, j + 2) = -1;
    }
    D.row(n - 1).tail(5) << 3, -16, 36, -48, 25;
    D.row(n - 2).tail(5) << -1, 6, -18, 10, 3;
    return D * s;
}

Vec fd_derivative(const Vec& f, double h) {
    const Eigen::Index n = f.size();
    if (n < 5) throw DomainError("finite differences need at least 5 nodes");
    Vec d(n);
    const double s = 1.0 / (12.0 * h);
    d[0] = s * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
    d[1] = s * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
    for (Eigen::Index j = 2; j < n - 2; ++j) d[j] = s * (f[j - 2] - 8 * f[j - 1] + 8 * f[j + 1] - f[j + 2]);
    d[n - 1] = s * (3 * f[n - 5] - 16 * f[n - 4] + 36 * f[n - 3] - 48 * f[n - 2] + 25 * f[n - 1]);
    d[n - 2] = s * (-f[n - 5] + 6 * f[n - 4] - 18 * f[n - 3] + 10 * f[n - 2] + 3 * f[n - 1]);
    return d;
}

Vec cumulative_integral(const Vec& f, double h) {
    const Eigen::Index n = f.size();
    if (n % 2 == 0) throw DomainError("cumulative_integral expects an odd grid centered at 0");
    const Eigen::Index mid = n / 2;
    const Vec df = fd_derivative(f, h);
    Vec F(n);
    F[mid] = 0.0;
    // Trapezoid plus the Euler-Maclaurin endpoint correction -h^2/12 (f'(b) - f'(a)).
    double trap = 0.0;
    for (Eigen::Index j = mid + 1; j < n; ++j) {
        trap += 0.5 * h * (f[j - 1] + f[j]);
        F[j] = trap - h * h / 12.0 * (df[j] - df[mid]);
    }
    trap = 0.0;
    for (Eigen::Index j = mid - 1; j >= 0; --j) {
        trap -= 0.5 * h * (f[j + 1] + f[j]);
        F[j] = trap + h * h / 12.0 * (df[mid] - df[j]);
    }
    return F;
}

ShockGauge build_shock_gauge(const ShockProfile& s, const ShockInterpolant& I, const ShockGaugeOptions& opts) {
    if (I.values.size() != s.size()) throw DomainError("interpolant does not match the profile grid");
    const LinearCoefficients lc = shock_linearization(s);
    const Vec diff = I.rate - I.values;
    const double k = opts.large_constant ? opts.large_constant_C : 2.0 / s.speed;
    if (opts.large_constant && !(k > 0.0)) throw DomainError("large constant must be positive");
    const Vec F = cumulative_integral(diff, s.dx());
    ShockGauge out;
    out.exponent_sup = F.cwiseAbs().maxCoeff();
    const Vec phi1 = (-k * F).array().exp().matrix();
    const Vec phi1_x = (-k * diff.array() * phi1.array()).matrix();
    // With phi3 fixed algebraically, the tau_x^2 coefficient is r phi1 - (alpha^2 w / b) phi2 where
    // r = rate - (c k / 2)(rate - I); the main-text choice k = 2/c gives r = I.
    const Vec r = (I.rate.array() - 0.5 * s.speed * k * diff.array()).matrix();
    out.triple = complete_gauge(lc, phi1, phi1_x, r, opts.gauge);
    return out;
}

FieldPair shock_steady_residual(const ShockProfile& s) {
    const double h = s.dx();
    const ModelParams& P = s.params;
    const Vec tx = fd_derivative(s.tau_bar, h);
    const Vec ux = fd_derivative(s.u_bar, h);
    Vec flux(s.size());
    for (int j = 0; j < s.size(); ++j) flux[j] = P.viscosity(s.tau_bar[j]) * ux[j] - P.flux(s.tau_bar[j]);
    FieldPair r;
    r.tau = s.speed * tx + ux;
    r.u = s.speed * ux + fd_derivative(flux, h);
    return r;
}

double line_norm(const FieldPair& U, double h, int k) {
    Vec t = U.tau, u = U.u;
    auto trap = [h](const Vec& f) {
        const Eigen::Index n = f.size();
        return h * (f.squaredNorm() - 0.5 * (f[0] * f[0] + f[n - 1] * f[n - 1]));
    };
    double acc = trap(t) + trap(u);
    for (int j = 1; j <= k; ++j) {
        t = fd_derivative(t, h);
        u = fd_derivative(u, h);
        acc += trap(t) + trap(u);
    }
    return std::sqrt(acc);
}

double line_energy(const FieldPair& U, const GaugeTriple& g, double h) {
    const Vec tx = fd_derivative(U.tau, h);
    const Vec ux = fd_derivative(U.u, h);
    const Eigen::ArrayXd d = 0.5 * g.phi1.array() * tx.array().square() +
                             0.5 * g.phi2 * g.weight_values.array() * ux.array().square() +
                             g.phi3.array() * U.tau.array() * ux.array();
    const Eigen::Index n = d.size();
    return h * (d.sum() - 0.5 * (d[0] + d[n - 1]));
}

ShockRun evolve_shock_linear(const ShockProfile& s, const GaugeTriple& gauge, const FieldPair& U0,
                             const ShockEvolveOptions& opts) {
    const int n = s.size();
    if (U0.tau.size() != n || U0.u.size() != n) throw DomainError("initial data not on the shock grid");
    const int steps = static_cast<int>(std::ceil(opts.T / opts.dt - 1e-9));
    if (!(opts.dt > 0.0) || steps < 0) throw DomainError("evolution needs dt > 0 and T >= 0");
    const double h = s.dx();
    const LinearCoefficients lc = shock_linearization(s);
    const Eigen::MatrixXd D = fd_derivative_matrix(n, h);
    // Interior unknowns only; U = 0 at x = +-L.
    const int m = n - 2;
    const Eigen::MatrixXd Di = D.block(1, 1, m, m);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    const Eigen::MatrixXd Dfull_b = D * lc.viscosity.asDiagonal() * D;
    L.topLeftCorner(m, m) = s.speed * Di;
    L.topRightCorner(m, m) = Di;
    L.bottomLeftCorner(m, m) = (D * lc.alpha.asDiagonal()).block(1, 1, m, m);
    L.bottomLeftCorner(m, m).diagonal() += lc.m21.segment(1, m);
    L.bottomRightCorner(m, m) = s.speed * Di + Dfull_b.block(1, 1, m, m);
    L.bottomRightCorner(m, m).diagonal() += lc.m22.segment(1, m);
    const ImexStepper stepper(L, opts.dt);

    auto unpack = [&](const Vec& x) {
        FieldPair U = FieldPair::zeros(n);
        U.tau.segment(1, m) = x.head(m);
        U.u.segment(1, m) = x.tail(m);
        return U;
    };
    Vec x(2 * m);
    x << U0.tau.segment(1, m), U0.u.segment(1, m);

    const int layer = std::max(1, static_cast<int>(std::ceil(opts.boundary_fraction * n)));
    auto boundary_max = [&](const FieldPair& U) {
        double b = 0.0;
        for (int j = 0; j < layer; ++j) {
            b = std::max({b, std::abs(U.tau[j]), std::abs(U.u[j]), std::abs(U.tau[n - 1 - j]),
                          std::abs(U.u[n - 1 - j])});
        }
        return b;
    };
    const double scale0 = std::max(U0.tau.cwiseAbs().maxCoeff(), U0.u.cwiseAbs().maxCoeff());
    if (!(scale0 > 0.0)) throw DomainError("initial perturbation is zero");

    ShockRun run;
    run.trace.k = opts.sobolev_k;
    auto sample = [&](double t, const FieldPair& U) {
        run.trace.times.push_back(t);
        run.trace.E_values.push_back(line_energy(U, gauge, h));
        run.trace.L2_values.push_back(line_norm(U, h, 0));
        run.trace.H1_values.push_back(line_norm(U, h, 1));
        run.trace.Hk_values.push_back(line_norm(U, h, opts.sobolev_k));
        run.boundary_ratio = std::max(run.boundary_ratio, boundary_max(U) / scale0);
    };
    sample(0.0, unpack(x));
    run.trajectory.times.push_back(0.0);
    run.trajectory.states.push_back(unpack(x));
    const double guard = opts.overflow_factor * std::max(x.norm(), 1e-300);
    for (int k = 1; k <= steps; ++k) {
        x = stepper.step(x, (k - 1) * opts.dt, {});
        const double t = k * opts.dt;
        if (!x.allFinite() || x.norm() > guard) throw IntegrationError("shock evolution blew up", t);
        if (k % std::max(1, opts.sample_every) == 0 || k == steps) {
            const FieldPair U = unpack(x);
            sample(t, U);
            if ((opts.snapshot_every > 0 && k % opts.snapshot_every == 0) || k == steps) {
                run.trajectory.times.push_back(t);
                run.trajectory.states.push_back(U);
            }
        }
    }
    if (run.boundary_ratio > opts.boundary_tolerance)
        throw TruncationError("perturbation reached the truncated boundary (ratio " +
                              std::to_string(run.boundary_ratio) + ")");
    if (run.trace.size() >= 3) apply_damping_fit(run.trace);
    return run;
}

}  // namespace rollwave
