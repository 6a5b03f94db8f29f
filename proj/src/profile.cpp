#include "rollwave/profile.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "rollwave/spectral.hpp"

namespace rollwave {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Newton state in the scaled coordinate s = kappa x on [0, 2 pi).
struct Unknowns {
    Vec tau;
    double c = 0.0;
    double q = 0.0;
    double kappa = 1.0;
};

enum class Scalars { None, Speed, Discharge, SpeedAndWavenumber };

struct System {
    const ModelParams& params;
    Eigen::MatrixXd ds;  // d/ds
    Scalars scalars;
    bool phase;
    Vec phase_row;  // d/ds of the reference profile, divided by N
    double amplitude_target = 0.0;
    Vec cos_row;

    int n() const { return static_cast<int>(ds.rows()); }

    int extra() const {
        int e = phase ? 1 : 0;
        if (scalars == Scalars::SpeedAndWavenumber) e += 1;
        return e;
    }

    Vec ode_residual(const Unknowns& x) const {
        const int m = n();
        const Vec tau_s = ds * x.tau;
        Vec inner(m), rest(m);
        for (int j = 0; j < m; ++j) {
            const double t = x.tau[j];
            inner[j] = params.viscosity(t) * tau_s[j];
            rest[j] = (x.c * x.c + params.flux_slope(t)) * x.kappa * tau_s[j] -
                      params.source(t, x.q - x.c * t);
        }
        return x.c * x.kappa * x.kappa * (ds * inner) + rest;
    }

    Vec residual(const Unknowns& x) const {
        const int m = n();
        Vec r(m + extra());
        r.head(m) = ode_residual(x);
        int row = m;
        if (phase) r[row++] = phase_row.dot(x.tau);
        if (scalars == Scalars::SpeedAndWavenumber) r[row++] = cos_row.dot(x.tau) - 0.5 * amplitude_target;
        return r;
    }

    Eigen::MatrixXd jacobian(const Unknowns& x) const {
        const int m = n();
        const int cols = m + extra();
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(cols, cols);
        const Vec tau_s = ds * x.tau;
        Vec g(m), gp_taus(m), coef(m), diag(m), inner(m);
        for (int j = 0; j < m; ++j) {
            const double t = x.tau[j];
            const double u = x.q - x.c * t;
            g[j] = params.viscosity(t);
            gp_taus[j] = params.viscosity_slope(t) * tau_s[j];
            coef[j] = x.c * x.c + params.flux_slope(t);
            diag[j] = params.flux_curvature(t) * x.kappa * tau_s[j] -
                      (params.source_tau(t, u) - x.c * params.source_u(t, u));
            inner[j] = g[j] * tau_s[j];
        }
        const double k2 = x.kappa * x.kappa;
        Eigen::MatrixXd inner_jac = g.asDiagonal() * ds;
        inner_jac.diagonal() += gp_taus;
        jac.topLeftCorner(m, m) = (x.c * k2) * (ds * inner_jac);
        jac.topLeftCorner(m, m) += x.kappa * (coef.asDiagonal() * ds);
        jac.topLeftCorner(m, m).diagonal() += diag;

        const Vec ds_inner = ds * inner;
        int col = m;
        auto fill_scalar = [&](Scalars which) {
            Vec d(m);
            for (int j = 0; j < m; ++j) {
                const double t = x.tau[j];
                const double u = x.q - x.c * t;
                switch (which) {
                    case Scalars::Speed:
                        d[j] = k2 * ds_inner[j] + 2.0 * x.c * x.kappa * tau_s[j] +
                               params.source_u(t, u) * t;
                        break;
                    case Scalars::Discharge:
                        d[j] = -params.source_u(t, u);
                        break;
                    default:
                        d[j] = 2.0 * x.c * x.kappa * ds_inner[j] + coef[j] * tau_s[j];
                }
            }
            jac.block(0, col, m, 1) = d;
            ++col;
        };
        if (phase) {
            if (scalars == Scalars::Discharge)
                fill_scalar(Scalars::Discharge);
            else
                fill_scalar(Scalars::Speed);
        }
        if (scalars == Scalars::SpeedAndWavenumber) fill_scalar(Scalars::SpeedAndWavenumber);

        int row = m;
        if (phase) jac.block(row++, 0, 1, m) = phase_row.transpose();
        if (scalars == Scalars::SpeedAndWavenumber) jac.block(row++, 0, 1, m) = cos_row.transpose();
        return jac;
    }

    void apply_step(Unknowns& x, const Vec& step, double lambda) const {
        const int m = n();
        x.tau += lambda * step.head(m);
        int k = m;
        if (phase) {
            if (scalars == Scalars::Discharge)
                x.q += lambda * step[k++];
            else
                x.c += lambda * step[k++];
        }
        if (scalars == Scalars::SpeedAndWavenumber) x.kappa += lambda * step[k++];
    }
};

struct SolveResult {
    Unknowns x;
    int iterations = 0;
    double residual = 0.0;
};

WaveProfile make_profile(const ModelParams& base, const Unknowns& x, ProfileMode mode, int iterations) {
    WaveProfile p;
    p.params = base;
    p.params.speed = x.c;
    p.params.discharge = x.q;
    p.period = two_pi / x.kappa;
    p.tau_bar = x.tau;
    p.u_bar = (x.q - x.c * x.tau.array()).matrix();
    p.mode = mode;
    p.newton_iterations = iterations;
    p.residual_norm = reduce_profile_ode(p.params).residual(p.tau_bar, p.period).cwiseAbs().maxCoeff();
    return p;
}

SolveResult newton(const System& sys, Unknowns x, const NewtonOptions& opts, ProfileMode mode) {
    Vec r = sys.residual(x);
    double norm = r.cwiseAbs().maxCoeff();
    bool positivity_trouble = false;
    for (int it = 0; it <= opts.max_iterations; ++it) {
        if (!std::isfinite(norm)) break;
        if (norm <= opts.tolerance) return {x, it, norm};
        if (it == opts.max_iterations) break;
        const Eigen::MatrixXd jac = sys.jacobian(x);
        const Vec step = -jac.partialPivLu().solve(r);
        if (!step.allFinite()) break;
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt, lambda *= 0.5) {
            Unknowns trial = x;
            sys.apply_step(trial, step, lambda);
            if (trial.tau.minCoeff() < opts.positivity_floor || trial.kappa <= 0.0) {
                positivity_trouble = true;
                continue;
            }
            const Vec rt = sys.residual(trial);
            const double nt = rt.cwiseAbs().maxCoeff();
            if (std::isfinite(nt) && nt < (1.0 - 1e-4 * lambda) * norm) {
                x = std::move(trial);
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Stagnation at roundoff level counts as converged only below tolerance.
            if (positivity_trouble) throw PositivityViolation("Newton steps keep leaving tau > floor");
            break;
        }
    }
    throw ProfileNoConvergence("profile Newton iteration did not converge (residual " +
                                   std::to_string(norm) + ")",
                               make_profile(sys.params, x, mode, opts.max_iterations));
}

System build_system(const ModelParams& params, int n, Scalars scalars, bool phase, const Vec& ref) {
    System sys{params, spectral::differentiation_matrix(n, two_pi), scalars, phase, {}, 0.0, {}};
    if (phase) {
        sys.phase_row = (sys.ds * ref) / static_cast<double>(n);
        if (sys.phase_row.norm() == 0.0) {
            // A constant reference has no translation freedom to remove; use the first mode.
            const Vec s = spectral::grid(n, two_pi);
            sys.phase_row = s.array().sin().matrix() / static_cast<double>(n);
        }
    }
    return sys;
}

}  // namespace

std::string to_string(ProfileMode mode) {
    return mode == ProfileMode::FixedDischarge ? "fixed_discharge" : "fixed_speed";
}

Vec WaveProfile::grid() const { return spectral::grid(size(), period); }
Vec WaveProfile::tau_x() const { return spectral::derivative(tau_bar, period); }
Vec WaveProfile::u_x() const { return spectral::derivative(u_bar, period); }

Vec ReducedProfileOde::velocity(const Vec& tau) const {
    return (params.discharge - params.speed * tau.array()).matrix();
}

Vec ReducedProfileOde::residual(const Vec& tau, double period) const {
    const double c = params.speed;
    const Vec tau_x = spectral::derivative(tau, period);
    const Eigen::Index n = tau.size();
    Vec inner(n), rest(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double t = tau[j];
        inner[j] = params.viscosity(t) * tau_x[j];
        rest[j] = (c * c + params.flux_slope(t)) * tau_x[j] - params.source(t, params.discharge - c * t);
    }
    return c * spectral::derivative(inner, period) + rest;
}

FieldPair ReducedProfileOde::full_residual(const Vec& tau, const Vec& u, double period) const {
    return comoving_residual(params, period, {tau, u}, FieldPair::zeros(tau.size()));
}

ReducedProfileOde reduce_profile_ode(const ModelParams& params) {
    params.validate();
    if (params.speed == 0.0)
        throw DomainError("profile ODE is degenerate for c = 0 (u would be constant)");
    return {params};
}

WaveProfile solve_profile(const ModelParams& params, double period, const Vec& tau_guess,
                          const NewtonOptions& opts) {
    params.validate();
    if (!(period > 0.0)) throw DomainError("period must be positive");
    if (tau_guess.size() < 8) throw DomainError("profile grid needs at least 8 points");
    if (tau_guess.minCoeff() <= 0.0) throw DomainError("profile guess must have tau > 0");
    if (params.speed == 0.0) throw DomainError("profile solve needs a nonzero speed guess");

    const int n = static_cast<int>(tau_guess.size());
    Scalars scalars = Scalars::None;
    if (opts.phase_condition)
        scalars = opts.mode == ProfileMode::FixedDischarge ? Scalars::Speed : Scalars::Discharge;
    const System sys = build_system(params, n, scalars, opts.phase_condition, tau_guess);
    Unknowns x{tau_guess, params.speed, params.discharge, two_pi / period};
    const SolveResult res = newton(sys, x, opts, opts.mode);
    if (res.x.c == 0.0) throw NumericalError("profile solve converged to c = 0");
    return make_profile(params, res.x, opts.mode, res.iterations);
}

WaveProfile solve_profile(const WaveProfile& guess, const NewtonOptions& opts) {
    return solve_profile(guess.params, guess.period, guess.tau_bar, opts);
}

WaveProfile seed_small_amplitude(const ModelParams& params, double amplitude, int n,
                                 const NewtonOptions& opts) {
    params.validate();
    if (params.system != SystemKind::StVenant) throw DomainError("roll-wave seeds need the St. Venant system");
    if (!(params.froude > 2.0)) throw DomainError("small-amplitude roll waves need F > 2");
    if (!(amplitude > 0.0) || amplitude >= 1.0) throw DomainError("seed amplitude must lie in (0, 1)");
    if (n < 8) throw DomainError("profile grid needs at least 8 points");

    ModelParams p = params;
    p.speed = 1.0 / p.froude;
    p.discharge = 1.0 + p.speed;
    const Vec s = spectral::grid(n, two_pi);
    Unknowns x{(1.0 + amplitude * s.array().cos()).matrix(), p.speed, p.discharge,
               std::sqrt((p.froude - 2.0) / p.nu)};
    System sys = build_system(p, n, Scalars::SpeedAndWavenumber, true, x.tau);
    sys.amplitude_target = amplitude;
    sys.cos_row = s.array().cos().matrix() / static_cast<double>(n);
    const SolveResult res = newton(sys, x, opts, ProfileMode::FixedDischarge);
    return make_profile(p, res.x, ProfileMode::FixedDischarge, res.iterations);
}

WaveProfile seed_roll_wave(const ModelParams& params, double period, int n, const SeedOptions& opts) {
    if (!(period > 0.0)) throw DomainError("period must be positive");
    double eps = opts.initial_amplitude;
    WaveProfile wave = seed_small_amplitude(params, eps, n, opts.newton);
    if (wave.period > period)
        throw DomainError("requested period lies below the small-amplitude onset period " +
                          std::to_string(wave.period));
    Unknowns x{wave.tau_bar, wave.speed(), wave.discharge(), two_pi / wave.period};
    const Vec s = spectral::grid(n, two_pi);
    while (wave.period < period) {
        eps += opts.amplitude_step;
        if (eps > opts.max_amplitude)
            throw NumericalError("amplitude family never reached the requested period");
        System sys = build_system(wave.params, n, Scalars::SpeedAndWavenumber, true, x.tau);
        sys.amplitude_target = eps;
        sys.cos_row = s.array().cos().matrix() / static_cast<double>(n);
        const SolveResult res = newton(sys, x, opts.newton, ProfileMode::FixedDischarge);
        x = res.x;
        wave = make_profile(wave.params, x, ProfileMode::FixedDischarge, res.iterations);
    }
    ModelParams p = wave.params;
    return solve_profile(p, period, wave.tau_bar, opts.newton);
}

namespace {

double parameter_of(const WaveProfile& w, ContinuationParameter which) {
    return which == ContinuationParameter::Froude ? w.params.froude : w.period;
}

}  // namespace

ContinuationRun continue_in_parameter(const WaveProfile& start, double target, const StepControl& control,
                                      ContinuationParameter which) {
    if (!(control.initial_step > 0.0) || !(control.min_step > 0.0) || control.max_step < control.min_step)
        throw DomainError("invalid continuation step control");
    ContinuationRun run;
    run.parameter = which;
    run.path.push_back(parameter_of(start, which));
    run.profiles.push_back(start);
    const double direction = target >= parameter_of(start, which) ? 1.0 : -1.0;
    double h = control.initial_step;
    const double tiny = 1e-12 * std::max(1.0, std::abs(target));

    while (std::abs(target - run.path.back()) > tiny) {
        const WaveProfile& last = run.profiles.back();
        const double p0 = run.path.back();
        const double step = std::min(h, std::abs(target - p0));
        const double p1 = p0 + direction * step;

        // secant predictor from the last two accepted profiles
        Vec tau_pred = last.tau_bar;
        double c_pred = last.speed(), q_pred = last.discharge();
        if (run.profiles.size() >= 2) {
            const WaveProfile& prev = run.profiles[run.profiles.size() - 2];
            const double prev_step = p0 - run.path[run.path.size() - 2];
            const double w = (p1 - p0) / prev_step;
            tau_pred += w * (last.tau_bar - prev.tau_bar);
            c_pred += w * (last.speed() - prev.speed());
            q_pred += w * (last.discharge() - prev.discharge());
            if (tau_pred.minCoeff() <= control.newton.positivity_floor) tau_pred = last.tau_bar;
        }
        ModelParams params = last.params;
        params.speed = c_pred;
        params.discharge = q_pred;
        double period = last.period;
        if (which == ContinuationParameter::Froude)
            params.froude = p1;
        else
            period = p1;

        StepDiagnostic diag;
        diag.parameter = p1;
        diag.step = step;
        try {
            WaveProfile next = solve_profile(params, period, tau_pred, control.newton);
            diag.newton_iterations = next.newton_iterations;
            const double change = (next.tau_bar - last.tau_bar).cwiseAbs().maxCoeff();
            if (last.amplitude() > 0.0 && next.amplitude() < control.min_amplitude_ratio * last.amplitude()) {
                diag.note = "amplitude collapse";
            } else if (change > control.max_change) {
                diag.note = "profile change above step bound";
            } else {
                diag.accepted = true;
                run.path.push_back(p1);
                run.profiles.push_back(std::move(next));
                run.diagnostics.push_back(diag);
                h = std::min(control.max_step, h * control.growth);
                continue;
            }
        } catch (const NumericalError& e) {
            diag.note = e.what();
        }
        run.diagnostics.push_back(diag);
        h *= 0.5;
        if (h < control.min_step) {
            run.failed = true;
            run.failure_reason = "step floor reached at parameter " + std::to_string(p0);
            break;
        }
    }
    return run;
}

double check_mean_identity(const WaveProfile& profile, const std::function<double(double)>& f) {
    const Vec ux = profile.u_x();
    double acc = 0.0;
    for (int j = 0; j < profile.size(); ++j) acc += f(profile.tau_bar[j]) * ux[j];
    return acc / profile.size();
}

WaveProfile refine_profile(const WaveProfile& profile, int n, const NewtonOptions& opts) {
    const Vec tau = spectral::resample(profile.tau_bar, n);
    NewtonOptions o = opts;
    o.mode = profile.mode;
    return solve_profile(profile.params, profile.period, tau, o);
}

}  // namespace rollwave
