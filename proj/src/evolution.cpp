#include "rollwave/evolution.hpp"

#include <cmath>
#include <random>

#include "rollwave/spectral.hpp"

namespace rollwave {

namespace {

Vec stack(const FieldPair& v) {
    Vec x(2 * v.tau.size());
    x << v.tau, v.u;
    return x;
}

FieldPair split(const Vec& x) {
    const Eigen::Index n = x.size() / 2;
    return {x.head(n), x.tail(n)};
}

int dealias_size(int n) {
    int m = (3 * n + 1) / 2;
    return m + (m % 2);
}

int step_count(double T, double dt) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw DomainError("evolution needs dt > 0 and T >= 0");
    return static_cast<int>(std::ceil(T / dt - 1e-9));
}

// Nonlinear part of the perturbation equations about a background state: flux and
// source with their linearizations removed, so that L V plus this remainder is the
// full co-moving right-hand side minus its value at the background. The products
// are formed on the 3/2-padded grid when dealiasing; the linear part stays with the
// collocation operator L, which is what the implicit stage inverts.
class PerturbationRemainder {
public:
    PerturbationRemainder(const LinearCoefficients& bg, bool dealias)
        : P_(bg.params), n_(bg.size()), m_(dealias ? dealias_size(n_) : n_), period_(bg.period) {
        tbar_ = fine(bg.tau_bar);
        ubar_ = fine(bg.u_bar);
        ubar_x_ = fine(spectral::derivative(bg.u_bar, period_));
    }

    Vec fine(const Vec& v) const { return m_ != n_ ? spectral::resample(v, m_) : v; }
    Vec coarse(const Vec& v) const { return m_ != n_ ? spectral::resample(v, n_) : v; }
    int fine_size() const { return m_; }

    // flux and source remainders on the evaluation grid; source_full is h at the full state
    void operator()(const Vec& tau_f, const Vec& u_f, const Vec& ux_f, double t, Vec& flux, Vec& src,
                    Vec& source_full) const {
        flux.resize(m_);
        src.resize(m_);
        source_full.resize(m_);
        for (int j = 0; j < m_; ++j) {
            const double tb = tbar_[j], tt = tb + tau_f[j], uu = ubar_[j] + u_f[j];
            if (tt <= 0.0) throw BreakdownError("tau reached zero at t = " + std::to_string(t), t);
            const double dg = P_.viscosity(tt) - P_.viscosity(tb);
            const double pressure = P_.flux(tt) - P_.flux(tb) - P_.flux_slope(tb) * tau_f[j];
            flux[j] = dg * ux_f[j] + (dg - P_.viscosity_slope(tb) * tau_f[j]) * ubar_x_[j] - pressure;
            source_full[j] = P_.source(tt, uu);
            src[j] = source_full[j] - P_.source(tb, ubar_[j]) - P_.source_tau(tb, ubar_[j]) * tau_f[j] -
                     P_.source_u(tb, ubar_[j]) * u_f[j];
        }
    }

    const Vec& tbar_fine() const { return tbar_; }
    const Vec& ubar_x_fine() const { return ubar_x_; }

private:
    const ModelParams& P_;
    int n_, m_;
    double period_;
    Vec tbar_, ubar_, ubar_x_;
};

}  // namespace

double sobolev_norm(const FieldPair& v, double period, int k) {
    double acc = v.tau.squaredNorm() + v.u.squaredNorm();
    Vec t = v.tau, u = v.u;
    for (int j = 1; j <= k; ++j) {
        t = spectral::derivative(t, period);
        u = spectral::derivative(u, period);
        acc += t.squaredNorm() + u.squaredNorm();
    }
    return std::sqrt(acc * period / static_cast<double>(v.tau.size()));
}

FieldPair random_smooth_perturbation(int n, double period, int max_mode, double amplitude, unsigned seed) {
    if (n < 4 || max_mode < 1 || 2 * max_mode >= n) throw DomainError("random perturbation: bad mode range");
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vec x = spectral::grid(n, period);
    const double kappa = 2.0 * std::acos(-1.0) / period;
    FieldPair v = FieldPair::zeros(n);
    for (Vec* f : {&v.tau, &v.u}) {
        for (int m = 1; m <= max_mode; ++m) {
            const double a = normal(rng) / (m * m), b = normal(rng) / (m * m);
            *f += (a * (m * kappa * x).array().cos() + b * (m * kappa * x).array().sin()).matrix();
        }
        const double top = f->cwiseAbs().maxCoeff();
        if (top > 0.0) *f *= amplitude / top;
    }
    return v;
}

Eigen::MatrixXd linear_matrix(const LinearCoefficients& lc) {
    const int n = lc.size();
    const Eigen::MatrixXd D = spectral::differentiation_matrix(n, lc.period);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    L.topLeftCorner(n, n) = lc.speed * D;
    L.topRightCorner(n, n) = D;
    L.bottomLeftCorner(n, n) = D * lc.alpha.asDiagonal();
    L.bottomLeftCorner(n, n).diagonal() += lc.m21;
    L.bottomRightCorner(n, n) = lc.speed * D + D * lc.viscosity.asDiagonal() * D;
    L.bottomRightCorner(n, n).diagonal() += lc.m22;
    return L;
}

FieldPair remove_neutral_modes(const LinearCoefficients& lc, const FieldPair& U, double radius, int points) {
    if (!(radius > 0.0) || points < 4 || points % 2 != 0) throw DomainError("neutral projection needs r > 0 and an even contour");
    const Eigen::MatrixXd L = linear_matrix(lc);
    const Vec x = stack(U);
    const Eigen::Index m = x.size();
    // P x = (1/2 pi i) sum_k (z_k - L)^{-1} x dz_k; conjugate nodes give conjugate terms.
    Vec proj = Vec::Zero(m);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < points / 2; ++k) {
        const double th = 2.0 * pi * (k + 0.5) / points;
        const cplx z = std::polar(radius, th);
        Eigen::MatrixXcd A = -L.cast<cplx>();
        A.diagonal().array() += z;
        const Eigen::VectorXcd y = A.partialPivLu().solve(x.cast<cplx>());
        // dz = i z dtheta, dtheta = 2 pi / points
        proj += 2.0 * (y * z).real() / static_cast<double>(points);
    }
    return split(x - proj);
}

ImexStepper::ImexStepper(Eigen::MatrixXd implicit_matrix, double dt)
    : A_(std::move(implicit_matrix)), dt_(dt) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    gamma_ = 1.0 - 1.0 / std::sqrt(2.0);
    delta_ = 1.0 - 1.0 / (2.0 * gamma_);
    Eigen::MatrixXd M = -gamma_ * dt * A_;
    M.diagonal().array() += 1.0;
    lu_.compute(M);
}

Vec ImexStepper::step(const Vec& x, double t, const Explicit& explicit_part) const {
    const bool has_explicit = static_cast<bool>(explicit_part);
    Vec e1;
    Vec rhs = x;
    if (has_explicit) {
        e1 = explicit_part(x, t);
        rhs += dt_ * gamma_ * e1;
    }
    const Vec u2 = lu_.solve(rhs);
    rhs = x + dt_ * (1.0 - gamma_) * (A_ * u2);
    if (has_explicit) {
        const Vec e2 = explicit_part(u2, t + gamma_ * dt_);
        rhs += dt_ * (delta_ * e1 + (1.0 - delta_) * e2);
    }
    return lu_.solve(rhs);
}

LinearRun evolve_linear(const LinearCoefficients& lc, const GaugeTriple& gauge, const FieldPair& U0,
                        const EvolveOptions& opts) {
    if (U0.tau.size() != lc.size() || U0.u.size() != lc.size())
        throw DomainError("evolve_linear: initial data not on the profile grid");
    const int steps = step_count(opts.T, opts.dt);
    const ImexStepper stepper(linear_matrix(lc), opts.dt);
    LinearRun run;
    run.trace.k = opts.sobolev_k;
    Vec x = stack(U0);
    const double guard = opts.overflow_factor * std::max(x.norm(), 1e-300);

    auto sample = [&](double t, const Vec& state) {
        const FieldPair v = split(state);
        run.trace.times.push_back(t);
        run.trace.E_values.push_back(energy(v, gauge, lc));
        run.trace.L2_values.push_back(sobolev_norm(v, lc.period, 0));
        run.trace.H1_values.push_back(sobolev_norm(v, lc.period, 1));
        run.trace.Hk_values.push_back(sobolev_norm(v, lc.period, opts.sobolev_k));
    };
    sample(0.0, x);
    run.trajectory.times.push_back(0.0);
    run.trajectory.states.push_back(U0);
    for (int s = 1; s <= steps; ++s) {
        x = stepper.step(x, (s - 1) * opts.dt, {});
        const double t = s * opts.dt;
        if (!x.allFinite() || x.norm() > guard)
            throw IntegrationError("linear evolution blew up", t);
        if (s % std::max(1, opts.sample_every) == 0 || s == steps) sample(t, x);
        if ((opts.snapshot_every > 0 && s % opts.snapshot_every == 0) || s == steps) {
            run.trajectory.times.push_back(t);
            run.trajectory.states.push_back(split(x));
        }
    }
    if (run.trace.size() >= 3) apply_damping_fit(run.trace);
    return run;
}

FieldPair comoving_rhs(const ModelParams& params, double period, const FieldPair& W, bool dealias) {
    const int n = static_cast<int>(W.tau.size());
    const Vec tx = spectral::derivative(W.tau, period);
    const Vec ux = spectral::derivative(W.u, period);
    const int m = dealias ? dealias_size(n) : n;
    const Vec tf = dealias ? spectral::resample(W.tau, m) : W.tau;
    const Vec uf = dealias ? spectral::resample(W.u, m) : W.u;
    const Vec uxf = dealias ? spectral::resample(ux, m) : ux;
    if (tf.minCoeff() <= 0.0) throw BreakdownError("tau reached zero", 0.0);
    Vec flux(m), src(m);
    for (int j = 0; j < m; ++j) {
        flux[j] = params.viscosity(tf[j]) * uxf[j] - params.flux(tf[j]);
        src[j] = params.source(tf[j], uf[j]);
    }
    const Vec flux_c = dealias ? spectral::resample(flux, n) : flux;
    const Vec src_c = dealias ? spectral::resample(src, n) : src;
    FieldPair out;
    out.tau = params.speed * tx + ux;
    out.u = params.speed * ux + spectral::derivative(flux_c, period) + src_c;
    return out;
}

NonlinearRun evolve_nonlinear(const LinearCoefficients& bg, const FieldPair& U0_full, const NonlinearOptions& opts) {
    const int n = bg.size();
    if (U0_full.tau.size() != n || U0_full.u.size() != n)
        throw DomainError("evolve_nonlinear: initial data not on the background grid");
    if (U0_full.tau.minCoeff() <= 0.0) throw DomainError("evolve_nonlinear: tau must be positive");
    const int steps = step_count(opts.T, opts.dt);
    const Eigen::MatrixXd L = linear_matrix(bg);
    const ImexStepper stepper(L, opts.dt);
    const FieldPair base{bg.tau_bar, bg.u_bar};
    const PerturbationRemainder remainder(bg, opts.dealias);
    // residual of the background itself; zero up to the profile solver tolerance
    const Vec background = stack(comoving_rhs(bg.params, bg.period, base, false));
    const ImexStepper::Explicit rhs = [&](const Vec& x, double t) -> Vec {
        const FieldPair v = split(x);
        Vec flux, src, h;
        remainder(remainder.fine(v.tau), remainder.fine(v.u), remainder.fine(spectral::derivative(v.u, bg.period)), t,
                  flux, src, h);
        Vec out = background;
        out.tail(n) += spectral::derivative(remainder.coarse(flux), bg.period) + remainder.coarse(src);
        return out;
    };

    NonlinearRun run;
    Vec x = stack({U0_full.tau - base.tau, U0_full.u - base.u});
    const double guard = opts.overflow_factor * std::max(x.norm(), 1.0);
    auto record = [&](double t, const Vec& state, int s) {
        const FieldPair v = split(state);
        run.times.push_back(t);
        run.L2_values.push_back(sobolev_norm(v, bg.period, 0));
        run.H1_values.push_back(sobolev_norm(v, bg.period, 1));
        const FieldPair full{base.tau + v.tau, base.u + v.u};
        if ((opts.snapshot_every > 0 && s % opts.snapshot_every == 0) || s == 0 || s == steps) {
            run.trajectory.times.push_back(t);
            run.trajectory.states.push_back(full);
        }
        if (opts.delta_every > 0 && (s % opts.delta_every == 0 || s == steps)) {
            run.delta_times.push_back(t);
            run.delta_values.push_back(space_modulated_distance(full, base, bg.period, opts.delta).delta);
        }
    };
    record(0.0, x, 0);
    for (int s = 1; s <= steps; ++s) {
        x = stepper.step(x, (s - 1) * opts.dt, rhs);
        const double t = s * opts.dt;
        if (!x.allFinite() || x.norm() > guard) throw IntegrationError("nonlinear evolution blew up", t);
        if ((base.tau + x.head(n)).minCoeff() <= 0.0) throw BreakdownError("tau reached zero", t);
        if (s % std::max(1, opts.sample_every) == 0 || s == steps) record(t, x, s);
    }
    return run;
}

ModulationInput::Fields ModulationInput::fields(double t, int n, double period) const {
    const Vec x = spectral::grid(n, period);
    Fields f;
    f.psi.resize(n);
    f.psi_t.resize(n);
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    for (int j = 0; j < n; ++j) {
        f.psi[j] = psi(x[j], t);
        f.psi_t[j] = (psi(x[j], t + h) - psi(x[j], t - h)) / (2.0 * h);
    }
    f.psi_x = spectral::derivative(f.psi, period);
    return f;
}

double ModulationInput::smallness(double t, int n, double period, int k) const {
    const Fields f = fields(t, n, period);
    return sobolev_norm({f.psi_t, f.psi_x}, period, k);
}

ModulationInput modulation_from_formula(const std::string& formula, const std::map<std::string, double>& constants,
                                        double epsilon, int k) {
    const Expression e = Expression::parse(formula, constants);
    ModulationInput m;
    m.psi = [e](double x, double t) { return e(x, t); };
    m.formula = formula;
    m.epsilon = epsilon;
    m.sobolev_k = k;
    return m;
}

double modulated_energy(const FieldPair& V, const Vec& psi_x, const GaugeTriple& g, const LinearCoefficients& lc) {
    const Vec tx = spectral::derivative(V.tau, lc.period);
    const Vec ux = spectral::derivative(V.u, lc.period);
    const Eigen::ArrayXd density = 0.5 * g.phi1.array() * tx.array().square() +
                                   0.5 * g.phi2 * g.weight_values.array() * ux.array().square() +
                                   g.phi3.array() * V.tau.array() * ux.array();
    return ((1.0 - psi_x.array()) * density).mean() * lc.period;
}

ModulatedRun evolve_modulated(const LinearCoefficients& bg, const GaugeTriple& gauge, const FieldPair& V0,
                              const ModulationInput& mod, const ModulatedOptions& opts) {
    const int n = bg.size();
    if (V0.tau.size() != n || V0.u.size() != n) throw DomainError("evolve_modulated: V0 not on the background grid");
    if (!mod.psi) throw DomainError("evolve_modulated: no phase function");
    const int steps = step_count(opts.T, opts.dt);
    const Eigen::MatrixXd L = linear_matrix(bg);
    const ImexStepper stepper(L, opts.dt);
    const double period = bg.period;
    const ModelParams& P = bg.params;
    const PerturbationRemainder remainder(bg, opts.dealias);
    const Vec ubar_x = spectral::derivative(bg.u_bar, period);
    const Vec tbar_x = spectral::derivative(bg.tau_bar, period);

    const ImexStepper::Explicit rhs = [&](const Vec& x, double t) -> Vec {
        const FieldPair v = split(x);
        const ModulationInput::Fields psi = mod.fields(t, n, period);
        const Eigen::ArrayXd denom = 1.0 - psi.psi_x.array();
        if (denom.minCoeff() <= 0.5) throw InvalidModulation("1 - psi_x dropped to 1/2 or below");
        const Vec tx = spectral::derivative(v.tau, period);
        const Vec ux = spectral::derivative(v.u, period);
        const Vec tau_f = remainder.fine(v.tau), ux_f = remainder.fine(ux);
        const Vec psix_f = remainder.fine(psi.psi_x);
        Vec flux, src, hw;
        remainder(tau_f, remainder.fine(v.u), ux_f, t, flux, src, hw);
        const Vec& tbar_f = remainder.tbar_fine();
        const Vec& ubar_x_f = remainder.ubar_x_fine();
        for (int j = 0; j < remainder.fine_size(); ++j) {
            const double full_ux = ubar_x_f[j] + ux_f[j];
            flux[j] += opts.viscous_psi_sign * psix_f[j] / (1.0 - psix_f[j]) *
                       P.viscosity(tbar_f[j] + tau_f[j]) * full_ux;
            src[j] -= psix_f[j] * hw[j];
        }
        const Vec lv = L * x;
        Vec out(2 * n);
        const Eigen::ArrayXd rhs_tau = -psi.psi_t.array() * (tbar_x + tx).array();
        const Eigen::ArrayXd rhs_u = spectral::derivative(remainder.coarse(flux), period).array() +
                                     remainder.coarse(src).array() -
                                     psi.psi_t.array() * (ubar_x + ux).array();
        out.head(n) = ((lv.head(n).array() + rhs_tau) / denom).matrix() - lv.head(n);
        out.tail(n) = ((lv.tail(n).array() + rhs_u) / denom).matrix() - lv.tail(n);
        return out;
    };

    ModulatedRun run;
    run.trace.k = opts.sobolev_k;
    run.epsilon = mod.epsilon > 0.0 ? mod.epsilon : 1e-2 * sobolev_norm({bg.tau_bar, bg.u_bar}, period, 1);
    Vec x = stack(V0);
    const double guard = opts.overflow_factor * std::max(x.norm(), 1.0);

    auto sample = [&](double t, const Vec& state, int s) {
        const FieldPair v = split(state);
        const ModulationInput::Fields psi = mod.fields(t, n, period);
        FieldPair dv = v;
        for (int j = 0; j < opts.energy_derivatives; ++j)
            dv = {spectral::derivative(dv.tau, period), spectral::derivative(dv.u, period)};
        run.trace.times.push_back(t);
        run.trace.E_values.push_back(modulated_energy(dv, psi.psi_x, gauge, bg));
        run.trace.L2_values.push_back(sobolev_norm(v, period, 0));
        run.trace.H1_values.push_back(sobolev_norm(v, period, 1));
        run.trace.Hk_values.push_back(sobolev_norm(v, period, opts.sobolev_k));
        for (int k = 0; k < 3; ++k) {
            run.hs_sq[k].push_back(std::pow(sobolev_norm(v, period, k), 2));
            run.psi_sq[k].push_back(std::pow(sobolev_norm({psi.psi_t, psi.psi_x}, period, k), 2));
        }
        const double small = sobolev_norm({psi.psi_t, psi.psi_x}, period, mod.sobolev_k);
        run.max_smallness = std::max(run.max_smallness, small);
        if (small > run.epsilon) run.hypothesis_violated = true;
        if ((opts.snapshot_every > 0 && s % opts.snapshot_every == 0) || s == 0 || s == steps) {
            run.trajectory.times.push_back(t);
            run.trajectory.states.push_back(v);
        }
    };
    sample(0.0, x, 0);
    for (int s = 1; s <= steps; ++s) {
        x = stepper.step(x, (s - 1) * opts.dt, rhs);
        const double t = s * opts.dt;
        if (!x.allFinite() || x.norm() > guard) throw IntegrationError("modulated evolution blew up", t);
        if (s % std::max(1, opts.sample_every) == 0 || s == steps) sample(t, x, s);
    }
    if (run.trace.size() >= 3) apply_damping_fit(run.trace);
    return run;
}

IntegralBoundFit modulated_bound_fit(const ModulatedRun& run, int s) {
    if (s < 0 || s > 2) throw DomainError("modulated_bound_fit supports s = 0, 1, 2");
    std::vector<double> forcing(run.hs_sq[0].size());
    for (std::size_t i = 0; i < forcing.size(); ++i) forcing[i] = run.hs_sq[0][i] + run.psi_sq[s][i];
    return fit_integral_bound(run.trace.times, run.hs_sq[s], run.hs_sq[s].front(), forcing);
}

}  // namespace rollwave
