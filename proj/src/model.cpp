#include "rollwave/model.hpp"

#include <cmath>
#include <limits>

#include "rollwave/error.hpp"
#include "rollwave/spectral.hpp"

namespace rollwave {

std::string to_string(SystemKind kind) {
    return kind == SystemKind::StVenant ? "StVenant" : "IsentropicGas";
}

SystemKind system_from_string(const std::string& name) {
    if (name == "StVenant" || name == "st_venant" || name == "stvenant") return SystemKind::StVenant;
    if (name == "IsentropicGas" || name == "isentropic_gas" || name == "gas")
        return SystemKind::IsentropicGas;
    throw DomainError("unknown system '" + name + "'");
}

void ModelParams::validate() const {
    if (!(froude > 0.0) || !std::isfinite(froude)) throw DomainError("froude must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("nu must be positive");
    if (!std::isfinite(speed) || !std::isfinite(discharge))
        throw DomainError("speed and discharge must be finite");
    if (system == SystemKind::IsentropicGas) {
        if (!(gas_gamma >= 1.0)) throw DomainError("gas_gamma must be >= 1");
        if (!(gas_amp > 0.0)) throw DomainError("gas_amp must be positive");
    }
}

double ModelParams::flux(double tau) const {
    if (system == SystemKind::StVenant) return 0.5 / (froude * froude * tau * tau);
    return gas_amp * std::pow(tau, -gas_gamma);
}

double ModelParams::flux_slope(double tau) const {
    if (system == SystemKind::StVenant) return -1.0 / (froude * froude * tau * tau * tau);
    return -gas_amp * gas_gamma * std::pow(tau, -gas_gamma - 1.0);
}

double ModelParams::flux_curvature(double tau) const {
    if (system == SystemKind::StVenant) return 3.0 / (froude * froude * std::pow(tau, 4));
    return gas_amp * gas_gamma * (gas_gamma + 1.0) * std::pow(tau, -gas_gamma - 2.0);
}

double ModelParams::viscosity(double tau) const {
    return system == SystemKind::StVenant ? nu / (tau * tau) : nu / tau;
}

double ModelParams::viscosity_slope(double tau) const {
    return system == SystemKind::StVenant ? -2.0 * nu / (tau * tau * tau) : -nu / (tau * tau);
}

double ModelParams::viscosity_curvature(double tau) const {
    return system == SystemKind::StVenant ? 6.0 * nu / std::pow(tau, 4) : 2.0 * nu / (tau * tau * tau);
}

double ModelParams::source(double tau, double u) const {
    return system == SystemKind::StVenant ? 1.0 - tau * u * u : 0.0;
}

double ModelParams::source_tau(double, double u) const {
    return system == SystemKind::StVenant ? -u * u : 0.0;
}

double ModelParams::source_u(double tau, double u) const {
    return system == SystemKind::StVenant ? -2.0 * tau * u : 0.0;
}

double equilibrium_velocity(double tau0) {
    if (!(tau0 > 0.0)) throw DomainError("equilibrium_velocity needs tau0 > 0");
    return 1.0 / std::sqrt(tau0);
}

FieldPair comoving_residual(const ModelParams& params, double period, const FieldPair& fields,
                            const FieldPair& time_derivs) {
    params.validate();
    const Eigen::Index n = fields.tau.size();
    if (fields.u.size() != n || time_derivs.tau.size() != n || time_derivs.u.size() != n)
        throw DomainError("comoving_residual: grid functions have mismatched sizes");
    if (fields.tau.minCoeff() <= 0.0) throw DomainError("comoving_residual: tau must be positive");

    const Vec tau_x = spectral::derivative(fields.tau, period);
    const Vec u_x = spectral::derivative(fields.u, period);
    Vec f(n), gux(n), h(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        f[j] = params.flux(fields.tau[j]);
        gux[j] = params.viscosity(fields.tau[j]) * u_x[j];
        h[j] = params.source(fields.tau[j], fields.u[j]);
    }
    const double c = params.speed;
    FieldPair r;
    r.tau = time_derivs.tau - c * tau_x - u_x;
    r.u = time_derivs.u - c * u_x + spectral::derivative(f, period) - h -
          spectral::derivative(gux, period);
    return r;
}

State reference_state(const ModelParams& params) {
    return params.system == SystemKind::StVenant ? State{1.0, 1.0} : State{1.0, 0.0};
}

std::array<cplx, 2> constant_state_spectrum(const ModelParams& params, double k) {
    params.validate();
    const State s = reference_state(params);
    const cplx i(0.0, 1.0);
    const double c = params.speed;
    // symbol of L(tau,u) = (c tau_x + u_x, c u_x + a tau_x + b u_xx + m21 tau + m22 u)
    const double a = -params.flux_slope(s.tau);
    const double b = params.viscosity(s.tau);
    const double m21 = params.source_tau(s.tau, s.u);
    const double m22 = params.source_u(s.tau, s.u);
    const cplx a11 = i * c * k;
    const cplx a12 = i * k;
    const cplx a21 = i * k * a + m21;
    const cplx a22 = i * c * k - b * k * k + m22;
    const cplx half_trace = 0.5 * (a11 + a22);
    const cplx det = a11 * a22 - a12 * a21;
    const cplx root = std::sqrt(half_trace * half_trace - det);
    cplx l1 = half_trace + root, l2 = half_trace - root;
    if (l2.real() > l1.real()) std::swap(l1, l2);
    return {l1, l2};
}

InstabilityReport is_hydrodynamically_unstable(const ModelParams& params, const WavenumberScan& scan) {
    if (scan.points < 2 || !(scan.k_min > 0.0) || !(scan.k_max > scan.k_min))
        throw DomainError("invalid wavenumber scan");
    InstabilityReport rep;
    rep.max_growth = -std::numeric_limits<double>::infinity();
    const double ratio = std::log(scan.k_max / scan.k_min) / (scan.points - 1);
    for (int j = 0; j < scan.points; ++j) {
        const double k = scan.k_min * std::exp(ratio * j);
        const double g = constant_state_spectrum(params, k)[0].real();
        if (g > rep.max_growth) {
            rep.max_growth = g;
            rep.argmax_wavenumber = k;
        }
    }
    rep.unstable = rep.max_growth > scan.tolerance;
    return rep;
}

double locate_instability_onset(ModelParams params, double f_lo, double f_hi, double tol,
                                const WavenumberScan& scan) {
    params.froude = f_lo;
    const bool lo_state = is_hydrodynamically_unstable(params, scan).unstable;
    params.froude = f_hi;
    const bool hi_state = is_hydrodynamically_unstable(params, scan).unstable;
    if (lo_state == hi_state) throw DomainError("onset bracket does not straddle a verdict change");
    while (f_hi - f_lo > tol) {
        const double mid = 0.5 * (f_lo + f_hi);
        params.froude = mid;
        if (is_hydrodynamically_unstable(params, scan).unstable == lo_state)
            f_lo = mid;
        else
            f_hi = mid;
    }
    return 0.5 * (f_lo + f_hi);
}

}  // namespace rollwave
