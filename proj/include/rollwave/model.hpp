#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>

namespace rollwave {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

enum class SystemKind { StVenant, IsentropicGas };

std::string to_string(SystemKind kind);
SystemKind system_from_string(const std::string& name);

// Both systems share the co-moving form
//   tau_t - c tau_x - u_x = 0
//   u_t - c u_x + f(tau)_x = h(tau, u) + (g(tau) u_x)_x
// St. Venant:  f = tau^-2 / (2F^2), g = nu tau^-2, h = 1 - tau u^2.
// Gas:         f = a tau^-gamma,    g = nu / tau,  h = 0.
struct ModelParams {
    double froude = 2.0;
    double nu = 0.1;
    double speed = 0.0;
    double discharge = 0.0;
    SystemKind system = SystemKind::StVenant;
    double gas_gamma = 1.4;
    double gas_amp = 1.0;

    void validate() const;

    double flux(double tau) const;
    double flux_slope(double tau) const;
    double flux_curvature(double tau) const;
    double viscosity(double tau) const;
    double viscosity_slope(double tau) const;
    double viscosity_curvature(double tau) const;
    double source(double tau, double u) const;
    double source_tau(double tau, double u) const;
    double source_u(double tau, double u) const;
};

struct State {
    double tau = 1.0;
    double u = 1.0;
};

// Pair of grid functions on one periodic grid.
struct FieldPair {
    Vec tau;
    Vec u;

    Eigen::Index size() const { return tau.size(); }
    static FieldPair zeros(Eigen::Index n) { return {Vec::Zero(n), Vec::Zero(n)}; }
};

struct ComplexPair {
    CVec tau;
    CVec u;
};

// u0 = tau0^(-1/2), the positive root of 1 - tau u^2 = 0.
double equilibrium_velocity(double tau0);

// Pointwise residual of the co-moving system; derivatives are spectral on [0, period).
FieldPair comoving_residual(const ModelParams& params, double period, const FieldPair& fields,
                            const FieldPair& time_derivs);

// Reference constant state of the linearization used by the symbol:
// (1, 1) for St. Venant, (1, 0) for the gas system.
State reference_state(const ModelParams& params);

// Eigenvalues of the 2x2 Fourier symbol about the reference state, ordered by
// decreasing real part.
std::array<cplx, 2> constant_state_spectrum(const ModelParams& params, double wavenumber);

struct InstabilityReport {
    bool unstable = false;
    double max_growth = 0.0;
    double argmax_wavenumber = 0.0;
};

struct WavenumberScan {
    double k_min = 1e-4;
    double k_max = 1e3;
    int points = 4000;
    double tolerance = 1e-10;
};

InstabilityReport is_hydrodynamically_unstable(const ModelParams& params,
                                               const WavenumberScan& scan = {});

// Bisection in F for the first unstable Froude number; the bracket must
// straddle the verdict change.
double locate_instability_onset(ModelParams params, double f_lo, double f_hi, double tol = 1e-6,
                                const WavenumberScan& scan = {});

}  // namespace rollwave
