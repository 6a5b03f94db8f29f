#pragma once

#include "rollwave/evolution.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/linear_operator.hpp"

namespace rollwave {

// Viscous shock of the isentropic gas system in the co-moving frame, on the
// truncated line [-L, L] with an odd number of uniformly spaced nodes.
struct ShockProfile {
    ModelParams params;
    Vec x;
    Vec tau_bar;
    Vec u_bar;
    Vec tau_x;  // from the profile ODE, not differenced
    Vec u_x;
    double speed = 0.0;
    double tau_minus = 0.0;
    double tau_plus = 0.0;
    double u_minus = 0.0;
    double q = 0.0;               // c^2 tau + p(tau) at either endstate
    double decay_rate = 0.0;      // fitted on the tails, slower side
    double decay_rate_minus = 0.0;
    double decay_rate_plus = 0.0;
    double linear_rate_minus = 0.0;  // endstate linearization of the profile ODE
    double linear_rate_plus = 0.0;
    double half_width = 0.0;
    double rh_residual = 0.0;
    double endstate_gap = 0.0;    // max |tau_bar(+-L) - tau_+-|
    bool unit_viscosity_form = false;

    int size() const { return static_cast<int>(x.size()); }
    double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
};

struct ShockOptions {
    double half_width = 0.0;  // 0 selects 20 / (slower endstate rate)
    int n = 801;              // odd
    double u_minus = 0.0;
    int substeps = 16;
    double endstate_tolerance = 1e-6;  // relative to |tau_+ - tau_-|
    // Integrate the profile ODE with nu replaced by 1, as it is sometimes written.
    bool unit_viscosity_form = false;
};

class NoProfileError : public NumericalError {
public:
    explicit NoProfileError(const std::string& m) : NumericalError(m, "no_profile") {}
};

// c^2 = -(p(tau_+) - p(tau_-)) / (tau_+ - tau_-), sign(c) = sign(tau_+ - tau_-).
double shock_speed(const ModelParams& params, double tau_minus, double tau_plus);

// tau |c^2 + p'(tau)| / (nu |c|) at an endstate.
double endstate_rate(const ModelParams& params, double speed, double tau, bool unit_viscosity_form = false);

double default_half_width(const ModelParams& params, double tau_minus, double tau_plus);

// Solves tau' = -(tau / (nu c)) (c^2 tau + p(tau) - q) from tau(0) = (tau_- + tau_+)/2
// in both directions, u_bar = u_- - c (tau_bar - tau_-).
ShockProfile solve_shock_profile(const ModelParams& params, double tau_minus, double tau_plus,
                                 const ShockOptions& opts = {});

// alpha = -p'(tau_bar) + g'(tau_bar) u_bar_x with g = nu / tau.
Vec shock_alpha(const ShockProfile& profile);

// Linear coefficients on the line grid (period holds 2L for bookkeeping only).
LinearCoefficients shock_linearization(const ShockProfile& profile);

struct ShockInterpolant {
    Vec values;             // I(x)
    Vec rate;               // alpha / b along the profile
    double w_minus = 0.0;   // limits of alpha / b
    double w_plus = 0.0;
    double width = 0.0;     // l in I = w_- + (w_+ - w_-)(1 + tanh(x / l)) / 2
    double fitted_decay = 0.0;  // decay of rate - I, slower tail
    double sup_difference = 0.0;
};

// theta <= 0 uses the profile decay rate as the target.
ShockInterpolant build_interpolant(const ShockProfile& profile, double theta = 0.0);

struct ShockGaugeOptions {
    GaugeOptions gauge{std::nullopt, EnergyWeight::Unit, 40};
    // phi1' = -C (rate - I) phi1 instead of phi1' = -(2/c)(rate - I) phi1.
    bool large_constant = false;
    double large_constant_C = 10.0;
};

struct ShockGauge {
    GaugeTriple triple;
    double exponent_sup = 0.0;  // sup |int_0^x (rate - I)|
};

ShockGauge build_shock_gauge(const ShockProfile& profile, const ShockInterpolant& interp,
                             const ShockGaugeOptions& opts = {});

// Fourth-order finite difference first derivative on a uniform grid, one-sided at the ends.
Eigen::MatrixXd fd_derivative_matrix(int n, double h);
Vec fd_derivative(const Vec& f, double h);
// int_0^x f on a uniform grid centered at x = 0 (odd n), trapezoid with end corrections.
Vec cumulative_integral(const Vec& f, double h);

// Steady residual of the full second-order gas system at the profile, differenced.
FieldPair shock_steady_residual(const ShockProfile& profile);

struct ShockEvolveOptions : EvolveOptions {
    double boundary_fraction = 0.05;
    double boundary_tolerance = 1e-4;  // max |U| in the boundary layers relative to max |U(0)|
};

struct ShockRun {
    EnergyTrace trace;
    Trajectory trajectory;
    double boundary_ratio = 0.0;
};

class TruncationError : public NumericalError {
public:
    explicit TruncationError(const std::string& m) : NumericalError(m, "truncation") {}
};

double line_energy(const FieldPair& U, const GaugeTriple& gauge, double h);
double line_norm(const FieldPair& U, double h, int k);

// Linearized gas system about the shock with homogeneous Dirichlet data at x = +-L.
ShockRun evolve_shock_linear(const ShockProfile& profile, const GaugeTriple& gauge, const FieldPair& U0,
                             const ShockEvolveOptions& opts = {});

}  // namespace rollwave
