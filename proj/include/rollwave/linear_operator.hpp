#pragma once

#include "rollwave/model.hpp"
#include "rollwave/profile.hpp"

namespace rollwave {

// Coefficients of the linearization about a periodic profile,
//   L(tau, u) = (c tau_x + u_x,  c u_x + (alpha tau)_x + (b u_x)_x + m21 tau + m22 u),
// with alpha = -f'(tau_bar) + g'(tau_bar) u_bar_x, b = g(tau_bar),
// m21 = h_tau(tau_bar, u_bar), m22 = h_u(tau_bar, u_bar).
struct LinearCoefficients {
    ModelParams params;
    double speed = 0.0;
    double period = 0.0;
    Vec tau_bar;
    Vec u_bar;
    Vec alpha;
    Vec viscosity;
    Vec m21;
    Vec m22;

    int size() const { return static_cast<int>(alpha.size()); }
    // alpha / b; its mean is the averaged slope quantity <alpha tau_bar^2>/nu.
    Vec rate() const { return alpha.cwiseQuotient(viscosity); }
};

LinearCoefficients linearize(const WaveProfile& profile);

// Constant state (tau0, u0) on a periodic grid of n points.
LinearCoefficients linearize_constant(const ModelParams& params, double period, int n, State s);

// Pseudospectral application of L.
FieldPair apply_linear(const LinearCoefficients& lc, const FieldPair& v);

}  // namespace rollwave
