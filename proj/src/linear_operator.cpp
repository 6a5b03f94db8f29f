#include "rollwave/linear_operator.hpp"

#include "rollwave/error.hpp"
#include "rollwave/spectral.hpp"

namespace rollwave {

namespace {

LinearCoefficients build(const ModelParams& params, double period, const Vec& tau, const Vec& u) {
    const Eigen::Index n = tau.size();
    LinearCoefficients lc;
    lc.params = params;
    lc.speed = params.speed;
    lc.period = period;
    lc.tau_bar = tau;
    lc.u_bar = u;
    lc.alpha.resize(n);
    lc.viscosity.resize(n);
    lc.m21.resize(n);
    lc.m22.resize(n);
    const Vec ux = spectral::derivative(u, period);
    for (Eigen::Index j = 0; j < n; ++j) {
        lc.alpha[j] = -params.flux_slope(tau[j]) + params.viscosity_slope(tau[j]) * ux[j];
        lc.viscosity[j] = params.viscosity(tau[j]);
        lc.m21[j] = params.source_tau(tau[j], u[j]);
        lc.m22[j] = params.source_u(tau[j], u[j]);
    }
    return lc;
}

}  // namespace

LinearCoefficients linearize(const WaveProfile& profile) {
    if (profile.size() < 8) throw DomainError("linearize: profile too coarse");
    return build(profile.params, profile.period, profile.tau_bar, profile.u_bar);
}

LinearCoefficients linearize_constant(const ModelParams& params, double period, int n, State s) {
    if (!(s.tau > 0.0)) throw DomainError("constant state needs tau > 0");
    return build(params, period, Vec::Constant(n, s.tau), Vec::Constant(n, s.u));
}

FieldPair apply_linear(const LinearCoefficients& lc, const FieldPair& v) {
    const double p = lc.period;
    const Vec tx = spectral::derivative(v.tau, p);
    const Vec ux = spectral::derivative(v.u, p);
    FieldPair out;
    out.tau = lc.speed * tx + ux;
    const Vec flux = lc.alpha.cwiseProduct(v.tau) + lc.viscosity.cwiseProduct(ux);
    out.u = lc.speed * ux + spectral::derivative(flux, p) + lc.m21.cwiseProduct(v.tau) +
            lc.m22.cwiseProduct(v.u);
    return out;
}

}  // namespace rollwave
