#include "rollwave/conditions.hpp"

#include <cmath>

#include "rollwave/linear_operator.hpp"

namespace rollwave {

Vec alpha_profile(const WaveProfile& profile) { return linearize(profile).alpha; }

SlopeReport slope_report(const WaveProfile& profile) {
    const LinearCoefficients lc = linearize(profile);
    SlopeReport rep;
    rep.alpha = lc.alpha;
    const Vec margin = lc.alpha.cwiseProduct(profile.tau_bar.array().cube().matrix());
    Eigen::Index worst = 0;
    rep.pointwise_margin = margin.minCoeff(&worst);
    rep.worst_x = profile.period * static_cast<double>(worst) / profile.size();
    rep.pointwise_holds = rep.pointwise_margin > 0.0;
    rep.averaged_value = lc.rate().mean();
    rep.averaged_holds = rep.averaged_value > 0.0;
    return rep;
}

WeightedMean weighted_mean_identity(const WaveProfile& profile, const std::function<double(double)>& g) {
    const Vec alpha = alpha_profile(profile);
    WeightedMean out;
    const int n = profile.size();
    for (int j = 0; j < n; ++j) {
        const double t = profile.tau_bar[j];
        const double w = g(t);
        if (!(w > 0.0) || !std::isfinite(w))
            throw DomainError("weighted_mean_identity: g must be positive on the profile range");
        out.lhs += w * alpha[j];
        out.rhs += w * (-profile.params.flux_slope(t));
    }
    out.lhs /= n;
    out.rhs /= n;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace rollwave
