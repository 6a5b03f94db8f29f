#pragma once

#include <functional>

#include "rollwave/profile.hpp"

namespace rollwave {

struct SlopeReport {
    double pointwise_margin = 0.0;  // min over x of tau_bar^3 alpha = F^-2 - 2 nu u_bar_x
    bool pointwise_holds = false;
    double averaged_value = 0.0;    // <alpha tau_bar^2> / nu
    bool averaged_holds = false;
    Vec alpha;
    double worst_x = 0.0;
};

Vec alpha_profile(const WaveProfile& profile);
SlopeReport slope_report(const WaveProfile& profile);

struct WeightedMean {
    double lhs = 0.0;  // <g(tau_bar) alpha>
    double rhs = 0.0;  // <g(tau_bar) (-f'(tau_bar))> = F^-2 <g tau_bar^-3>
    double gap = 0.0;
};

WeightedMean weighted_mean_identity(const WaveProfile& profile, const std::function<double(double)>& g);

}  // namespace rollwave
