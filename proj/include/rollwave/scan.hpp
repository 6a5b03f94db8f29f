#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rollwave/bloch.hpp"
#include "rollwave/conditions.hpp"
#include "rollwave/profile.hpp"

namespace rollwave {

struct ScanConfig {
    std::vector<double> froude;  // visited in increasing order along one branch per period
    std::vector<double> periods;
    double nu = 0.1;
    int n = 128;
    // branches are seeded here, near onset, and continued to the first requested F
    double seed_froude = 2.05;
    bool stability = true;
    int stability_modes = 96;
    int stability_xi_points = 64;
    bool fit_eta = true;
    double eta_T = 10.0;
    double eta_dt = 0.01;
    unsigned seed = 1;
    int jobs = 1;
    StepControl control;
};

struct ScanRow {
    double froude = 0.0;
    double period = 0.0;
    double discharge = 0.0;
    double speed = 0.0;
    double pointwise_margin = 0.0;
    bool pointwise_holds = false;
    double averaged_value = 0.0;
    bool averaged_holds = false;
    std::optional<bool> d1, d2, d3, h;
    double max_real_part = 0.0;
    double coercivity_min = 0.0;
    double eta = 0.0;
    int violations = 0;
    std::string status = "ok";
};

struct BranchSummary {
    double period = 0.0;
    std::optional<double> froude_star;  // interpolated sign change of pointwise_margin
    bool averaged_positive = true;
    int rows = 0;
    int failures = 0;
};

struct ScanResult {
    std::vector<ScanRow> rows;  // ordered by (period, froude)
    std::vector<BranchSummary> branches;
    std::vector<WaveProfile> profiles;  // parallel to rows; empty entries for failed cells
};

ScanResult run_scan(const ScanConfig& config);

std::string scan_csv(const ScanResult& result);

}  // namespace rollwave
