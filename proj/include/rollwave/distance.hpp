#pragma once

#include "rollwave/model.hpp"

namespace rollwave {

enum class DistanceNorm { L2, H1 };

struct DistanceOptions {
    DistanceNorm norm = DistanceNorm::L2;
    int knots = 16;           // periodic cubic spline knots for Psi - Id
    int random_starts = 5;
    unsigned seed = 12345;
    int max_iterations = 200;
    double min_slope = 0.1;   // Psi' >= min_slope, enforced as a barrier
};

struct DistanceResult {
    double delta = 0.0;
    double baseline = 0.0;  // objective at Psi = Id
    Vec phase;              // (Psi - Id) on the grid
    Vec knot_values;
    double best_shift = 0.0;
    bool converged = true;
    int starts_used = 0;
};

// Upper bound for inf_Psi ||u o Psi - v||_X + ||d_x (Psi - Id)||_X over
// Psi = Id + periodic spline. Monotone in the sense that the result never
// exceeds the Psi = Id value.
DistanceResult space_modulated_distance(const FieldPair& u, const FieldPair& v, double period,
                                        const DistanceOptions& opts = {});

// Periodic cubic spline evaluation matrices: grid values of s, s', s'' from knot values.
struct PeriodicSpline {
    Eigen::MatrixXd value;
    Eigen::MatrixXd slope;
    Eigen::MatrixXd curvature;
};

PeriodicSpline periodic_spline(int knots, int n, double period);

}  // namespace rollwave
