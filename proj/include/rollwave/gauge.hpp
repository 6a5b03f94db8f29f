#pragma once

#include <optional>

#include "rollwave/linear_operator.hpp"
#include "rollwave/profile.hpp"

namespace rollwave {

// Weight w on the u_x^2 term of the time-domain energy:
// Unit gives phi2 u_x^2, Cubic gives phi2 tau_bar^3 u_x^2.
enum class EnergyWeight { Unit, Cubic };

std::string to_string(EnergyWeight w);
EnergyWeight energy_weight_from_string(const std::string& name);

// Gauge weights for E(U) = int 1/2 phi1 tau_x^2 + 1/2 phi2 w u_x^2 + phi3 tau u_x.
// phi3 = (phi1 - alpha w phi2) / b removes the tau_x u_xx cross term, and phi1
// solves (c/2) phi1' + (alpha/b - r) phi1 = 0 with r the reference rate
// (<alpha/b> on a period, the interpolant I on the line). Then the tau_x^2
// dissipation coefficient is r phi1 - (alpha^2 w / b) phi2.
struct GaugeTriple {
    Vec phi1;
    Vec phi1_x;
    double phi2 = 0.0;
    Vec phi3;
    Vec coercivity_coeff;
    double coercivity_min = 0.0;
    double phi1_min = 0.0;
    double phi1_max = 0.0;
    EnergyWeight weight = EnergyWeight::Cubic;
    Vec weight_values;
    Vec reference_rate;
    double mean_rate = 0.0;
    double periodicity_gap = 0.0;
    bool phi2_auto = false;
};

struct GaugeOptions {
    std::optional<double> phi2;  // empty selects the automatic sweep
    EnergyWeight weight = EnergyWeight::Cubic;
    int sweep_levels = 40;
};

GaugeTriple build_gauge(const WaveProfile& profile, const GaugeOptions& opts = {});
GaugeTriple build_gauge(const LinearCoefficients& lc, const GaugeOptions& opts = {});

// Shared completion step: fills phi3, phi2 (sweep or fixed) and the coercivity data
// given phi1 and its derivative.
GaugeTriple complete_gauge(const LinearCoefficients& lc, const Vec& phi1, const Vec& phi1_x,
                           const Vec& reference_rate, const GaugeOptions& opts);

double energy(const FieldPair& U, const GaugeTriple& gauge, const LinearCoefficients& lc);
double energy(const FieldPair& U, const GaugeTriple& gauge, const WaveProfile& profile);

struct BlochEnergy {
    double value = 0.0;
    double xi = 0.0;       // Floquet exponent actually used
    bool shifted = false;  // true when the input was folded into the Brillouin zone
};

// E_xi(U) = int 1/2 phi1 |(d+i xi) tau|^2 + 1/2 phi2 w |(d+i xi) u|^2 + Re(phi3 tau conj((d+i xi) u)).
BlochEnergy bloch_energy(const ComplexPair& U, double xi, const GaugeTriple& gauge, double period);

struct DissipationCoefficients {
    Vec coef_tau_x2;  // (c/2) phi1_x + alpha phi3
    Vec coef_uxx2;    // phi2 w b
    Vec coef_cross;   // phi1 - alpha w phi2 - b phi3
};

// Periodic version: phi1_x is recomputed spectrally from phi1.
DissipationCoefficients dissipation_coefficients(const GaugeTriple& gauge, const LinearCoefficients& lc);
DissipationCoefficients dissipation_coefficients(const GaugeTriple& gauge, const LinearCoefficients& lc,
                                                 const Vec& phi1_x);

// E(U) + M ||U||^2 >= c0 (||tau_x||^2 + ||u_x||^2). M and c0_analytic come from
// Young's inequality; c0_numeric is the smallest generalized Rayleigh quotient
// over Fourier modes |m| <= modes.
struct EquivalenceConstants {
    double M = 0.0;
    double c0_analytic = 0.0;
    double c0_numeric = 0.0;
    double upper = 0.0;  // E(U) <= upper (||tau_x||^2 + ||u_x||^2 + ||U||^2)
};

EquivalenceConstants energy_equivalence(const GaugeTriple& gauge, const LinearCoefficients& lc,
                                        int modes = 24);

struct CompensatorResult {
    Eigen::Matrix2d A0 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
    double min_eig = 0.0;
    bool feasible = false;
};

// Smallest eigenvalue of the symmetric part of A0 B + K A for SPD A0 and
// K = k [[0, 1], [-1, 0]], normalized by ||A0||_F + |k|.
double compensator_objective(const Eigen::Matrix2d& A0, double k, const Eigen::Matrix2d& A,
                             const Eigen::Matrix2d& B);

CompensatorResult kawashima_compensator(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B);

// Frozen-coefficient matrices of U_t + A U_x = (B U_x)_x at grid point j:
// A = [[-c, -1], [-alpha, -c]], B = diag(0, b).
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> frozen_symbol(const LinearCoefficients& lc, int j);

}  // namespace rollwave
