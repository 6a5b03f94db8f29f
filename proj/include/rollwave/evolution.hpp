#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rollwave/distance.hpp"
#include "rollwave/expression.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/linear_operator.hpp"

namespace rollwave {

// Samples of an evolution run. Norms are of the perturbation; E is the gauge energy.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> E_values;
    std::vector<double> L2_values;
    std::vector<double> H1_values;
    std::vector<double> Hk_values;
    int k = 2;
    double fitted_eta = 0.0;
    double fitted_C = 0.0;
    int violation_count = 0;

    std::size_t size() const { return times.size(); }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<FieldPair> states;
};

struct EvolveOptions {
    double T = 10.0;
    double dt = 0.01;
    int sample_every = 1;
    int snapshot_every = 0;  // 0 keeps only the first and last states
    int sobolev_k = 2;
    double overflow_factor = 1e8;
};

// sqrt(sum_{j<=k} ||d^j tau||^2 + ||d^j u||^2) on a periodic grid.
double sobolev_norm(const FieldPair& v, double period, int k);

// Sum of random Fourier modes 1..max_mode with coefficients decaying like 1/m^2,
// scaled so that max |tau|, |u| equals amplitude. Deterministic in seed.
FieldPair random_smooth_perturbation(int n, double period, int max_mode, double amplitude, unsigned seed);

// U minus its spectral projection onto the eigenvalues of L in |lambda| < radius
// (the translation mode and its Jordan partner on one period), computed by a
// trapezoid contour integral of the resolvent.
FieldPair remove_neutral_modes(const LinearCoefficients& lc, const FieldPair& U, double radius = 1e-3,
                               int contour_points = 32);

// Physical-space matrix of L on the 2N collocation unknowns (tau, u).
Eigen::MatrixXd linear_matrix(const LinearCoefficients& lc);

// Two-stage, second-order IMEX Runge-Kutta (Ascher-Ruuth-Spiteri (2,2,2)).
// The implicit part is a fixed linear matrix, factored once.
class ImexStepper {
public:
    using Explicit = std::function<Vec(const Vec&, double)>;

    ImexStepper(Eigen::MatrixXd implicit_matrix, double dt);
    Vec step(const Vec& x, double t, const Explicit& explicit_part) const;
    double dt() const { return dt_; }

private:
    Eigen::MatrixXd A_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double dt_;
    double gamma_;
    double delta_;
};

struct LinearRun {
    EnergyTrace trace;
    Trajectory trajectory;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& m, double t) : NumericalError(m, "integration"), time(t) {}
    double time;
};

LinearRun evolve_linear(const LinearCoefficients& lc, const GaugeTriple& gauge, const FieldPair& U0,
                        const EvolveOptions& opts = {});

struct DampingFitOptions {
    int grid_points = 1000;
    double eta_max = 0.0;  // 0 picks max(1, 1.25 * largest observed decay rate)
};

struct DampingFit {
    double eta = 0.0;
    double C = 0.0;
    int violation_count = 0;
    double tightness = 0.0;
};

// Over a grid of eta, C(eta) is the least constant with E' + eta E <= C ||U||_L2^2
// at all interior samples (centered differences). The reported eta minimizes
// the mean relative gap between the integrated Gronwall bound and E, ties
// going to the larger eta.
DampingFit damping_fit(const EnergyTrace& trace, const DampingFitOptions& opts = {});
void apply_damping_fit(EnergyTrace& trace, const DampingFitOptions& opts = {});

struct IntegralBoundFit {
    double theta = 0.0;
    double C = 0.0;
    double max_gap = 0.0;    // max over samples of lhs - C rhs (<= 0 when satisfied)
    double min_slack = 0.0;  // min over samples of (C rhs - lhs) / (C rhs)
    int violation_count = 0;
};

// lhs(t) <= C (e^{-theta t} initial + int_0^t e^{-theta (t-s)} forcing(s) ds) over a grid of
// theta in (0, theta_max], C(theta) the least feasible constant. The reported theta minimizes
// the mean relative gap, ties going to the larger theta.
IntegralBoundFit fit_integral_bound(const std::vector<double>& times, const std::vector<double>& lhs,
                                    double initial, const std::vector<double>& forcing,
                                    int grid_points = 1000, double theta_max = 0.0);

// ||U(t)||_H1 <= C e^{-theta t} ||U(0)||_H1 + C int_0^t e^{-theta(t-s)} ||U(s)||_L2 ds.
IntegralBoundFit lemma_sample_check(const EnergyTrace& trace);

class BreakdownError : public NumericalError {
public:
    BreakdownError(const std::string& m, double t) : NumericalError(m, "breakdown"), time(t) {}
    double time;
};

struct NonlinearOptions : EvolveOptions {
    bool dealias = true;
    int delta_every = 0;  // 0 disables distance estimates
    DistanceOptions delta;
};

struct NonlinearRun {
    std::vector<double> times;
    std::vector<double> L2_values;  // ||U(t) - U_bar||
    std::vector<double> H1_values;
    Trajectory trajectory;  // full fields
    std::vector<double> delta_times;
    std::vector<double> delta_values;
};

// Co-moving nonlinear system about a background state (profile or constant).
NonlinearRun evolve_nonlinear(const LinearCoefficients& background, const FieldPair& U0_full,
                              const NonlinearOptions& opts = {});

// Right-hand side of the co-moving system, tau_t = c tau_x + u_x,
// u_t = c u_x - f(tau)_x + h + (g(tau) u_x)_x, with optional 3/2-rule dealiasing.
FieldPair comoving_rhs(const ModelParams& params, double period, const FieldPair& W, bool dealias);

// Prescribed phase psi(x, t) for the modulated system.
struct ModulationInput {
    std::function<double(double, double)> psi;
    std::string formula;
    double epsilon = 0.0;  // smallness bound; <= 0 uses 1e-2 ||U_bar||_H1
    int sobolev_k = 2;

    struct Fields {
        Vec psi;
        Vec psi_x;
        Vec psi_t;
    };
    Fields fields(double t, int n, double period) const;
    // ||(psi_t, psi_x)||_{H^k}
    double smallness(double t, int n, double period, int k) const;
};

ModulationInput modulation_from_formula(const std::string& formula,
                                        const std::map<std::string, double>& constants = {},
                                        double epsilon = 0.0, int k = 2);

struct ModulatedOptions : EvolveOptions {
    bool dealias = true;
    int energy_derivatives = 0;  // E_psi applied to d_x^j V
    // Sign of the psi_x/(1-psi_x) viscous group. +1 follows from the change of
    // variables; -1 flips it for comparison runs.
    double viscous_psi_sign = 1.0;
};

struct ModulatedRun {
    EnergyTrace trace;
    Trajectory trajectory;
    std::array<std::vector<double>, 3> hs_sq;   // ||V||^2_{H^s}, s = 0, 1, 2
    std::array<std::vector<double>, 3> psi_sq;  // ||(psi_t, psi_x)||^2_{H^s}
    double epsilon = 0.0;
    double max_smallness = 0.0;
    bool hypothesis_violated = false;
};

class InvalidModulation : public NumericalError {
public:
    explicit InvalidModulation(const std::string& m) : NumericalError(m, "invalid_modulation") {}
};

ModulatedRun evolve_modulated(const LinearCoefficients& background, const GaugeTriple& gauge,
                              const FieldPair& V0, const ModulationInput& psi,
                              const ModulatedOptions& opts = {});

// Damping inequality in integrated form for index s:
// ||V||^2_{H^s} <= C e^{-theta t}||V0||^2_{H^s} + C int e^{-theta(t-s)} (||V||^2_L2 + ||(psi_t,psi_x)||^2_{H^s}).
IntegralBoundFit modulated_bound_fit(const ModulatedRun& run, int s);

// Modified energy int (1 - psi_x)(1/2 phi1 tau_x^2 + 1/2 phi2 w u_x^2 + phi3 tau u_x).
double modulated_energy(const FieldPair& V, const Vec& psi_x, const GaugeTriple& gauge,
                        const LinearCoefficients& lc);

}  // namespace rollwave
