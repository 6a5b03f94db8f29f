#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rollwave/error.hpp"
#include "rollwave/model.hpp"

namespace rollwave {

// Which of (c, q) is the Newton unknown. The other one is held at its
// value in ModelParams.
enum class ProfileMode { FixedDischarge, FixedSpeed };

std::string to_string(ProfileMode mode);

// Periodic traveling wave on N uniform points of [0, period). The wave
// speed and the discharge q = u + c tau live in params.speed / params.discharge.
struct WaveProfile {
    ModelParams params;
    double period = 0.0;
    Vec tau_bar;
    Vec u_bar;
    double residual_norm = 0.0;
    ProfileMode mode = ProfileMode::FixedDischarge;
    int newton_iterations = 0;

    int size() const { return static_cast<int>(tau_bar.size()); }
    double speed() const { return params.speed; }
    double discharge() const { return params.discharge; }
    Vec grid() const;
    double amplitude() const { return 0.5 * (tau_bar.maxCoeff() - tau_bar.minCoeff()); }
    Vec tau_x() const;
    Vec u_x() const;
};

// Profile equation reduced with u = q - c tau:
//   c (g(tau) tau')' + c^2 tau' + f'(tau) tau' - h(tau, q - c tau) = 0,
// which for St. Venant reads nu c (tau^-2 tau')' = 1 - tau (q - c tau)^2 - c^2 tau' + F^-2 tau^-3 tau'.
struct ReducedProfileOde {
    ModelParams params;

    Vec velocity(const Vec& tau) const;
    Vec residual(const Vec& tau, double period) const;
    // Both equations of the steady co-moving system evaluated directly on (tau, u).
    FieldPair full_residual(const Vec& tau, const Vec& u, double period) const;
};

ReducedProfileOde reduce_profile_ode(const ModelParams& params);

struct NewtonOptions {
    double tolerance = 1e-10;
    int max_iterations = 60;
    int max_backtracks = 40;
    double positivity_floor = 1e-6;
    bool phase_condition = true;
    ProfileMode mode = ProfileMode::FixedDischarge;
};

class ProfileNoConvergence : public NumericalError {
public:
    ProfileNoConvergence(const std::string& m, WaveProfile last)
        : NumericalError(m, "no_convergence"), last_iterate(std::move(last)) {}
    WaveProfile last_iterate;
};

class PositivityViolation : public NumericalError {
public:
    explicit PositivityViolation(const std::string& m) : NumericalError(m, "positivity") {}
};

// Newton collocation solve. params carries the initial c and q; the guess
// supplies tau (resampled when its size differs from n).
WaveProfile solve_profile(const ModelParams& params, double period, const Vec& tau_guess,
                          const NewtonOptions& opts = {});
WaveProfile solve_profile(const WaveProfile& guess, const NewtonOptions& opts = {});

// Small-amplitude wave near the Hopf point of the equilibrium (1, 1):
// c = 1/F, q = 1 + 1/F, critical wavenumber sqrt((F - 2)/nu). The period is
// an unknown fixed by mean(tau cos(2 pi x / period)) = amplitude / 2.
WaveProfile seed_small_amplitude(const ModelParams& params, double amplitude, int n,
                                 const NewtonOptions& opts = {});

struct SeedOptions {
    double initial_amplitude = 0.01;
    double amplitude_step = 0.001;
    double max_amplitude = 1.0;
    NewtonOptions newton;
};

// Follows the small-amplitude family in amplitude until its period passes
// the requested one, then fixes the period and solves for c.
WaveProfile seed_roll_wave(const ModelParams& params, double period, int n,
                           const SeedOptions& opts = {});

enum class ContinuationParameter { Froude, Period };

struct StepControl {
    double initial_step = 0.01;
    double min_step = 1e-5;
    double max_step = 0.1;
    double growth = 1.5;
    double max_change = 0.5;         // sup-norm bound between consecutive profiles
    double min_amplitude_ratio = 0.5;  // rejects collapse onto the constant branch
    NewtonOptions newton;
};

struct StepDiagnostic {
    double parameter = 0.0;
    double step = 0.0;
    int newton_iterations = 0;
    bool accepted = false;
    std::string note;
};

struct ContinuationRun {
    ContinuationParameter parameter = ContinuationParameter::Froude;
    std::vector<double> path;
    std::vector<WaveProfile> profiles;
    std::vector<StepDiagnostic> diagnostics;
    bool failed = false;
    std::string failure_reason;
};

ContinuationRun continue_in_parameter(const WaveProfile& start, double target,
                                      const StepControl& control = {},
                                      ContinuationParameter which = ContinuationParameter::Froude);

// <f(tau_bar) u_bar_x> over one period.
double check_mean_identity(const WaveProfile& profile, const std::function<double(double)>& f);

// Spectral resampling followed by a Newton polish at the new size.
WaveProfile refine_profile(const WaveProfile& profile, int n, const NewtonOptions& opts = {});

}  // namespace rollwave
