#pragma once

#include <vector>

#include "rollwave/linear_operator.hpp"

namespace rollwave {

// Fourier-Galerkin matrix of L_xi = e^{-i xi x} L e^{i xi x} on modes -M..M.
// Unknowns are ordered (tau_{-M..M}, u_{-M..M}).
struct BlochOperator {
    double xi = 0.0;
    int modes = 0;
    double period = 0.0;
    Eigen::MatrixXcd matrix;

    int dim() const { return 2 * modes + 1; }
};

// tail_threshold bounds the coefficient content beyond mode M, relative to the
// largest coefficient, for alpha and b.
BlochOperator assemble_bloch(const LinearCoefficients& lc, double xi, int modes,
                             double tail_threshold = 1e-4);

struct Spectrum {
    double xi = 0.0;
    std::vector<cplx> values;
    std::vector<double> residuals;  // ||(L - lambda) v|| / ||v||, empty if not computed
};

Spectrum spectrum(const BlochOperator& op, bool with_residuals = true);

// Coefficient vectors of the translation mode (tau_bar_x, u_bar_x) in the Galerkin basis.
CVec translation_mode(const LinearCoefficients& lc, int modes);

struct ClassifyOptions {
    int xi_points = 64;        // uniform points on [0, pi/period]
    int refine_levels = 3;     // geometric refinement toward xi = 0
    int modes = 64;
    double tail_threshold = 1e-4;
    double zero_radius = 1e-3;
    int contour_points = 32;
    double rank_tolerance = 1e-6;
    double d1_tolerance = 1e-9;  // added to each eigenvalue's own error estimate
    double slope_tolerance = 1e-6;
    int jobs = 1;
    bool keep_spectra = true;
};

struct StabilityReport {
    bool d1 = false;
    bool d2 = false;
    bool d3 = false;
    bool h = false;
    double theta = 0.0;          // min of theta_fit and theta_global
    double theta_fit = 0.0;      // least-squares Re lambda = -d xi^2 on the two critical curves
    double theta_global = 0.0;   // min over sampled xi != 0 of -max Re / xi^2
    double max_real_part = 0.0;  // over xi != 0 and the nonzero part at xi = 0
    int zero_multiplicity = 0;
    int zero_count = 0;          // eigenvalues inside the contour
    std::array<double, 2> critical_slopes{0.0, 0.0};
    std::array<double, 2> curvature{0.0, 0.0};
    bool tracking_ambiguous = false;
    bool contour_warning = false;
    int unresolved_xi = 0;       // xi samples skipped in theta_global: max Re below its error estimate
    int unresolved_curves = 0;   // critical curves whose real part never exceeds its error estimate
    int modes = 0;
    std::vector<double> xi_grid;
    std::vector<Spectrum> spectra;
};

StabilityReport classify_stability(const LinearCoefficients& lc, const ClassifyOptions& opts = {});

// Rank of the spectral projector for the eigenvalues inside |lambda| < radius.
int projector_rank(const BlochOperator& op, double radius, int contour_points, double rank_tolerance,
                   unsigned seed = 7);

struct HfOptions {
    double xi = 0.0;
    double window_lo = 0.5;  // fractions of |c| kappa M
    double window_hi = 0.8;
    double tail_threshold = 1e-4;
};

struct HfEstimate {
    double estimate = 0.0;
    double target = 0.0;  // -<alpha/b>
    double relative_error = 0.0;
    int count = 0;
};

// Mean real part of the transport-family eigenvalues whose |Im lambda| lies in
// the window, weighted by a smooth bump so the estimate varies smoothly in xi.
HfEstimate hf_asymptote(const LinearCoefficients& lc, int modes, const HfOptions& opts = {});
HfEstimate hf_asymptote(const Spectrum& spec, const LinearCoefficients& lc, int modes,
                        const HfOptions& opts = {});

struct ResolventOptions {
    int sobolev_index = 1;
    int modes = 64;
    double margin = 1e-6;  // relative distance to the nearest eigenvalue for skipping
    double tail_threshold = 1e-4;
    int jobs = 1;
};

struct ResolventSample {
    cplx lambda;
    double xi = 0.0;
    double norm = 0.0;
    bool skipped = false;
};

std::vector<ResolventSample> resolvent_norm_scan(const LinearCoefficients& lc,
                                                 const std::vector<cplx>& lambdas,
                                                 const std::vector<double>& xis,
                                                 const ResolventOptions& opts = {});

// Norm of (lambda - L_xi)^{-1} in H^s_xi for one operator.
double resolvent_norm(const BlochOperator& op, cplx lambda, int sobolev_index);

struct RegionOptions {
    double eta = 0.0;     // region is Re lambda >= -eta/2
    double radius = 0.0;  // R; region is R <= |lambda| <= 10 R
    int radial_samples = 6;
    int angular_samples = 12;
    int xi_samples = 16;
};

struct RegionScan {
    double sup = 0.0;
    int evaluated = 0;
    int skipped = 0;
    std::vector<ResolventSample> samples;
};

// Polar samples of {R <= |lambda| <= 10R, Re lambda >= -eta/2} times a xi grid.
std::vector<cplx> region_lambdas(const RegionOptions& region);
std::vector<double> brillouin_samples(double period, int count);
RegionScan resolvent_region_scan(const LinearCoefficients& lc, const RegionOptions& region,
                                 const ResolventOptions& opts = {});

// Smallest R such that every sampled eigenvalue with Re lambda >= -eta lies in |lambda| < R.
double spectral_radius_bound(const LinearCoefficients& lc, double eta, int xi_samples, int modes);

}  // namespace rollwave
