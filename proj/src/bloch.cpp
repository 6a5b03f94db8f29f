#include "rollwave/bloch.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rollwave/dense_eigen.hpp"
#include "rollwave/error.hpp"
#include "rollwave/parallel.hpp"
#include "rollwave/spectral.hpp"

namespace rollwave {

namespace {

constexpr double pi = std::numbers::pi;

// Toeplitz coefficient a_d of grid data with FFT coefficients c.
cplx toeplitz_coeff(const CVec& c, int d) {
    const int n = static_cast<int>(c.size());
    const int ad = std::abs(d);
    if (2 * ad > n) return 0.0;
    if (2 * ad == n) return 0.5 * c[n / 2];
    return c[d >= 0 ? d : n + d];
}

Eigen::MatrixXcd toeplitz(const Vec& f, int modes) {
    const CVec c = spectral::forward(f);
    const int dim = 2 * modes + 1;
    Eigen::MatrixXcd t(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) t(j, k) = toeplitz_coeff(c, j - k);
    return t;
}

void check_resolution(const LinearCoefficients& lc, int modes, double threshold) {
    const double ta = spectral::tail_ratio(lc.alpha, modes);
    const double tb = spectral::tail_ratio(lc.viscosity, modes);
    if (std::max(ta, tb) > threshold)
        throw ResolutionError("Bloch truncation M = " + std::to_string(modes) +
                              " does not resolve the coefficients (tail " +
                              std::to_string(std::max(ta, tb)) + ")");
}

}  // namespace

BlochOperator assemble_bloch(const LinearCoefficients& lc, double xi, int modes, double tail_threshold) {
    if (modes < 8) throw DomainError("assemble_bloch needs M >= 8");
    const double zone = pi / lc.period;
    if (xi < -zone * (1.0 + 1e-12) || xi > zone * (1.0 + 1e-12))
        throw DomainError("Floquet exponent outside the Brillouin zone");
    check_resolution(lc, modes, tail_threshold);

    const int dim = 2 * modes + 1;
    const double kappa = 2.0 * pi / lc.period;
    CVec d(dim);
    for (int j = 0; j < dim; ++j) d[j] = cplx(0.0, kappa * (j - modes) + xi);
    const auto D = d.asDiagonal();

    const Eigen::MatrixXcd Ta = toeplitz(lc.alpha, modes);
    const Eigen::MatrixXcd Tb = toeplitz(lc.viscosity, modes);
    const Eigen::MatrixXcd T21 = toeplitz(lc.m21, modes);
    const Eigen::MatrixXcd T22 = toeplitz(lc.m22, modes);

    BlochOperator op;
    op.xi = xi;
    op.modes = modes;
    op.period = lc.period;
    op.matrix = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    const CVec cd = lc.speed * d;
    op.matrix.topLeftCorner(dim, dim).diagonal() = cd;
    op.matrix.topRightCorner(dim, dim).diagonal() = d;
    op.matrix.bottomLeftCorner(dim, dim) = D * Ta + T21;
    Eigen::MatrixXcd br = D * Tb * D + T22;
    br.diagonal() += cd;
    op.matrix.bottomRightCorner(dim, dim) = br;
    return op;
}

Spectrum spectrum(const BlochOperator& op, bool with_residuals) {
    const dense::EigenResult r = dense::eig(op.matrix, with_residuals);
    Spectrum s;
    s.xi = op.xi;
    s.values.assign(r.values.data(), r.values.data() + r.values.size());
    if (with_residuals) {
        s.residuals.resize(s.values.size());
        for (std::size_t k = 0; k < s.values.size(); ++k) {
            const CVec v = r.vectors.col(static_cast<Eigen::Index>(k));
            const CVec res = op.matrix * v - s.values[k] * v;
            s.residuals[k] = res.norm() / v.norm();
        }
    }
    // deterministic order: by real part, then imaginary part
    std::vector<std::size_t> idx(s.values.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (s.values[a].real() != s.values[b].real()) return s.values[a].real() > s.values[b].real();
        return s.values[a].imag() < s.values[b].imag();
    });
    Spectrum sorted;
    sorted.xi = s.xi;
    for (std::size_t k : idx) {
        sorted.values.push_back(s.values[k]);
        if (with_residuals) sorted.residuals.push_back(s.residuals[k]);
    }
    return sorted;
}

CVec translation_mode(const LinearCoefficients& lc, int modes) {
    const int dim = 2 * modes + 1;
    const CVec ct = spectral::forward(spectral::derivative(lc.tau_bar, lc.period));
    const CVec cu = spectral::forward(spectral::derivative(lc.u_bar, lc.period));
    CVec v(2 * dim);
    for (int j = 0; j < dim; ++j) {
        v[j] = toeplitz_coeff(ct, j - modes);
        v[dim + j] = toeplitz_coeff(cu, j - modes);
    }
    return v;
}

int projector_rank(const BlochOperator& op, double radius, int contour_points, double rank_tolerance,
                   unsigned seed) {
    const Eigen::Index n = op.matrix.rows();
    const int probes = std::min<Eigen::Index>(6, n);
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd X(n, probes);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < probes; ++j) X(i, j) = cplx(normal(rng), normal(rng));
    Eigen::MatrixXcd PX = Eigen::MatrixXcd::Zero(n, probes);
    for (int k = 0; k < contour_points; ++k) {
        const double th = 2.0 * pi * (k + 0.5) / contour_points;
        const cplx z = radius * cplx(std::cos(th), std::sin(th));
        Eigen::MatrixXcd shifted = -op.matrix;
        shifted.diagonal().array() += z;
        PX += (z / static_cast<double>(contour_points)) * shifted.partialPivLu().solve(X);
    }
    const Eigen::VectorXd sv = dense::singular_values(PX);
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rank_tolerance * sv[0]) ++rank;
    return rank;
}

StabilityReport classify_stability(const LinearCoefficients& lc, const ClassifyOptions& opts) {
    if (opts.xi_points < 2) throw DomainError("classify_stability needs at least two xi points");
    StabilityReport rep;
    rep.modes = opts.modes;
    const double zone = pi / lc.period;
    const double first = zone / (opts.xi_points - 1);
    std::vector<double> grid;
    grid.push_back(0.0);
    for (int j = opts.refine_levels; j >= 1; --j) grid.push_back(first * std::ldexp(1.0, -j));
    for (int i = 1; i < opts.xi_points; ++i) grid.push_back(zone * i / (opts.xi_points - 1));
    rep.xi_grid = grid;

    std::vector<dense::ConditionedEigen> eigs(grid.size());
    parallel_for(static_cast<int>(grid.size()), opts.jobs, [&](int i) {
        eigs[i] = dense::eig_with_errors(assemble_bloch(lc, grid[i], opts.modes, opts.tail_threshold).matrix);
    });

    // zero group at xi = 0
    const auto& e0 = eigs[0];
    int zero_found = 0;
    bool d1 = true;
    double max_re = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < e0.values.size(); ++k) {
        const cplx l = e0.values[k];
        if (std::abs(l) < opts.zero_radius) {
            ++zero_found;
        } else {
            max_re = std::max(max_re, l.real());
            if (l.real() > opts.d1_tolerance + e0.errors[k]) d1 = false;
        }
        if (std::abs(std::abs(l) - opts.zero_radius) < 0.25 * opts.zero_radius) rep.contour_warning = true;
    }
    rep.zero_count = zero_found;
    rep.zero_multiplicity = projector_rank(assemble_bloch(lc, 0.0, opts.modes, opts.tail_threshold),
                                           opts.zero_radius, opts.contour_points, opts.rank_tolerance);
    rep.d3 = rep.zero_multiplicity == 2;

    rep.theta_global = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto& e = eigs[i];
        Eigen::Index top = 0;
        for (Eigen::Index k = 0; k < e.values.size(); ++k) {
            if (e.values[k].real() > e.values[top].real()) top = k;
            if (e.values[k].real() > opts.d1_tolerance + e.errors[k]) d1 = false;
        }
        const double m = e.values[top].real();
        max_re = std::max(max_re, m);
        if (std::abs(m) <= opts.d1_tolerance + e.errors[top]) {
            ++rep.unresolved_xi;
            continue;
        }
        rep.theta_global = std::min(rep.theta_global, -m / (grid[i] * grid[i]));
    }
    if (!std::isfinite(rep.theta_global)) rep.theta_global = 0.0;
    rep.max_real_part = max_re;
    rep.d1 = d1;

    // The two critical curves at the refined points: the two eigenvalues of least
    // modulus, labelled by the sign of Im(lambda)/xi ordering.
    if (zero_found == 2 && opts.refine_levels >= 2) {
        std::vector<std::array<cplx, 2>> track;
        std::vector<std::array<double, 2>> noise;
        for (int i = 1; i <= opts.refine_levels + 1 && i < static_cast<int>(grid.size()); ++i) {
            const auto& e = eigs[i];
            std::vector<Eigen::Index> idx(e.values.size());
            for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<Eigen::Index>(k);
            std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
                return std::abs(e.values[a]) < std::abs(e.values[b]);
            });
            std::array<Eigen::Index, 2> pick{idx[0], idx[1]};
            if (std::abs(e.values[idx[2]]) < 2.0 * std::abs(e.values[pick[1]])) rep.tracking_ambiguous = true;
            if (e.values[pick[0]].imag() > e.values[pick[1]].imag()) std::swap(pick[0], pick[1]);
            track.push_back({e.values[pick[0]], e.values[pick[1]]});
            noise.push_back({opts.d1_tolerance + e.errors[pick[0]], opts.d1_tolerance + e.errors[pick[1]]});
        }
        for (int c = 0; c < 2; ++c) {
            // Richardson on lambda/(i xi) at the two smallest xi
            const cplx s1 = track[0][c] / cplx(0.0, grid[1]);
            const cplx s2 = track[1][c] / cplx(0.0, grid[2]);
            const double ratio = grid[2] / grid[1];
            rep.critical_slopes[c] = ((ratio * s1 - s2) / (ratio - 1.0)).real();
            // Samples whose real part is below the eigenvalue error estimate carry no
            // curvature information; a curve with none of them resolved reports 0.
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < track.size(); ++i) {
                if (std::abs(track[i][c].real()) <= noise[i][c]) continue;
                const double x2 = grid[i + 1] * grid[i + 1];
                num += -track[i][c].real() * x2;
                den += x2 * x2;
            }
            if (den > 0.0) {
                rep.curvature[c] = num / den;
            } else {
                rep.curvature[c] = 0.0;
                ++rep.unresolved_curves;
            }
        }
        if (rep.critical_slopes[0] > rep.critical_slopes[1]) {
            std::swap(rep.critical_slopes[0], rep.critical_slopes[1]);
            std::swap(rep.curvature[0], rep.curvature[1]);
        }
        rep.theta_fit = std::min(rep.curvature[0], rep.curvature[1]);
    } else {
        rep.tracking_ambiguous = true;
    }
    rep.theta = std::min(rep.theta_fit, rep.theta_global);
    rep.d2 = rep.d1 && rep.d3 && rep.theta > 0.0;
    rep.h = rep.d3 && !rep.tracking_ambiguous &&
            std::abs(rep.critical_slopes[0] - rep.critical_slopes[1]) > opts.slope_tolerance;
    if (opts.keep_spectra) {
        rep.spectra.resize(grid.size());
        parallel_for(static_cast<int>(grid.size()), opts.jobs, [&](int i) {
            rep.spectra[i] = spectrum(assemble_bloch(lc, grid[i], opts.modes, opts.tail_threshold), true);
        });
    }
    return rep;
}

HfEstimate hf_asymptote(const Spectrum& spec, const LinearCoefficients& lc, int modes, const HfOptions& opts) {
    HfEstimate out;
    const double rate = lc.rate().mean();
    out.target = -rate;
    const double scale = std::abs(lc.speed) * 2.0 * pi / lc.period * modes;
    if (!(scale > 0.0)) throw DomainError("hf_asymptote needs c != 0");
    const double lo = opts.window_lo * scale, hi = opts.window_hi * scale;
    const double floor = -(5.0 * std::abs(rate) + 1.0);
    double wsum = 0.0, acc = 0.0;
    for (const cplx& l : spec.values) {
        const double y = std::abs(l.imag());
        if (y < lo || y > hi || l.real() < floor) continue;
        const double s = std::sin(pi * (y - lo) / (hi - lo));
        const double w = s * s;
        wsum += w;
        acc += w * l.real();
        ++out.count;
    }
    if (out.count < 3 || wsum <= 0.0)
        throw ResolutionError("hf_asymptote: too few resolved transport eigenvalues in the window");
    out.estimate = acc / wsum;
    out.relative_error = std::abs(out.estimate - out.target) / std::abs(out.target);
    return out;
}

HfEstimate hf_asymptote(const LinearCoefficients& lc, int modes, const HfOptions& opts) {
    const Spectrum s = spectrum(assemble_bloch(lc, opts.xi, modes, opts.tail_threshold), false);
    return hf_asymptote(s, lc, modes, opts);
}

double resolvent_norm(const BlochOperator& op, cplx lambda, int sobolev_index) {
    const int dim = op.dim();
    const double kappa = 2.0 * pi / op.period;
    Vec w(2 * dim);
    for (int j = 0; j < dim; ++j) {
        const double k2 = std::pow(kappa * (j - op.modes) + op.xi, 2);
        double acc = 0.0, p = 1.0;
        for (int s = 0; s <= sobolev_index; ++s, p *= k2) acc += p;
        w[j] = w[dim + j] = std::sqrt(acc);
    }
    Eigen::MatrixXcd m = -(w.asDiagonal() * op.matrix * w.cwiseInverse().asDiagonal());
    m.diagonal().array() += lambda;
    const Eigen::VectorXd sv = dense::singular_values(m);
    const double smin = sv[sv.size() - 1];
    return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

std::vector<ResolventSample> resolvent_norm_scan(const LinearCoefficients& lc, const std::vector<cplx>& lambdas,
                                                 const std::vector<double>& xis, const ResolventOptions& opts) {
    std::vector<ResolventSample> out(lambdas.size() * xis.size());
    parallel_for(static_cast<int>(xis.size()), opts.jobs, [&](int ix) {
        const BlochOperator op = assemble_bloch(lc, xis[ix], opts.modes, opts.tail_threshold);
        const Spectrum spec = spectrum(op, false);
        for (std::size_t il = 0; il < lambdas.size(); ++il) {
            ResolventSample& s = out[ix * lambdas.size() + il];
            s.lambda = lambdas[il];
            s.xi = xis[ix];
            double dist = std::numeric_limits<double>::infinity();
            for (const cplx& l : spec.values) dist = std::min(dist, std::abs(l - s.lambda));
            if (dist <= opts.margin * std::max(1.0, std::abs(s.lambda))) {
                s.skipped = true;
                s.norm = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            s.norm = resolvent_norm(op, s.lambda, opts.sobolev_index);
        }
    });
    return out;
}

std::vector<cplx> region_lambdas(const RegionOptions& region) {
    if (!(region.radius > 0.0)) throw DomainError("region radius must be positive");
    std::vector<cplx> out;
    for (int i = 0; i < region.radial_samples; ++i) {
        const double r = region.radius * std::pow(10.0, region.radial_samples == 1 ? 0.0 : double(i) / (region.radial_samples - 1));
        for (int j = 0; j < region.angular_samples; ++j) {
            const double th = -pi + 2.0 * pi * (j + 0.5) / region.angular_samples;
            const cplx l = std::polar(r, th);
            if (l.real() >= -0.5 * region.eta) out.push_back(l);
        }
        // the left boundary line Re lambda = -eta/2
        const double x = -0.5 * region.eta;
        if (r > std::abs(x)) {
            const double y = std::sqrt(r * r - x * x);
            out.emplace_back(x, y);
            out.emplace_back(x, -y);
        }
    }
    return out;
}

std::vector<double> brillouin_samples(double period, int count) {
    std::vector<double> xs;
    const double zone = pi / period;
    for (int i = 0; i < count; ++i) xs.push_back(-zone + 2.0 * zone * (i + 0.5) / count);
    return xs;
}

RegionScan resolvent_region_scan(const LinearCoefficients& lc, const RegionOptions& region,
                                 const ResolventOptions& opts) {
    RegionScan scan;
    scan.samples = resolvent_norm_scan(lc, region_lambdas(region), brillouin_samples(lc.period, region.xi_samples), opts);
    for (const auto& s : scan.samples) {
        if (s.skipped) {
            ++scan.skipped;
            continue;
        }
        ++scan.evaluated;
        scan.sup = std::max(scan.sup, s.norm);
    }
    return scan;
}

double spectral_radius_bound(const LinearCoefficients& lc, double eta, int xi_samples, int modes) {
    double r = 0.0;
    for (double xi : brillouin_samples(lc.period, xi_samples)) {
        const Spectrum s = spectrum(assemble_bloch(lc, xi, modes), false);
        for (const cplx& l : s.values)
            if (l.real() >= -eta) r = std::max(r, std::abs(l));
    }
    return r;
}

}  // namespace rollwave
