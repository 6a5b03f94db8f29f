#include "rollwave/gauge.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "rollwave/spectral.hpp"

namespace rollwave {

std::string to_string(EnergyWeight w) { return w == EnergyWeight::Unit ? "unit" : "cubic"; }

EnergyWeight energy_weight_from_string(const std::string& name) {
    if (name == "unit") return EnergyWeight::Unit;
    if (name == "cubic") return EnergyWeight::Cubic;
    throw DomainError("energy weight must be 'unit' or 'cubic'");
}

namespace {

Vec weight_values(const LinearCoefficients& lc, EnergyWeight w) {
    if (w == EnergyWeight::Unit) return Vec::Ones(lc.size());
    return lc.tau_bar.array().cube().matrix();
}

void fill_phi2_dependent(GaugeTriple& g, const LinearCoefficients& lc, double phi2) {
    g.phi2 = phi2;
    const Vec a = lc.rate();
    const Eigen::ArrayXd aw = lc.alpha.array() * g.weight_values.array();
    g.phi3 = ((g.phi1.array() - aw * phi2) / lc.viscosity.array()).matrix();
    g.coercivity_coeff = (g.reference_rate.array() * g.phi1.array() -
                          lc.alpha.array() * aw / lc.viscosity.array() * phi2)
                             .matrix();
    g.coercivity_min = g.coercivity_coeff.minCoeff();
}

}  // namespace

GaugeTriple complete_gauge(const LinearCoefficients& lc, const Vec& phi1, const Vec& phi1_x,
                           const Vec& reference_rate, const GaugeOptions& opts) {
    if (phi1.minCoeff() <= 0.0 || !phi1.allFinite()) throw NumericalError("gauge weight phi1 is not positive");
    GaugeTriple g;
    g.phi1 = phi1;
    g.phi1_x = phi1_x;
    g.phi1_min = phi1.minCoeff();
    g.phi1_max = phi1.maxCoeff();
    g.weight = opts.weight;
    g.weight_values = weight_values(lc, opts.weight);
    g.reference_rate = reference_rate;
    g.mean_rate = lc.rate().mean();

    if (opts.phi2) {
        if (!(*opts.phi2 > 0.0)) throw DomainError("phi2 must be positive");
        fill_phi2_dependent(g, lc, *opts.phi2);
        return g;
    }
    g.phi2_auto = true;
    const double target = 0.5 * reference_rate.cwiseProduct(phi1).minCoeff();
    if (!(target > 0.0))
        throw NumericalError("gauge construction failure: reference rate is not positive");
    for (int k = 0; k <= opts.sweep_levels; ++k) {
        fill_phi2_dependent(g, lc, std::ldexp(1.0, -k));
        if (g.coercivity_min >= target) return g;
    }
    throw NumericalError("gauge construction failure: no phi2 in the sweep gives coercivity");
}

GaugeTriple build_gauge(const LinearCoefficients& lc, const GaugeOptions& opts) {
    if (lc.speed == 0.0) throw DomainError("gauge construction needs c != 0");
    const Vec a = lc.rate();
    const double r = a.mean();
    const Vec centered = (a.array() - r).matrix();
    const Vec exponent = (-2.0 / lc.speed) * spectral::antiderivative(centered, lc.period);
    Vec phi1 = exponent.array().exp().matrix();
    phi1 /= phi1.mean();
    const Vec phi1_x = ((-2.0 / lc.speed) * centered.array() * phi1.array()).matrix();
    GaugeTriple g = complete_gauge(lc, phi1, phi1_x, Vec::Constant(lc.size(), r), opts);
    const double growth = std::exp(-2.0 / lc.speed * lc.period * centered.mean());
    g.periodicity_gap = std::abs(phi1[0] * growth - phi1[0]);
    return g;
}

GaugeTriple build_gauge(const WaveProfile& profile, const GaugeOptions& opts) {
    return build_gauge(linearize(profile), opts);
}

double energy(const FieldPair& U, const GaugeTriple& g, const LinearCoefficients& lc) {
    if (U.tau.size() != lc.size() || U.u.size() != lc.size())
        throw DomainError("energy: perturbation is not on the profile grid");
    const Vec tx = spectral::derivative(U.tau, lc.period);
    const Vec ux = spectral::derivative(U.u, lc.period);
    const Eigen::ArrayXd density = 0.5 * g.phi1.array() * tx.array().square() +
                                   0.5 * g.phi2 * g.weight_values.array() * ux.array().square() +
                                   g.phi3.array() * U.tau.array() * ux.array();
    return density.mean() * lc.period;
}

double energy(const FieldPair& U, const GaugeTriple& gauge, const WaveProfile& profile) {
    return energy(U, gauge, linearize(profile));
}

BlochEnergy bloch_energy(const ComplexPair& U, double xi, const GaugeTriple& g, double period) {
    BlochEnergy out;
    const double zone = 2.0 * std::numbers::pi / period;
    out.xi = xi;
    if (xi < -0.5 * zone || xi >= 0.5 * zone) {
        out.xi = xi - zone * std::floor(xi / zone + 0.5);
        out.shifted = true;
    }
    const CVec dt = spectral::derivative(U.tau, period, 1, out.xi);
    const CVec du = spectral::derivative(U.u, period, 1, out.xi);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < dt.size(); ++j) {
        acc += 0.5 * g.phi1[j] * std::norm(dt[j]) + 0.5 * g.phi2 * g.weight_values[j] * std::norm(du[j]) +
               (g.phi3[j] * U.tau[j] * std::conj(du[j])).real();
    }
    out.value = acc / static_cast<double>(dt.size()) * period;
    return out;
}

DissipationCoefficients dissipation_coefficients(const GaugeTriple& g, const LinearCoefficients& lc,
                                                 const Vec& phi1_x) {
    DissipationCoefficients d;
    d.coef_tau_x2 = 0.5 * lc.speed * phi1_x + lc.alpha.cwiseProduct(g.phi3);
    d.coef_uxx2 = g.phi2 * g.weight_values.cwiseProduct(lc.viscosity);
    d.coef_cross = (g.phi1.array() - lc.alpha.array() * g.weight_values.array() * g.phi2 -
                    lc.viscosity.array() * g.phi3.array())
                       .matrix();
    return d;
}

DissipationCoefficients dissipation_coefficients(const GaugeTriple& g, const LinearCoefficients& lc) {
    return dissipation_coefficients(g, lc, spectral::derivative(g.phi1, lc.period));
}

EquivalenceConstants energy_equivalence(const GaugeTriple& g, const LinearCoefficients& lc, int modes) {
    if (modes < 1) throw DomainError("energy_equivalence needs at least one mode");
    EquivalenceConstants out;
    const double w2min = (g.phi2 * g.weight_values).minCoeff();
    const double phi3_sup = g.phi3.cwiseAbs().maxCoeff();
    const double delta = 0.5 * w2min;
    out.M = phi3_sup * phi3_sup / (2.0 * delta);
    out.c0_analytic = std::min(0.5 * g.phi1_min, 0.25 * w2min);
    out.upper = std::max({0.5 * g.phi1_max + 0.5 * phi3_sup,
                          0.5 * (g.phi2 * g.weight_values).maxCoeff() + 0.5 * phi3_sup});

    const int n = lc.size();
    if (2 * modes >= n) throw DomainError("energy_equivalence: too many modes for the grid");
    const double kappa = 2.0 * std::numbers::pi / lc.period;
    const CVec f1 = spectral::forward(g.phi1);
    const CVec f2 = spectral::forward((g.phi2 * g.weight_values).eval());
    const CVec f3 = spectral::forward(g.phi3);
    auto coeff = [n](const CVec& f, int m) { return f[m >= 0 ? m : n + m]; };

    const int dim = 2 * modes + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
    Vec B(2 * dim);
    const double L = lc.period;
    for (int a = 0; a < dim; ++a) {
        const int ma = a - modes;
        for (int b = 0; b < dim; ++b) {
            const int mb = b - modes;
            // row index a pairs with conj(coefficient of mode ma)
            A(a, b) = 0.5 * L * coeff(f1, ma - mb) * kappa * kappa * double(ma * mb);
            A(dim + a, dim + b) = 0.5 * L * coeff(f2, ma - mb) * kappa * kappa * double(ma * mb);
            const cplx c = L * coeff(f3, ma - mb) * cplx(0.0, -kappa * ma);
            A(dim + a, b) += 0.5 * c;
            A(b, dim + a) += 0.5 * std::conj(c);
        }
        A(a, a) += out.M * L;
        A(dim + a, dim + a) += out.M * L;
        const double stiff = ma == 0 ? L : L * kappa * kappa * ma * ma;
        B[a] = stiff;
        B[dim + a] = stiff;
    }
    const Vec s = B.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXcd scaled = s.asDiagonal() * A * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(scaled, Eigen::EigenvaluesOnly);
    out.c0_numeric = es.eigenvalues().minCoeff();
    return out;
}

double compensator_objective(const Eigen::Matrix2d& A0, double k, const Eigen::Matrix2d& A,
                             const Eigen::Matrix2d& B) {
    Eigen::Matrix2d K;
    K << 0.0, k, -k, 0.0;
    const Eigen::Matrix2d M = A0 * B + K * A;
    const Eigen::Matrix2d S = 0.5 * (M + M.transpose());
    const double tr = 0.5 * (S(0, 0) + S(1, 1));
    const double d = std::hypot(0.5 * (S(0, 0) - S(1, 1)), S(0, 1));
    const double scale = A0.norm() + std::abs(k);
    return scale > 0.0 ? (tr - d) / scale : 0.0;
}

namespace {

Eigen::Matrix2d spd_from(double l1, double l2, double l3) {
    Eigen::Matrix2d L;
    L << l1, 0.0, l2, l3;
    return L * L.transpose();
}

}  // namespace

CompensatorResult kawashima_compensator(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
    // parameters: log l1, l2, log l3, k
    std::array<double, 4> best{0.0, 0.0, 0.0, 0.0};
    auto eval = [&](const std::array<double, 4>& p) {
        return compensator_objective(spd_from(std::exp(p[0]), p[1], std::exp(p[2])), p[3], A, B);
    };
    double best_val = eval(best);
    const double log_lo = std::log(1e-2), log_hi = std::log(1e2);
    const int nl = 9, n2 = 11, nk = 17;
    for (int i = 0; i < nl; ++i)
        for (int j = 0; j < n2; ++j)
            for (int l = 0; l < nl; ++l)
                for (int m = 0; m < nk; ++m) {
                    const double kmag = std::pow(10.0, -3.0 + 5.0 * (std::abs(m - nk / 2) - 1) / (nk / 2 - 1));
                    const double k = m == nk / 2 ? 0.0 : (m < nk / 2 ? -kmag : kmag);
                    std::array<double, 4> p{log_lo + (log_hi - log_lo) * i / (nl - 1),
                                            -10.0 + 20.0 * j / (n2 - 1),
                                            log_lo + (log_hi - log_lo) * l / (nl - 1), k};
                    const double v = eval(p);
                    if (v > best_val) {
                        best_val = v;
                        best = p;
                    }
                }
    // compass refinement
    std::array<double, 4> step{0.5, 1.0, 0.5, std::max(1e-3, 0.5 * std::abs(best[3]))};
    for (int iter = 0; iter < 4000; ++iter) {
        bool improved = false;
        for (int d = 0; d < 4 && !improved; ++d)
            for (double sgn : {1.0, -1.0}) {
                std::array<double, 4> p = best;
                p[d] += sgn * step[d];
                const double v = eval(p);
                if (v > best_val + 1e-15) {
                    best_val = v;
                    best = p;
                    improved = true;
                    break;
                }
            }
        if (!improved) {
            for (double& s : step) s *= 0.5;
            if (*std::max_element(step.begin(), step.end()) < 1e-10) break;
        }
    }
    CompensatorResult out;
    Eigen::Matrix2d A0 = spd_from(std::exp(best[0]), best[1], std::exp(best[2]));
    const double scale = A0.norm() + std::abs(best[3]);
    out.A0 = A0 / scale;
    out.K << 0.0, best[3] / scale, -best[3] / scale, 0.0;
    out.min_eig = best_val;
    out.feasible = best_val > 0.0;
    return out;
}

std::pair<Eigen::Matrix2d, Eigen::Matrix2d> frozen_symbol(const LinearCoefficients& lc, int j) {
    Eigen::Matrix2d A, B;
    A << -lc.speed, -1.0, -lc.alpha[j], -lc.speed;
    B << 0.0, 0.0, 0.0, lc.viscosity[j];
    return {A, B};
}

}  // namespace rollwave
