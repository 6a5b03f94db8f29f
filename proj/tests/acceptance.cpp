// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "rollwave/bloch.hpp"
#include "rollwave/conditions.hpp"
#include "rollwave/distance.hpp"
#include "rollwave/evolution.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/scan.hpp"
#include "rollwave/shock.hpp"
#include "rollwave/spectral.hpp"
#include "support.hpp"

using namespace rollwave;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Verdict&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %2d %s:%s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.str().c_str(), secs);
    std::fflush(stdout);
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

FieldPair bump(const Vec& x, double amp) {
    FieldPair U = FieldPair::zeros(static_cast<int>(x.size()));
    for (int j = 0; j < x.size(); ++j) {
        const double b = std::exp(-x[j] * x[j]);
        U.tau[j] = amp * b;
        U.u[j] = amp * x[j] * b;
    }
    return U;
}

// ---------------------------------------------------------------- 1
void mean_identity(Verdict& v) {
    double worst = 0.0;
    const std::vector<std::function<double(double)>> fs{
        [](double) { return 1.0; }, [](double t) { return t; }, [](double t) { return t * t; },
        [](double t) { return 1.0 / (t * t * t); }};
    for (const WaveProfile& w : testing::corpus())
        for (const auto& f : fs) worst = std::max(worst, std::abs(check_mean_identity(w, f)));
    v.detail << " " << testing::corpus().size() << " profiles, max |<f(tau) u_x>| = " << worst << " (tol 1e-8)";
    v.require(testing::corpus().size() >= 10, "corpus has fewer than 10 profiles");
    v.require(worst <= 1e-8, "mean identity");
}

// ---------------------------------------------------------------- 2
void averaged_positivity(Verdict& v) {
    double worst = 0.0, smallest = 1e300;
    const std::vector<std::function<double(double)>> gs{
        [](double) { return 1.0; }, [](double t) { return t * t; }, [](double t) { return t * t * t; }};
    for (const WaveProfile& w : testing::corpus())
        for (const auto& g : gs) {
            const WeightedMean m = weighted_mean_identity(w, g);
            // independent evaluation of F^-2 <g tau^-3>
            Vec rhs(w.size());
            for (int j = 0; j < w.size(); ++j) rhs[j] = g(w.tau_bar[j]) / std::pow(w.tau_bar[j], 3);
            const double expect = spectral::mean(rhs) / (w.params.froude * w.params.froude);
            worst = std::max(worst, std::abs(m.lhs - expect));
            smallest = std::min(smallest, m.lhs);
        }
    v.detail << " max |<g alpha> - F^-2 <g tau^-3>| = " << worst << " (tol 1e-8), min <g alpha> = " << smallest;
    v.require(worst <= 1e-8, "identity");
    v.require(smallest > 0.0, "positivity");
}

// ---------------------------------------------------------------- 3
void threshold(Verdict& v) {
    ScanConfig cfg;
    for (int i = 0; i <= 24; ++i) cfg.froude.push_back(2.1 + 0.1 * i);
    cfg.periods = {testing::kCorpusPeriod};
    cfg.nu = testing::kCorpusNu;
    cfg.n = 128;
    cfg.stability = false;
    cfg.fit_eta = false;
    const ScanResult res = run_scan(cfg);
    const BranchSummary& b = res.branches.front();
    double min_avg = 1e300;
    for (const ScanRow& r : res.rows) min_avg = std::min(min_avg, r.averaged_value);
    v.detail << " F in [2.1, 4.5] step 0.1 at N = 128: " << b.rows << " rows, " << b.failures << " failures, F* = ";
    if (b.froude_star) v.detail << *b.froude_star;
    else v.detail << "none";
    v.detail << ", min averaged_value = " << min_avg;
    v.require(b.failures == 0, "every cell solved");
    v.require(b.froude_star && *b.froude_star >= 3.0 && *b.froude_star <= 4.0, "flip inside [3, 4]");
    v.require(b.averaged_positive && min_avg > 0.0, "averaged value positive");
}

// ---------------------------------------------------------------- 4
void gauge_validity(Verdict& v) {
    int failing_pointwise = 0;
    double gap = 0.0, cross = 0.0, coercive = 1e300, inv_phi1 = 0.0;
    bool all_auto = true;
    for (const WaveProfile& w : testing::corpus()) {
        const LinearCoefficients lc = linearize(w);
        const GaugeTriple g = build_gauge(lc);
        const DissipationCoefficients d = dissipation_coefficients(g, lc);
        const double scale =
            g.phi1.cwiseAbs().maxCoeff() + lc.viscosity.cwiseProduct(g.phi3).cwiseAbs().maxCoeff();
        gap = std::max(gap, g.periodicity_gap);
        cross = std::max(cross, d.coef_cross.cwiseAbs().maxCoeff() / scale);
        coercive = std::min(coercive, g.coercivity_min);
        inv_phi1 = std::max(inv_phi1, 1.0 / g.phi1_min);
        all_auto = all_auto && g.phi2_auto;
        if (!slope_report(w).pointwise_holds) ++failing_pointwise;
    }
    v.detail << " periodicity gap " << gap << " (tol 1e-8), max 1/phi1 " << inv_phi1 << ", cross " << cross
             << " (tol 1e-12), min coercivity " << coercive << ", pointwise-failing profiles " << failing_pointwise;
    v.require(gap <= 1e-8, "periodicity");
    v.require(std::isfinite(inv_phi1) && inv_phi1 > 0.0, "1/phi1 bounded");
    v.require(cross <= 1e-12, "cross term");
    v.require(all_auto && coercive > 0.0, "coercivity with auto phi2");
    v.require(failing_pointwise >= 2, "two pointwise-failing profiles");
}

// ---------------------------------------------------------------- 5
struct DampingSweep {
    std::vector<double> eta;
    int violations = 0;
};

DampingSweep damping_sweep(int n, double dt) {
    const WaveProfile& w = testing::corpus_profile(4.0, n);
    const LinearCoefficients lc = linearize(w);
    const GaugeTriple g = build_gauge(lc);
    DampingSweep out;
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const FieldPair U0 = remove_neutral_modes(lc, random_smooth_perturbation(n, w.period, 8, 1e-3, seed));
        EvolveOptions o;
        o.T = 10.0;
        o.dt = dt;
        o.sample_every = static_cast<int>(std::lround(0.05 / dt));
        LinearRun run = evolve_linear(lc, g, U0, o);
        apply_damping_fit(run.trace);
        out.eta.push_back(run.trace.fitted_eta);
        out.violations += run.trace.violation_count;
    }
    return out;
}

void linear_damping(Verdict& v) {
    const WaveProfile& w = testing::corpus_profile(4.0);
    v.require(!slope_report(w).pointwise_holds, "F = 4 profile fails the pointwise condition");
    const DampingSweep base = damping_sweep(256, 0.01);
    const DampingSweep half_dt = damping_sweep(256, 0.005);
    const DampingSweep double_n = damping_sweep(512, 0.01);
    double eta_min = 1e300, change = 0.0;
    for (std::size_t i = 0; i < base.eta.size(); ++i) {
        eta_min = std::min(eta_min, base.eta[i]);
        change = std::max({change, relative_gap(half_dt.eta[i], base.eta[i]), relative_gap(double_n.eta[i], base.eta[i])});
    }
    v.detail << " 20 seeds at N = 256, dt = 0.01: min eta " << eta_min << ", violations "
             << base.violations + half_dt.violations + double_n.violations
             << ", max relative eta change under dt/2 and 2N " << change << " (tol 0.2)";
    v.require(eta_min > 0.0, "eta > 0");
    v.require(base.violations + half_dt.violations + double_n.violations == 0, "zero violations");
    v.require(change <= 0.2, "eta stable");
}

// ---------------------------------------------------------------- 6
void high_frequency(Verdict& v) {
    double worst = 0.0;
    bool decreasing = true;
    for (const WaveProfile& w : testing::corpus(512)) {
        const LinearCoefficients lc = linearize(w);
        const HfEstimate fine = hf_asymptote(lc, 256);
        const HfEstimate coarse = hf_asymptote(lc, 128);
        const double target = -slope_report(w).averaged_value;
        worst = std::max(worst, relative_gap(fine.estimate, target));
        decreasing = decreasing && relative_gap(coarse.estimate, target) > relative_gap(fine.estimate, target);
    }
    v.detail << " corpus at N = 512, M = 256: max relative error " << worst << " (tol 0.05), decreasing from M = 128: "
             << (decreasing ? "yes" : "no");
    v.require(worst <= 0.05, "within 5%");
    v.require(decreasing, "error decreasing with M");
}

// ---------------------------------------------------------------- 7
void resolvent(Verdict& v) {
    const LinearCoefficients lc = linearize(testing::corpus_profile(4.0));
    RegionOptions region;
    region.eta = 0.5 * lc.rate().mean();
    region.radius = 1.5 * spectral_radius_bound(lc, region.eta, 16, 64);
    region.xi_samples = 16;
    ResolventOptions ro;
    ro.sobolev_index = 1;
    ro.modes = 64;
    const RegionScan a = resolvent_region_scan(lc, region, ro);
    ro.modes = 128;
    const RegionScan b = resolvent_region_scan(lc, region, ro);
    const double change = relative_gap(b.sup, a.sup);
    v.detail << " F = 4, eta = " << region.eta << ", R = " << region.radius << ", 16 xi: sup " << a.sup << " (M = 64), "
             << b.sup << " (M = 128), change " << change << " (tol 0.1), skipped " << a.skipped + b.skipped;
    v.require(std::isfinite(a.sup) && std::isfinite(b.sup), "finite");
    v.require(change <= 0.1, "stable under doubling M");
}

// ---------------------------------------------------------------- 8
void constant_state(Verdict& v) {
    double bloch_err = 0.0, generator_err = 0.0, evolve_err = 0.0;
    const cplx i(0.0, 1.0);
    for (double F : {1.0, 3.0}) {
        ModelParams p;
        p.froude = F;
        p.nu = 0.1;
        p.speed = 0.5;
        const LinearCoefficients lc = linearize_constant(p, 10.0, 32, {1.0, 1.0});
        const double kappa = 2 * pi / lc.period;
        for (double xi : {0.0, 0.1, -0.25}) {
            const Spectrum s = spectrum(assemble_bloch(lc, xi, 16), false);
            for (int m = -16; m <= 16; ++m)
                for (const cplx& root : constant_state_spectrum(p, kappa * m + xi)) {
                    double d = 1e300;
                    for (const cplx& l : s.values) d = std::min(d, std::abs(l - root));
                    bloch_err = std::max(bloch_err, d / (1.0 + std::abs(root)));
                }
        }
        // evolution: the semi-discrete generator and the time-stepped rate, the latter
        // Richardson-extrapolated in dt
        const Eigen::MatrixXcd A = linear_matrix(lc).cast<cplx>();
        const GaugeTriple g = build_gauge(lc);
        const Vec x = spectral::grid(lc.size(), lc.period);
        for (int m : {1, 3}) {
            const double k = kappa * m;
            for (const cplx& lambda : constant_state_spectrum(p, k)) {
                const cplx vu = (lambda - i * lc.speed * k) / (i * k);
                Eigen::VectorXcd mode(2 * lc.size());
                FieldPair U = FieldPair::zeros(lc.size());
                for (int j = 0; j < lc.size(); ++j) {
                    const cplx e = std::exp(i * k * x[j]);
                    mode[j] = e;
                    mode[lc.size() + j] = vu * e;
                    U.tau[j] = e.real();
                    U.u[j] = (vu * e).real();
                }
                generator_err = std::max(generator_err, (A * mode - lambda * mode).norm() / mode.norm() /
                                                            std::max(1.0, std::abs(lambda)));
                double rate[2];
                int q = 0;
                for (double dt : {2e-3, 1e-3}) {
                    EvolveOptions o;
                    o.T = 1.0;
                    o.dt = dt;
                    const LinearRun run = evolve_linear(lc, g, U, o);
                    rate[q++] = std::log(run.trace.L2_values.back() / run.trace.L2_values.front());
                }
                const double extrapolated = (4.0 * rate[1] - rate[0]) / 3.0;
                evolve_err =
                    std::max(evolve_err, std::abs(extrapolated - lambda.real()) / std::max(1.0, std::abs(lambda)));
            }
        }
    }
    ModelParams p;
    p.nu = 0.1;
    const double onset = locate_instability_onset(p, 1.0, 3.0, 1e-6);
    v.detail << " Bloch vs symbol " << bloch_err << ", generator residual " << generator_err
             << ", evolution rate error " << evolve_err << " (tol 1e-8), onset F = " << onset << " (2 +- 1e-2)";
    v.require(bloch_err <= 1e-8, "Bloch spectra");
    v.require(generator_err <= 1e-8 && evolve_err <= 1e-8, "evolution rates");
    v.require(std::abs(onset - 2.0) <= 1e-2, "onset");
}

// ---------------------------------------------------------------- 9
void modulated(Verdict& v) {
    const WaveProfile& w = testing::corpus_profile(3.2);
    const LinearCoefficients lc = linearize(w);
    const GaugeTriple g = build_gauge(lc);
    const FieldPair V0 = random_smooth_perturbation(w.size(), w.period, 6, 1e-3, 4);
    double worst_gap = 0.0;
    for (double dt : {0.02, 0.01}) {
        ModulatedOptions mo;
        mo.T = 1.0;
        mo.dt = dt;
        const ModulatedRun mod = evolve_modulated(lc, g, V0, modulation_from_formula("0"), mo);
        NonlinearOptions no;
        no.T = 1.0;
        no.dt = dt;
        const NonlinearRun non = evolve_nonlinear(lc, {(w.tau_bar + V0.tau).eval(), (w.u_bar + V0.u).eval()}, no);
        const FieldPair& full = non.trajectory.states.back();
        const FieldPair pert{full.tau - w.tau_bar, full.u - w.u_bar};
        const FieldPair& m = mod.trajectory.states.back();
        worst_gap = std::max(worst_gap, sobolev_norm({m.tau - pert.tau, m.u - pert.u}, w.period, 0) /
                                            sobolev_norm(pert, w.period, 0));
    }
    const ModulationInput psi =
        modulation_from_formula("eps*sin(2*pi*x/L)*exp(-t)", {{"eps", 1e-3}, {"L", w.period}}, 0.0, 2);
    ModulatedOptions o;
    o.T = 5.0;
    o.sample_every = 5;
    const ModulatedRun run = evolve_modulated(lc, g, FieldPair::zeros(w.size()), psi, o);
    v.detail << " psi = 0 vs nonlinear relative gap " << worst_gap << " (tol 1e-7)";
    v.require(worst_gap <= 1e-7, "psi = 0 equivalence");
    v.require(!run.hypothesis_violated, "smallness hypothesis");
    for (int s : {1, 2}) {
        const IntegralBoundFit f = modulated_bound_fit(run, s);
        v.detail << ", s = " << s << ": theta " << f.theta << " violations " << f.violation_count;
        v.require(f.theta > 0.0 && f.violation_count == 0, "bound for s = " + std::to_string(s));
    }
}

// ---------------------------------------------------------------- 10
void shock_suite(Verdict& v) {
    ModelParams p;
    p.system = SystemKind::IsentropicGas;
    p.gas_gamma = 5.0 / 3.0;
    p.gas_amp = 1.0;
    p.nu = 1.0;
    const ShockProfile s = solve_shock_profile(p, 1.0, 2.0);
    bool monotone = true;
    for (int j = 1; j < s.size(); ++j) monotone = monotone && s.tau_bar[j] > s.tau_bar[j - 1];

    // |rate - I| e^{fitted |x|} stays bounded away from the core, down to round-off
    const ShockInterpolant I = build_interpolant(s);
    const Vec diff = (I.rate - I.values).cwiseAbs();
    const double floor = 1e-10 * diff.maxCoeff();
    double ref = 0.0, envelope = 0.0;
    for (int j = 0; j < s.size(); ++j) {
        const double ax = std::abs(s.x[j]);
        if (ax < 2.0 || diff[j] < floor) continue;
        const double scaled = diff[j] * std::exp(I.fitted_decay * ax);
        if (ax < 2.0 + s.dx()) ref = std::max(ref, scaled);
        envelope = std::max(envelope, scaled);
    }

    const ShockGauge g = build_shock_gauge(s, I);
    const DissipationCoefficients d = dissipation_coefficients(g.triple, shock_linearization(s), g.triple.phi1_x);
    const double cross = d.coef_cross.cwiseAbs().maxCoeff() / g.triple.phi1.cwiseAbs().maxCoeff();

    ShockEvolveOptions o;
    o.T = 3.0;
    o.sample_every = 5;
    const ShockRun run = evolve_shock_linear(s, g.triple, bump(s.x, 1e-3), o);
    v.detail << " RH residual " << s.rh_residual << " (tol 1e-12), monotone " << (monotone ? "yes" : "no")
             << ", fitted decay " << I.fitted_decay << " vs profile " << s.decay_rate << ", envelope ratio "
             << envelope / ref << ", cross " << cross << ", eta " << run.trace.fitted_eta << " violations "
             << run.trace.violation_count << ", boundary ratio " << run.boundary_ratio;
    v.require(s.rh_residual <= 1e-12, "RH");
    v.require(monotone, "monotone");
    v.require(I.fitted_decay > 0.0 && ref > 0.0 && envelope <= 10.0 * ref, "exponential decay of rate - I");
    v.require(cross <= 1e-12, "cross term");
    v.require(run.trace.fitted_eta > 0.0 && run.trace.violation_count == 0, "damping");
    v.require(run.boundary_ratio <= o.boundary_tolerance, "boundary layers quiet");
}

// ---------------------------------------------------------------- 11
void distance(Verdict& v) {
    const WaveProfile& w = testing::corpus_profile(3.2, 128);
    const FieldPair ref{w.tau_bar, w.u_bar};
    const double self = space_modulated_distance(ref, ref, w.period).delta;
    double shift = 0.0;
    for (double a : {0.3, -1.1, 2.5}) {
        const FieldPair u{spectral::shift(w.tau_bar, w.period, a), spectral::shift(w.u_bar, w.period, a)};
        shift = std::max(shift, space_modulated_distance(u, ref, w.period).delta);
    }
    bool below = true;
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const FieldPair b = random_smooth_perturbation(w.size(), w.period, 5, 0.05, seed);
        const DistanceResult r = space_modulated_distance({w.tau_bar + b.tau, w.u_bar + b.u}, ref, w.period);
        below = below && r.delta <= r.baseline;
    }
    v.detail << " delta(u, u) = " << self << ", max shifted delta " << shift << " (tol 1e-6), below identity baseline "
             << (below ? "yes" : "no");
    v.require(self == 0.0, "self distance");
    v.require(shift <= 1e-6, "shift");
    v.require(below, "baseline");
}

}  // namespace

int main() {
    criterion(1, "mean identity on the corpus", mean_identity);
    criterion(2, "averaged positivity on the corpus", averaged_positivity);
    criterion(3, "pointwise threshold along a scanned branch", threshold);
    criterion(4, "gauge validity", gauge_validity);
    criterion(5, "linear damping at F = 4", linear_damping);
    criterion(6, "high-frequency asymptote", high_frequency);
    criterion(7, "resolvent bounds", resolvent);
    criterion(8, "constant-state oracle", constant_state);
    criterion(9, "modulated reduction and nonlinear damping", modulated);
    criterion(10, "viscous shock suite", shock_suite);
    criterion(11, "space-modulated distance sanity", distance);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
