#include "rollwave/scan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rollwave/evolution.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/io.hpp"
#include "rollwave/parallel.hpp"

namespace rollwave {

namespace {

// Walks one branch in F at fixed period; failed targets leave an empty profile.
std::vector<std::optional<WaveProfile>> build_branch(const ScanConfig& cfg, double period,
                                                     const std::vector<double>& froude,
                                                     std::vector<std::string>& notes) {
    std::vector<std::optional<WaveProfile>> out(froude.size());
    notes.assign(froude.size(), "ok");
    ModelParams p;
    p.nu = cfg.nu;
    p.froude = std::min(froude.front(), cfg.seed_froude);
    std::optional<WaveProfile> last;
    try {
        SeedOptions seed;
        seed.newton = cfg.control.newton;
        last = seed_roll_wave(p, period, cfg.n, seed);
    } catch (const Error& e) {
        notes[0] = std::string("seed failed: ") + e.what();
    }
    for (std::size_t i = 0; i < froude.size(); ++i) {
        if (!last) {
            if (i > 0) notes[i] = "no branch";
            continue;
        }
        const ContinuationRun run = continue_in_parameter(*last, froude[i], cfg.control);
        if (run.failed) {
            notes[i] = run.failure_reason;
            continue;
        }
        last = run.profiles.back();
        out[i] = last;
    }
    return out;
}

void analyze(const ScanConfig& cfg, const WaveProfile& w, ScanRow& row, std::size_t index) {
    const SlopeReport sr = slope_report(w);
    row.pointwise_margin = sr.pointwise_margin;
    row.pointwise_holds = sr.pointwise_holds;
    row.averaged_value = sr.averaged_value;
    row.averaged_holds = sr.averaged_holds;
    row.speed = w.speed();
    row.discharge = w.discharge();
    const LinearCoefficients lc = linearize(w);
    try {
        if (cfg.stability) {
            ClassifyOptions co;
            co.modes = cfg.stability_modes;
            co.xi_points = cfg.stability_xi_points;
            co.keep_spectra = false;
            const StabilityReport rep = classify_stability(lc, co);
            row.d1 = rep.d1;
            row.d2 = rep.d2;
            row.d3 = rep.d3;
            row.h = rep.h;
            row.max_real_part = rep.max_real_part;
        }
        const GaugeTriple g = build_gauge(lc);
        row.coercivity_min = g.coercivity_min;
        if (cfg.fit_eta) {
            const FieldPair u0 = remove_neutral_modes(
                lc, random_smooth_perturbation(w.size(), w.period, 4, 1e-3, cfg.seed + static_cast<unsigned>(index)));
            EvolveOptions eo;
            eo.T = cfg.eta_T;
            eo.dt = cfg.eta_dt;
            eo.sample_every = std::max(1, static_cast<int>(std::lround(0.05 / cfg.eta_dt)));
            const LinearRun run = evolve_linear(lc, g, u0, eo);
            row.eta = run.trace.fitted_eta;
            row.violations = run.trace.violation_count;
        }
    } catch (const Error& e) {
        row.status = std::string(e.category()) + ": " + e.what();
    }
}

std::string flag(const std::optional<bool>& b) {
    if (!b) return "";
    return *b ? "1" : "0";
}

}  // namespace

ScanResult run_scan(const ScanConfig& cfg) {
    if (cfg.froude.empty() || cfg.periods.empty()) throw DomainError("scan grid is empty");
    std::vector<double> froude = cfg.froude;
    std::sort(froude.begin(), froude.end());
    froude.erase(std::unique(froude.begin(), froude.end()), froude.end());
    std::vector<double> periods = cfg.periods;
    std::sort(periods.begin(), periods.end());
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
    if (!(froude.front() > 2.0)) throw DomainError("scan Froude numbers must exceed 2");
    for (double p : periods)
        if (!(p > 0.0)) throw DomainError("scan periods must be positive");

    const std::size_t nf = froude.size();
    std::vector<std::vector<std::optional<WaveProfile>>> branches(periods.size());
    std::vector<std::vector<std::string>> notes(periods.size());
    parallel_for(static_cast<int>(periods.size()), cfg.jobs,
                 [&](int b) { branches[b] = build_branch(cfg, periods[b], froude, notes[b]); });

    ScanResult res;
    res.rows.resize(periods.size() * nf);
    res.profiles.resize(res.rows.size());
    for (std::size_t b = 0; b < periods.size(); ++b)
        for (std::size_t i = 0; i < nf; ++i) {
            ScanRow& row = res.rows[b * nf + i];
            row.froude = froude[i];
            row.period = periods[b];
            row.status = notes[b][i];
            if (branches[b][i]) res.profiles[b * nf + i] = *branches[b][i];
        }
    parallel_for(static_cast<int>(res.rows.size()), cfg.jobs, [&](int k) {
        if (res.profiles[k].size() == 0) return;
        analyze(cfg, res.profiles[k], res.rows[k], static_cast<std::size_t>(k));
    });

    for (std::size_t b = 0; b < periods.size(); ++b) {
        BranchSummary s;
        s.period = periods[b];
        const ScanRow* prev = nullptr;
        for (std::size_t i = 0; i < nf; ++i) {
            const ScanRow& row = res.rows[b * nf + i];
            if (res.profiles[b * nf + i].size() == 0) {
                ++s.failures;
                continue;
            }
            ++s.rows;
            if (!row.averaged_holds) s.averaged_positive = false;
            if (prev && !s.froude_star && prev->pointwise_holds != row.pointwise_holds) {
                const double m0 = prev->pointwise_margin, m1 = row.pointwise_margin;
                const double t = m0 != m1 ? m0 / (m0 - m1) : 0.5;
                s.froude_star = prev->froude + t * (row.froude - prev->froude);
            }
            prev = &row;
        }
        res.branches.push_back(s);
    }
    return res;
}

std::string scan_csv(const ScanResult& r) {
    using io::num;
    std::ostringstream os;
    os << "F,Xi,q,c,pointwise_margin,pointwise_holds,averaged_value,averaged_holds,d1,d2,d3,h,"
          "max_real_part,coercivity_min,eta,violations,status\n";
    for (const ScanRow& row : r.rows) {
        std::string status = row.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << num(row.froude) << ',' << num(row.period) << ',' << num(row.discharge) << ',' << num(row.speed) << ','
           << num(row.pointwise_margin) << ',' << (row.pointwise_holds ? 1 : 0) << ',' << num(row.averaged_value)
           << ',' << (row.averaged_holds ? 1 : 0) << ',' << flag(row.d1) << ',' << flag(row.d2) << ','
           << flag(row.d3) << ',' << flag(row.h) << ',' << num(row.max_real_part) << ','
           << num(row.coercivity_min) << ',' << num(row.eta) << ',' << row.violations << ",\"" << status
           << "\"\n";
    }
    return os.str();
}

}  // namespace rollwave
