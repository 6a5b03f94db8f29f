#include "rollwave/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rollwave::io {

namespace {

std::vector<double> to_vector(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec from_vector(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw DomainError(std::string("missing array '") + key + "'");
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const ModelParams& p) {
    return json{{"froude", p.froude},       {"nu", p.nu},          {"speed", p.speed},
                {"discharge", p.discharge}, {"system", to_string(p.system)},
                {"gas_gamma", p.gas_gamma}, {"gas_amp", p.gas_amp}};
}

ModelParams params_from_json(const json& j) {
    try {
        ModelParams p;
        p.froude = j.value("froude", p.froude);
        p.nu = j.value("nu", p.nu);
        p.speed = j.value("speed", p.speed);
        p.discharge = j.value("discharge", p.discharge);
        if (j.contains("system")) p.system = system_from_string(j.at("system").get<std::string>());
        p.gas_gamma = j.value("gas_gamma", p.gas_gamma);
        p.gas_amp = j.value("gas_amp", p.gas_amp);
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw DomainError(std::string("bad parameter JSON: ") + e.what());
    }
}

json to_json(const WaveProfile& w) {
    return json{{"params", to_json(w.params)},
                {"period", w.period},
                {"n", w.size()},
                {"tau_bar", to_vector(w.tau_bar)},
                {"u_bar", to_vector(w.u_bar)},
                {"speed", w.speed()},
                {"residual_norm", w.residual_norm},
                {"mode", to_string(w.mode)},
                {"newton_iterations", w.newton_iterations}};
}

WaveProfile profile_from_json(const json& j) {
    try {
        WaveProfile w;
        w.params = params_from_json(j.at("params"));
        w.period = j.at("period").get<double>();
        w.tau_bar = from_vector(j, "tau_bar");
        w.u_bar = from_vector(j, "u_bar");
        w.residual_norm = j.value("residual_norm", 0.0);
        w.newton_iterations = j.value("newton_iterations", 0);
        if (j.value("mode", std::string("FixedDischarge")) == "FixedSpeed") w.mode = ProfileMode::FixedSpeed;
        if (w.tau_bar.size() != w.u_bar.size() || w.tau_bar.size() < 4)
            throw DomainError("profile arrays are inconsistent");
        if (j.contains("n") && j.at("n").get<int>() != w.size()) throw DomainError("profile 'n' does not match data");
        if (!(w.period > 0.0)) throw DomainError("profile period must be positive");
        return w;
    } catch (const json::exception& e) {
        throw DomainError(std::string("bad profile JSON: ") + e.what());
    }
}

json to_json(const SlopeReport& r) {
    return json{{"pointwise_margin", r.pointwise_margin},
                {"pointwise_holds", r.pointwise_holds},
                {"averaged_value", r.averaged_value},
                {"averaged_holds", r.averaged_holds},
                {"worst_x", r.worst_x},
                {"alpha", to_vector(r.alpha)}};
}

json to_json(const GaugeTriple& g, const Vec& x) {
    return json{{"x", to_vector(x)},
                {"phi1", to_vector(g.phi1)},
                {"phi2", g.phi2},
                {"phi3", to_vector(g.phi3)},
                {"coercivity_coeff", to_vector(g.coercivity_coeff)},
                {"coercivity_min", g.coercivity_min},
                {"phi1_min", g.phi1_min},
                {"phi1_max", g.phi1_max},
                {"weight", to_string(g.weight)},
                {"mean_rate", g.mean_rate},
                {"periodicity_gap", g.periodicity_gap},
                {"phi2_auto", g.phi2_auto}};
}

json to_json(const StabilityReport& r) {
    return json{{"d1", r.d1},
                {"d2", r.d2},
                {"d3", r.d3},
                {"h", r.h},
                {"theta", r.theta},
                {"theta_fit", r.theta_fit},
                {"theta_global", r.theta_global},
                {"max_real_part", r.max_real_part},
                {"zero_multiplicity", r.zero_multiplicity},
                {"zero_count", r.zero_count},
                {"critical_slopes", r.critical_slopes},
                {"curvature", r.curvature},
                {"tracking_ambiguous", r.tracking_ambiguous},
                {"contour_warning", r.contour_warning},
                {"unresolved_xi", r.unresolved_xi},
                {"unresolved_curves", r.unresolved_curves},
                {"modes", r.modes},
                {"xi_grid", r.xi_grid}};
}

json to_json(const ShockProfile& s) {
    return json{{"params", to_json(s.params)},
                {"half_width", s.half_width},
                {"n", s.size()},
                {"x", to_vector(s.x)},
                {"tau_bar", to_vector(s.tau_bar)},
                {"u_bar", to_vector(s.u_bar)},
                {"speed", s.speed},
                {"tau_minus", s.tau_minus},
                {"tau_plus", s.tau_plus},
                {"u_minus", s.u_minus},
                {"q", s.q},
                {"decay_rate", s.decay_rate},
                {"decay_rate_minus", s.decay_rate_minus},
                {"decay_rate_plus", s.decay_rate_plus},
                {"linear_rate_minus", s.linear_rate_minus},
                {"linear_rate_plus", s.linear_rate_plus},
                {"rh_residual", s.rh_residual},
                {"endstate_gap", s.endstate_gap},
                {"unit_viscosity_form", s.unit_viscosity_form}};
}

json to_json(const DampingFit& f) {
    return json{{"eta", f.eta}, {"C", f.C}, {"violation_count", f.violation_count}, {"tightness", f.tightness}};
}

json to_json(const IntegralBoundFit& f) {
    return json{{"theta", f.theta},
                {"C", f.C},
                {"max_gap", f.max_gap},
                {"min_slack", f.min_slack},
                {"violation_count", f.violation_count}};
}

json trace_summary(const EnergyTrace& t) {
    return json{{"samples", t.size()},
                {"k", t.k},
                {"fitted_eta", t.fitted_eta},
                {"fitted_C", t.fitted_C},
                {"violation_count", t.violation_count}};
}

std::string profile_csv(const WaveProfile& w) {
    std::ostringstream os;
    os << "x,tau_bar,u_bar\n";
    const Vec x = w.grid();
    for (int j = 0; j < w.size(); ++j) os << num(x[j]) << ',' << num(w.tau_bar[j]) << ',' << num(w.u_bar[j]) << '\n';
    return os.str();
}

std::string gauge_csv(const GaugeTriple& g, const Vec& x) {
    std::ostringstream os;
    os << "x,phi1,phi3,coercivity_coeff\n";
    for (Eigen::Index j = 0; j < x.size(); ++j)
        os << num(x[j]) << ',' << num(g.phi1[j]) << ',' << num(g.phi3[j]) << ',' << num(g.coercivity_coeff[j]) << '\n';
    return os.str();
}

std::string spectra_csv(const std::vector<Spectrum>& spectra) {
    std::ostringstream os;
    os << "xi,re_lambda,im_lambda,residual\n";
    for (const Spectrum& s : spectra)
        for (std::size_t k = 0; k < s.values.size(); ++k)
            os << num(s.xi) << ',' << num(s.values[k].real()) << ',' << num(s.values[k].imag()) << ','
               << (k < s.residuals.size() ? num(s.residuals[k]) : std::string("nan")) << '\n';
    return os.str();
}

std::string trace_csv(const EnergyTrace& t) {
    std::ostringstream os;
    os << "t,E,L2,H1,H" << t.k << '\n';
    for (std::size_t i = 0; i < t.size(); ++i)
        os << num(t.times[i]) << ',' << num(t.E_values[i]) << ',' << num(t.L2_values[i]) << ','
           << num(t.H1_values[i]) << ',' << num(t.Hk_values[i]) << '\n';
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj, const Vec& x) {
    std::ostringstream os;
    os << "t,x,tau,u\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const FieldPair& s = traj.states[i];
        for (Eigen::Index j = 0; j < x.size(); ++j)
            os << num(traj.times[i]) << ',' << num(x[j]) << ',' << num(s.tau[j]) << ',' << num(s.u[j]) << '\n';
        os << '\n';  // blank line between frames for gnuplot
    }
    return os.str();
}

std::string shock_csv(const ShockProfile& s) {
    std::ostringstream os;
    os << "x,tau_bar,u_bar\n";
    for (int j = 0; j < s.size(); ++j) os << num(s.x[j]) << ',' << num(s.tau_bar[j]) << ',' << num(s.u_bar[j]) << '\n';
    return os.str();
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("invalid JSON in '" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace rollwave::io
