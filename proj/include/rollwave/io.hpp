#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rollwave/bloch.hpp"
#include "rollwave/conditions.hpp"
#include "rollwave/evolution.hpp"
#include "rollwave/gauge.hpp"
#include "rollwave/profile.hpp"
#include "rollwave/shock.hpp"

namespace rollwave::io {

using json = nlohmann::ordered_json;

// Round-trip formatting used by every CSV writer.
std::string num(double v);

json to_json(const ModelParams& p);
ModelParams params_from_json(const json& j);

json to_json(const WaveProfile& w);
WaveProfile profile_from_json(const json& j);

json to_json(const SlopeReport& r);
json to_json(const GaugeTriple& g, const Vec& x);
json to_json(const StabilityReport& r);
json to_json(const ShockProfile& s);
json to_json(const DampingFit& f);
json to_json(const IntegralBoundFit& f);
json trace_summary(const EnergyTrace& t);

std::string profile_csv(const WaveProfile& w);
std::string gauge_csv(const GaugeTriple& g, const Vec& x);
std::string spectra_csv(const std::vector<Spectrum>& spectra);
std::string trace_csv(const EnergyTrace& t);
std::string trajectory_csv(const Trajectory& traj, const Vec& x);
std::string shock_csv(const ShockProfile& s);

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

}  // namespace rollwave::io
