#pragma once

#include <vector>

#include "rollwave/profile.hpp"

namespace rollwave::testing {

// Froude numbers of the profile corpus, all on one fixed-discharge branch of
// period 10 seeded at F = 2.05 with nu = 0.1.
const std::vector<double>& corpus_froude();

// Built once per process. n = 256 unless another size is requested.
const std::vector<WaveProfile>& corpus(int n = 256);

// Corpus member closest to F.
const WaveProfile& corpus_profile(double froude, int n = 256);

constexpr double kCorpusPeriod = 10.0;
constexpr double kCorpusNu = 0.1;
constexpr double kCorpusSeedFroude = 2.05;

}  // namespace rollwave::testing
