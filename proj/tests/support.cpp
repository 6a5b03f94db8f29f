#include "support.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace rollwave::testing {

const std::vector<double>& corpus_froude() {
    static const std::vector<double> f{2.05, 2.3, 2.6, 2.9, 3.2, 3.5, 3.8, 4.0, 4.2, 4.5};
    return f;
}

const std::vector<WaveProfile>& corpus(int n) {
    static std::map<int, std::vector<WaveProfile>> cache;
    static std::mutex lock;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    ModelParams p;
    p.nu = kCorpusNu;
    p.froude = kCorpusSeedFroude;
    std::vector<WaveProfile> out;
    out.push_back(seed_roll_wave(p, kCorpusPeriod, n));
    const auto& targets = corpus_froude();
    for (std::size_t i = 1; i < targets.size(); ++i) {
        const ContinuationRun run = continue_in_parameter(out.back(), targets[i]);
        if (run.failed) throw NumericalError("corpus continuation failed: " + run.failure_reason);
        out.push_back(run.profiles.back());
    }
    return cache.emplace(n, std::move(out)).first->second;
}

const WaveProfile& corpus_profile(double froude, int n) {
    const auto& all = corpus(n);
    std::size_t best = 0;
    for (std::size_t i = 1; i < all.size(); ++i)
        if (std::abs(all[i].params.froude - froude) < std::abs(all[best].params.froude - froude)) best = i;
    return all[best];
}

}  // namespace rollwave::testing
