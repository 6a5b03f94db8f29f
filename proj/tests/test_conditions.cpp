#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rollwave/conditions.hpp"
#include "rollwave/spectral.hpp"
#include "support.hpp"

using namespace rollwave;

namespace {

WaveProfile constant_profile(double F, double tau0) {
    WaveProfile w;
    w.params.froude = F;
    w.params.nu = 0.1;
    w.params.speed = 0.5;
    w.params.discharge = equilibrium_velocity(tau0) + 0.5 * tau0;
    w.period = 10.0;
    w.tau_bar = Vec::Constant(32, tau0);
    w.u_bar = Vec::Constant(32, equilibrium_velocity(tau0));
    return w;
}

}  // namespace

TEST_CASE("constant states") {
    const double F = 3.0;
    const WaveProfile w = constant_profile(F, 1.0);
    const Vec a = alpha_profile(w);
    CHECK((a.array() - 1.0 / (F * F)).abs().maxCoeff() < 1e-15);
    const SlopeReport r = slope_report(w);
    CHECK(r.pointwise_margin == doctest::Approx(1.0 / (F * F)));
    CHECK(r.pointwise_holds);
    CHECK(r.averaged_value == doctest::Approx(1.0 / (F * F) / 0.1));
    CHECK(r.averaged_holds);

    const WaveProfile w2 = constant_profile(F, 1.4);
    CHECK((alpha_profile(w2).array() - std::pow(1.4, -3) / (F * F)).abs().maxCoeff() < 1e-15);
    const WeightedMean m = weighted_mean_identity(w2, [](double) { return 1.0; });
    CHECK(m.lhs == doctest::Approx(std::pow(1.4, -3) / (F * F)));
    CHECK(m.rhs == doctest::Approx(m.lhs));
}

TEST_CASE("alpha matches tau^-3 (F^-2 - 2 nu u_x) on the corpus") {
    for (const WaveProfile& w : testing::corpus()) {
        const Vec a = alpha_profile(w);
        const Vec ux = spectral::derivative(w.u_bar, w.period);
        const double F = w.params.froude, nu = w.params.nu;
        for (int j = 0; j < w.size(); ++j)
            CHECK(a[j] == doctest::Approx(std::pow(w.tau_bar[j], -3) * (1.0 / (F * F) - 2 * nu * ux[j])).epsilon(1e-12));
        // <tau^3 alpha> = F^-2 since <u_x> = 0
        Vec t3a(w.size());
        for (int j = 0; j < w.size(); ++j) t3a[j] = std::pow(w.tau_bar[j], 3) * a[j];
        CHECK(std::abs(spectral::mean(t3a) - 1.0 / (F * F)) <= 1e-8);
    }
}

TEST_CASE("weighted mean identity on the corpus") {
    for (const WaveProfile& w : testing::corpus()) {
        CAPTURE(w.params.froude);
        for (auto g : {+[](double) { return 1.0; }, +[](double t) { return t * t; }, +[](double t) { return t * t * t; }}) {
            const WeightedMean m = weighted_mean_identity(w, g);
            CHECK(m.gap <= 1e-8);
            CHECK(std::abs(m.lhs - m.rhs) <= 1e-8);
            CHECK(m.lhs > 0.0);
        }
        const WeightedMean cube = weighted_mean_identity(w, [](double t) { return t * t * t; });
        CHECK(std::abs(cube.lhs - 1.0 / (w.params.froude * w.params.froude)) <= 1e-8);
    }
}

TEST_CASE("non-positive weight is rejected") {
    const WaveProfile& w = testing::corpus_profile(3.0);
    CHECK_THROWS_AS(weighted_mean_identity(w, [](double t) { return t - 1.0; }), DomainError);
}

TEST_CASE("pointwise condition flips along the branch while the averaged one holds") {
    CHECK(slope_report(testing::corpus_profile(2.05)).pointwise_holds);
    const SlopeReport f4 = slope_report(testing::corpus_profile(4.0));
    CHECK_FALSE(f4.pointwise_holds);
    CHECK(f4.pointwise_margin < 0.0);
    Vec t3a = alpha_profile(testing::corpus_profile(4.0));
    CHECK((t3a.array() * testing::corpus_profile(4.0).tau_bar.array().cube()).minCoeff() < 0.0);

    int flips = 0;
    double flip_at = 0.0;
    bool prev = true;
    for (const WaveProfile& w : testing::corpus()) {
        const SlopeReport r = slope_report(w);
        CHECK(r.averaged_holds);
        CHECK(r.averaged_value > 0.0);
        CHECK(r.pointwise_holds == (r.pointwise_margin > 0.0));
        if (r.pointwise_holds != prev) {
            ++flips;
            flip_at = w.params.froude;
        }
        prev = r.pointwise_holds;
    }
    CHECK(flips == 1);
    CHECK(flip_at >= 3.0);
    CHECK(flip_at <= 4.0);
}

TEST_CASE("slope report is invariant under grid translation") {
    const WaveProfile& w = testing::corpus_profile(3.8);
    WaveProfile s = w;
    for (int j = 0; j < w.size(); ++j) {
        s.tau_bar[(j + 17) % w.size()] = w.tau_bar[j];
        s.u_bar[(j + 17) % w.size()] = w.u_bar[j];
    }
    const SlopeReport a = slope_report(w), b = slope_report(s);
    CHECK(b.pointwise_margin == doctest::Approx(a.pointwise_margin).epsilon(1e-10));
    CHECK(b.averaged_value == doctest::Approx(a.averaged_value).epsilon(1e-12));
    CHECK(std::fmod(b.worst_x - a.worst_x + 2 * w.period, w.period) ==
          doctest::Approx(17 * w.period / w.size()).epsilon(1e-12));
}
