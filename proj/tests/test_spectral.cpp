#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rollwave/spectral.hpp"

using namespace rollwave::spectral;
using std::numbers::pi;

namespace {

Vec sample(int n, double period, double (*f)(double, double)) {
    const Vec x = grid(n, period);
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = f(x[j], period);
    return v;
}

double smooth(double x, double L) { return std::exp(std::sin(2 * pi * x / L)); }
double smooth_dx(double x, double L) {
    const double k = 2 * pi / L;
    return k * std::cos(k * x) * std::exp(std::sin(k * x));
}

}  // namespace

TEST_CASE("grid spacing and mode numbering") {
    const Vec x = grid(8, 2.0);
    CHECK(x[0] == 0.0);
    CHECK(x[7] == doctest::Approx(1.75));
    CHECK(mode_number(0, 8) == 0);
    CHECK(mode_number(4, 8) == 4);
    CHECK(mode_number(5, 8) == -3);
    CHECK(mode_number(7, 8) == -1);
}

TEST_CASE("forward/inverse round trip and coefficient convention") {
    const int n = 32;
    const Vec x = grid(n, 5.0);
    Vec f(n);
    for (int j = 0; j < n; ++j) f[j] = 2.0 + 3.0 * std::cos(2 * pi * 2 * x[j] / 5.0);
    const CVec c = forward(f);
    CHECK(std::abs(c[0] - cplx(2.0, 0.0)) < 1e-13);
    CHECK(std::abs(c[2] - cplx(1.5, 0.0)) < 1e-13);
    CHECK(std::abs(c[n - 2] - cplx(1.5, 0.0)) < 1e-13);
    CHECK((inverse_real(c) - f).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectral derivative of a smooth periodic function") {
    const double L = 3.0;
    const Vec f = sample(64, L, smooth);
    const Vec exact = sample(64, L, smooth_dx);
    CHECK((derivative(f, L) - exact).cwiseAbs().maxCoeff() < 1e-11);
    const Eigen::MatrixXd D = differentiation_matrix(64, L);
    CHECK((D * f - exact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Bloch derivative multiplies a mode by i(k + xi)") {
    const int n = 16;
    const double L = 2 * pi;
    const Vec x = grid(n, L);
    CVec f(n);
    for (int j = 0; j < n; ++j) f[j] = std::exp(cplx(0.0, 3.0 * x[j]));
    const CVec d = derivative(f, L, 1, 0.25);
    for (int j = 0; j < n; ++j) CHECK(std::abs(d[j] - cplx(0.0, 3.25) * f[j]) < 1e-12);
}

TEST_CASE("antiderivative keeps the mean as a linear part") {
    const double L = 4.0;
    const int n = 64;
    const Vec x = grid(n, L);
    Vec g(n);
    for (int j = 0; j < n; ++j) g[j] = 0.5 + std::cos(2 * pi * x[j] / L);
    const Vec F = antiderivative(g, L);
    for (int j = 0; j < n; ++j)
        CHECK(F[j] == doctest::Approx(0.5 * x[j] + L / (2 * pi) * std::sin(2 * pi * x[j] / L)).epsilon(1e-12));
}

TEST_CASE("shift, resample and off-grid evaluation agree with the analytic function") {
    const double L = 3.0;
    const Vec f = sample(48, L, smooth);
    const Vec s = shift(f, L, 0.37);
    const Vec x = grid(48, L);
    for (int j = 0; j < 48; ++j) CHECK(s[j] == doctest::Approx(smooth(x[j] - 0.37, L)).epsilon(1e-11));

    const Vec fine = resample(f, 96);
    const Vec xf = grid(96, L);
    for (int j = 0; j < 96; ++j) CHECK(fine[j] == doctest::Approx(smooth(xf[j], L)).epsilon(1e-11));

    Vec pts(3);
    pts << 0.1, 1.234, 2.9;
    const Vec v = evaluate(f, L, pts);
    for (int j = 0; j < 3; ++j) CHECK(v[j] == doctest::Approx(smooth(pts[j], L)).epsilon(1e-11));
}

TEST_CASE("integrate, mean and tail ratio") {
    const double L = 2.0;
    const Vec f = sample(64, L, smooth);
    // int_0^L exp(sin(2 pi x / L)) dx = L I0(1)
    CHECK(integrate(f, L) == doctest::Approx(L * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
    CHECK(mean(f) == doctest::Approx(std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
    Vec single = Vec::Zero(64);
    for (int j = 0; j < 64; ++j) single[j] = std::cos(2 * pi * j / 64.0);
    CHECK(tail_ratio(single, 1) < 1e-14);
    CHECK(tail_ratio(f, 2) > 1e-3);
}
