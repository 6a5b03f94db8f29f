#include "rollwave/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

#include "rollwave/error.hpp"

namespace rollwave::spectral {

namespace {

Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine;
    return engine;
}

void require_size(Eigen::Index n) {
    if (n < 2) throw DomainError("grid needs at least two points");
}

}  // namespace

Vec grid(int n, double period) {
    require_size(n);
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = period * j / n;
    return x;
}

int mode_number(int j, int n) { return j <= n / 2 ? j : j - n; }

CVec forward(const CVec& f) {
    require_size(f.size());
    CVec out(f.size());
    fft_engine().fwd(out, f);
    return out / static_cast<double>(f.size());
}

CVec forward(const Vec& f) { return forward(CVec(f.cast<cplx>())); }

CVec inverse(const CVec& coeffs) {
    require_size(coeffs.size());
    CVec out(coeffs.size());
    fft_engine().inv(out, coeffs);
    return out * static_cast<double>(coeffs.size());
}

Vec inverse_real(const CVec& coeffs) { return inverse(coeffs).real(); }

double mean(const Vec& f) { return f.mean(); }
cplx mean(const CVec& f) { return f.mean(); }

CVec derivative(const CVec& f, double period, int order, double xi) {
    const int n = static_cast<int>(f.size());
    CVec c = forward(f);
    const double kappa = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < n; ++j) {
        const int m = mode_number(j, n);
        if (xi == 0.0 && order % 2 == 1 && n % 2 == 0 && j == n / 2) {
            c[j] = 0.0;
            continue;
        }
        const cplx factor = std::pow(cplx(0.0, kappa * m + xi), order);
        c[j] *= factor;
    }
    return inverse(c);
}

Vec derivative(const Vec& f, double period, int order) {
    return derivative(CVec(f.cast<cplx>()), period, order, 0.0).real();
}

Vec antiderivative(const Vec& g, double period) {
    const int n = static_cast<int>(g.size());
    CVec c = forward(g);
    const double avg = c[0].real();
    const double kappa = 2.0 * std::numbers::pi / period;
    c[0] = 0.0;
    for (int j = 1; j < n; ++j) {
        const int m = mode_number(j, n);
        if (n % 2 == 0 && j == n / 2) {
            c[j] = 0.0;
            continue;
        }
        c[j] /= cplx(0.0, kappa * m);
    }
    Vec out = inverse_real(c);
    out.array() -= out[0];
    const Vec x = grid(n, period);
    out += avg * x;
    return out;
}

Eigen::MatrixXd differentiation_matrix(int n, double period) {
    Eigen::MatrixXd d(n, n);
    Vec e = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
        e.setZero();
        e[k] = 1.0;
        d.col(k) = derivative(e, period, 1);
    }
    return d;
}

CVec resample(const CVec& f, int n_new) {
    require_size(n_new);
    const int n = static_cast<int>(f.size());
    if (n_new == n) return f;
    const CVec c = forward(f);
    CVec d = CVec::Zero(n_new);
    const int keep = std::min(n, n_new);
    for (int j = 0; j < n; ++j) {
        const int m = mode_number(j, n);
        if (std::abs(m) * 2 > keep) continue;
        if (std::abs(m) * 2 == keep) {
            // shared Nyquist content: split on upsampling, fold on downsampling
            if (n < n_new) {
                d[m >= 0 ? m : n_new + m] += 0.5 * c[j];
                d[m >= 0 ? n_new - m : -m] += 0.5 * c[j];
            } else {
                d[n_new / 2] += c[j];
            }
            continue;
        }
        d[m >= 0 ? m : n_new + m] += c[j];
    }
    return inverse(d);
}

Vec resample(const Vec& f, int n_new) { return resample(CVec(f.cast<cplx>()), n_new).real(); }

Vec evaluate(const Vec& f, double period, const Vec& points) {
    const int n = static_cast<int>(f.size());
    const CVec c = forward(f);
    const double kappa = 2.0 * std::numbers::pi / period;
    Vec out(points.size());
    for (Eigen::Index p = 0; p < points.size(); ++p) {
        const double x = points[p];
        double s = c[0].real();
        const int top = (n - 1) / 2;
        // positive modes carry their conjugate partners (real data)
        for (int m = 1; m <= top; ++m) {
            const cplx e(std::cos(kappa * m * x), std::sin(kappa * m * x));
            s += 2.0 * (c[m] * e).real();
        }
        if (n % 2 == 0) s += c[n / 2].real() * std::cos(kappa * (n / 2) * x);
        out[p] = s;
    }
    return out;
}

Vec shift(const Vec& f, double period, double a) {
    const int n = static_cast<int>(f.size());
    CVec c = forward(f);
    const double kappa = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < n; ++j) {
        const int m = mode_number(j, n);
        if (n % 2 == 0 && j == n / 2) {
            c[j] *= std::cos(kappa * m * a);
            continue;
        }
        c[j] *= std::exp(cplx(0.0, -kappa * m * a));
    }
    return inverse_real(c);
}

double tail_ratio(const Vec& f, int cutoff) {
    const int n = static_cast<int>(f.size());
    const CVec c = forward(f);
    double top = 0.0, tail = 0.0;
    for (int j = 0; j < n; ++j) {
        const double a = std::abs(c[j]);
        top = std::max(top, a);
        if (std::abs(mode_number(j, n)) > cutoff) tail = std::max(tail, a);
    }
    return top > 0.0 ? tail / top : 0.0;
}

double integrate(const Vec& f, double period) { return f.mean() * period; }

}  // namespace rollwave::spectral
