#include "rollwave/distance.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "rollwave/error.hpp"
#include "rollwave/spectral.hpp"

namespace rollwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Real trigonometric series sum_m c_m e^{i m kappa x} of one field and its derivative.
struct Series {
    CVec c;     // modes 0..n/2
    CVec dc;
    int n = 0;
};

Series make_series(const Vec& f, double period) {
    const int n = static_cast<int>(f.size());
    const CVec full = spectral::forward(f);
    const double kappa = 2.0 * kPi / period;
    Series s;
    s.n = n;
    s.c = full.head(n / 2 + 1);
    s.dc.resize(n / 2 + 1);
    for (int m = 0; m <= n / 2; ++m) s.dc[m] = cplx(0.0, m * kappa) * s.c[m];
    if (n % 2 == 0) s.dc[n / 2] = 0.0;
    return s;
}

// Evaluates the series (value and derivative) of every field at the given points.
void evaluate_series(const std::vector<Series>& fields, double period, const Vec& points,
                     std::vector<Vec>& values, std::vector<Vec>& slopes, bool want_slopes) {
    const int n = fields.front().n;
    const int top = n / 2;
    const bool even = n % 2 == 0;
    const double kappa = 2.0 * kPi / period;
    const std::size_t nf = fields.size();
    values.assign(nf, Vec::Zero(points.size()));
    slopes.assign(nf, Vec::Zero(points.size()));
    for (Eigen::Index j = 0; j < points.size(); ++j) {
        const cplx z = std::polar(1.0, kappa * points[j]);
        cplx zm = 1.0;
        std::vector<cplx> acc(nf, 0.0), dacc(nf, 0.0);
        for (int m = 1; m < top + (even ? 0 : 1); ++m) {
            zm *= z;
            for (std::size_t f = 0; f < nf; ++f) {
                acc[f] += fields[f].c[m] * zm;
                if (want_slopes) dacc[f] += fields[f].dc[m] * zm;
            }
        }
        double nyq_cos = 0.0;
        if (even) nyq_cos = std::cos(top * kappa * points[j]);
        for (std::size_t f = 0; f < nf; ++f) {
            double v = fields[f].c[0].real() + 2.0 * acc[f].real();
            if (even) v += fields[f].c[top].real() * nyq_cos;
            values[f][j] = v;
            if (want_slopes) slopes[f][j] = 2.0 * dacc[f].real();
        }
    }
}

class Objective {
public:
    Objective(const FieldPair& u, const FieldPair& v, double period, const DistanceOptions& opts)
        : period_(period), opts_(opts), n_(static_cast<int>(u.tau.size())) {
        fields_ = {make_series(u.tau, period), make_series(u.u, period)};
        target_ = {v.tau, v.u};
        if (opts.norm == DistanceNorm::H1)
            target_slopes_ = {spectral::derivative(v.tau, period), spectral::derivative(v.u, period)};
        x_ = spectral::grid(n_, period);
        spline_ = periodic_spline(opts.knots, n_, period);
        // Fourier data for the constant-shift scan.
        cu_ = {spectral::forward(u.tau), spectral::forward(u.u)};
        cv_ = {spectral::forward(v.tau), spectral::forward(v.u)};
        double id = 0.0;
        for (const Vec& d : {Vec(u.tau - v.tau), Vec(u.u - v.u)}) {
            const Vec dd = opts.norm == DistanceNorm::H1 ? spectral::derivative(d, period) : Vec();
            id += norm_sq(d, opts.norm == DistanceNorm::H1 ? &dd : nullptr);
        }
        identity_ = std::sqrt(id);
    }

    // value at Psi = Id, computed on the grid without re-evaluating u
    double identity() const { return identity_; }

    double norm_sq(const Vec& f, const Vec* df) const {
        double s = f.squaredNorm();
        if (df) s += df->squaredNorm();
        return s * period_ / n_;
    }

    double operator()(const Vec& knots) const {
        if (knots.cwiseAbs().maxCoeff() == 0.0) return identity_;
        const Vec s = spline_.value * knots;
        const Vec ds = spline_.slope * knots;
        if ((1.0 + ds.array()).minCoeff() < opts_.min_slope) return std::numeric_limits<double>::infinity();
        const bool h1 = opts_.norm == DistanceNorm::H1;
        std::vector<Vec> vals, slopes;
        evaluate_series(fields_, period_, x_ + s, vals, slopes, h1);
        double diff = 0.0;
        for (int f = 0; f < 2; ++f) {
            const Vec d = vals[f] - target_[f];
            if (h1) {
                const Vec dd = (slopes[f].array() * (1.0 + ds.array())).matrix() - target_slopes_[f];
                diff += norm_sq(d, &dd);
            } else {
                diff += norm_sq(d, nullptr);
            }
        }
        double phase = 0.0;
        if (h1) {
            const Vec dds = spline_.curvature * knots;
            phase = norm_sq(ds, &dds);
        } else {
            phase = norm_sq(ds, nullptr);
        }
        return std::sqrt(diff) + std::sqrt(phase);
    }

    // ||u(. + a) - v||_X through Parseval.
    double shifted(double a) const {
        const double kappa = 2.0 * kPi / period_;
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) {
            const int m = spectral::mode_number(j, n_);
            const double w = opts_.norm == DistanceNorm::H1 ? 1.0 + (m * kappa) * (m * kappa) : 1.0;
            const cplx rot = std::polar(1.0, m * kappa * a);
            for (int f = 0; f < 2; ++f) acc += w * std::norm(cu_[f][j] * rot - cv_[f][j]);
        }
        return std::sqrt(acc * period_);
    }

    int knots() const { return opts_.knots; }
    const PeriodicSpline& spline() const { return spline_; }

private:
    double period_;
    double identity_ = 0.0;
    DistanceOptions opts_;
    int n_;
    std::vector<Series> fields_;
    std::vector<Vec> target_;
    std::vector<Vec> target_slopes_;
    Vec x_;
    PeriodicSpline spline_;
    std::vector<CVec> cu_, cv_;
};

struct MinimizeResult {
    Vec x;
    double value;
    bool converged;
};

Vec gradient(const Objective& J, const Vec& x, double fx, double h) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = J(xp), fm = J(xm);
        if (std::isfinite(fp) && std::isfinite(fm)) g[i] = (fp - fm) / (2.0 * h);
        else if (std::isfinite(fp)) g[i] = (fp - fx) / h;
        else if (std::isfinite(fm)) g[i] = (fx - fm) / h;
        else g[i] = 0.0;
    }
    return g;
}

MinimizeResult bfgs(const Objective& J, Vec x, int max_iterations, double h) {
    const Eigen::Index k = x.size();
    double fx = J(x);
    if (!std::isfinite(fx)) return {x, fx, false};
    Vec g = gradient(J, x, fx, h);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(k, k);
    for (int it = 0; it < max_iterations; ++it) {
        if (g.norm() < 1e-9 * (1.0 + std::abs(fx))) return {x, fx, true};
        Vec p = -H * g;
        double slope = g.dot(p);
        if (slope >= 0.0) {
            H.setIdentity();
            p = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0, fnew = fx;
        Vec xnew = x;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            xnew = x + step * p;
            fnew = J(xnew);
            if (std::isfinite(fnew) && fnew <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return {x, fx, true};
        const Vec gnew = gradient(J, xnew, fnew, h);
        const Vec sv = xnew - x, yv = gnew - g;
        const double sy = sv.dot(yv);
        const double drop = fx - fnew;
        x = xnew;
        g = gnew;
        fx = fnew;
        if (sy > 1e-14 * sv.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
            H = (I - rho * sv * yv.transpose()) * H * (I - rho * yv * sv.transpose()) + rho * sv * sv.transpose();
        }
        if (drop < 1e-13 * (1.0 + std::abs(fx))) return {x, fx, true};
    }
    return {x, fx, false};
}

double golden_section(const std::function<double(double)>& f, double a, double b, int iterations) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace

PeriodicSpline periodic_spline(int knots, int n, double period) {
    if (knots < 3) throw DomainError("periodic spline needs at least 3 knots");
    if (n < 1 || !(period > 0.0)) throw DomainError("periodic spline needs a grid");
    const double h = period / knots;
    // Cyclic system for the second derivatives at the knots.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(knots, knots);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(knots, knots);
    for (int i = 0; i < knots; ++i) {
        const int im = (i + knots - 1) % knots, ip = (i + 1) % knots;
        A(i, im) += h / 6.0;
        A(i, i) += 2.0 * h / 3.0;
        A(i, ip) += h / 6.0;
        R(i, im) += 1.0 / h;
        R(i, i) -= 2.0 / h;
        R(i, ip) += 1.0 / h;
    }
    const Eigen::MatrixXd Mk = A.partialPivLu().solve(R);  // knot second derivatives per unit knot value

    PeriodicSpline s;
    s.value = Eigen::MatrixXd::Zero(n, knots);
    s.slope = Eigen::MatrixXd::Zero(n, knots);
    s.curvature = Eigen::MatrixXd::Zero(n, knots);
    for (int j = 0; j < n; ++j) {
        const double x = j * period / n;
        int i = static_cast<int>(std::floor(x / h));
        i = std::min(std::max(i, 0), knots - 1);
        const int ip = (i + 1) % knots;
        const double a = (i + 1) * h - x, b = x - i * h;
        for (int k = 0; k < knots; ++k) {
            const double yi = i == k ? 1.0 : 0.0, yp = ip == k ? 1.0 : 0.0;
            const double mi = Mk(i, k), mp = Mk(ip, k);
            s.value(j, k) = mi * a * a * a / (6.0 * h) + mp * b * b * b / (6.0 * h) + (yi / h - mi * h / 6.0) * a +
                            (yp / h - mp * h / 6.0) * b;
            s.slope(j, k) = -mi * a * a / (2.0 * h) + mp * b * b / (2.0 * h) - (yi / h - mi * h / 6.0) +
                            (yp / h - mp * h / 6.0);
            s.curvature(j, k) = mi * a / h + mp * b / h;
        }
    }
    return s;
}

DistanceResult space_modulated_distance(const FieldPair& u, const FieldPair& v, double period,
                                        const DistanceOptions& opts) {
    const int n = static_cast<int>(u.tau.size());
    if (n < 4 || u.u.size() != n || v.tau.size() != n || v.u.size() != n)
        throw DomainError("distance: fields must share one grid");
    if (!(opts.min_slope > 0.0 && opts.min_slope < 1.0)) throw DomainError("distance: min_slope must lie in (0, 1)");
    const Objective J(u, v, period, opts);
    const int K = opts.knots;
    const double h = 1e-6 * period;

    DistanceResult res;
    const Vec zero = Vec::Zero(K);
    res.baseline = J(zero);

    // Constant shifts first: Psi = x + a costs nothing in the phase term.
    const int scan = 4 * n;
    double best_a = 0.0, best_shift_val = J.shifted(0.0);
    for (int i = 0; i < scan; ++i) {
        const double a = -0.5 * period + period * i / scan;
        const double val = J.shifted(a);
        if (val < best_shift_val) {
            best_shift_val = val;
            best_a = a;
        }
    }
    const double cell = period / scan;
    best_a = golden_section([&](double a) { return J.shifted(a); }, best_a - cell, best_a + cell, 60);
    res.best_shift = best_a;

    std::vector<Vec> starts{zero, Vec::Constant(K, best_a)};
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int r = 0; r < opts.random_starts; ++r) {
        Vec s(K);
        const double amp = 0.02 * period / K;
        for (int k = 0; k < K; ++k) s[k] = best_a + amp * normal(rng);
        starts.push_back(s);
    }

    MinimizeResult best{zero, res.baseline, true};
    for (const Vec& s0 : starts) {
        const MinimizeResult r = bfgs(J, s0, opts.max_iterations, h);
        ++res.starts_used;
        if (std::isfinite(r.value) && r.value < best.value) best = r;
    }
    res.delta = std::min(best.value, res.baseline);
    res.knot_values = best.x;
    res.converged = best.converged;
    res.phase = J.spline().value * best.x;
    return res;
}

}  // namespace rollwave
