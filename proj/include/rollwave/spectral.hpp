#pragma once

#include <Eigen/Dense>
#include <complex>

// Fourier tools on a uniform periodic grid x_j = j*period/n, j = 0..n-1.
// Coefficients use the convention f_j = sum_m c_m exp(2 pi i j m / n),
// stored in FFT order (m = 0, 1, ..., n/2, -(n/2-1), ..., -1).
namespace rollwave::spectral {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

Vec grid(int n, double period);

// Signed mode number stored at FFT index j.
int mode_number(int j, int n);

CVec forward(const Vec& f);
CVec forward(const CVec& f);
CVec inverse(const CVec& coeffs);
Vec inverse_real(const CVec& coeffs);

double mean(const Vec& f);
cplx mean(const CVec& f);

// (d/dx)^order f. The Nyquist mode is dropped for odd orders.
Vec derivative(const Vec& f, double period, int order = 1);
// (d/dx + i xi)^order f for complex grid data.
CVec derivative(const CVec& f, double period, int order, double xi);

// F(x) = int_0^x g. A nonzero mean of g contributes the linear part mean*x.
Vec antiderivative(const Vec& g, double period);

Eigen::MatrixXd differentiation_matrix(int n, double period);

// Trigonometric interpolation onto a grid with n_new points.
Vec resample(const Vec& f, int n_new);
CVec resample(const CVec& f, int n_new);

// Evaluates the trigonometric interpolant of grid data at arbitrary points.
Vec evaluate(const Vec& f, double period, const Vec& points);

// f(x - a) on the same grid.
Vec shift(const Vec& f, double period, double a);

// max |c_m| over |m| > cutoff relative to max |c_m|.
double tail_ratio(const Vec& f, int cutoff);

// Integral over one period (rectangle rule, spectrally accurate).
double integrate(const Vec& f, double period);

}  // namespace rollwave::spectral
