#include "rollwave/dense_eigen.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <limits>
#include <string>

#include "rollwave/error.hpp"

namespace rollwave::dense {

EigenResult eig(const Eigen::MatrixXcd& a, bool want_vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != n) throw DomainError("eig: matrix must be square");
    if (!a.allFinite()) throw NumericalError("eig: matrix has non-finite entries");
    Eigen::MatrixXcd work = a;
    EigenResult out;
    out.values.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    lapack_complex_double dummy;
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n,
        (work.data()), n,
        (out.values.data()), &dummy, 1,
        want_vectors ? (out.vectors.data()) : &dummy,
        want_vectors ? n : 1);
    if (info != 0)
        throw NumericalError("zgeev failed with info " + std::to_string(info) + " (matrix size " +
                             std::to_string(n) + ", norm " + std::to_string(a.norm()) + ")");
    return out;
}

ConditionedEigen eig_with_errors(const Eigen::MatrixXcd& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    if (a.cols() != n) throw DomainError("eig: matrix must be square");
    if (!a.allFinite()) throw NumericalError("eig: matrix has non-finite entries");
    Eigen::MatrixXcd work = a;
    Eigen::MatrixXcd vl(n, n), vr(n, n);
    Eigen::VectorXd scale(n), rconde(n), rcondv(n);
    ConditionedEigen out;
    out.values.resize(n);
    lapack_int ilo = 0, ihi = 0;
    double abnrm = 0.0;
    const lapack_int info = LAPACKE_zgeevx(LAPACK_COL_MAJOR, 'B', 'V', 'V', 'E', n, work.data(), n,
                                           out.values.data(), vl.data(), n, vr.data(), n, &ilo, &ihi,
                                           scale.data(), &abnrm, rconde.data(), rcondv.data());
    if (info != 0)
        throw NumericalError("zgeevx failed with info " + std::to_string(info) + " (matrix size " +
                             std::to_string(n) + ")");
    const double eps = std::numeric_limits<double>::epsilon();
    out.errors.resize(n);
    for (lapack_int k = 0; k < n; ++k)
        out.errors[k] = rconde[k] > 0.0 ? eps * abnrm / rconde[k] : std::numeric_limits<double>::infinity();
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    Eigen::MatrixXcd work = a;
    Eigen::VectorXd s(std::min(m, n));
    lapack_complex_double dummy;
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n,
                                           (work.data()), m,
                                           s.data(), &dummy, 1, &dummy, 1);
    if (info != 0) throw NumericalError("zgesdd failed with info " + std::to_string(info));
    return s;
}

}  // namespace rollwave::dense
