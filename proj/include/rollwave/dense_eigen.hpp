#pragma once

#include <Eigen/Dense>
#include <complex>

// Thin wrappers over LAPACK for the dense complex problems of the Bloch module.
namespace rollwave::dense {

struct EigenResult {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // right eigenvectors (empty unless requested)
};

EigenResult eig(const Eigen::MatrixXcd& a, bool want_vectors);

// Eigenvalues with first-order error estimates eps * ||A||_1 / s_k, where s_k is
// the reciprocal condition number of eigenvalue k after balancing.
struct ConditionedEigen {
    Eigen::VectorXcd values;
    Eigen::VectorXd errors;
};

ConditionedEigen eig_with_errors(const Eigen::MatrixXcd& a);

// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

}  // namespace rollwave::dense
