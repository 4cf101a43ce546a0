#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace maslovkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Standard symplectic matrix J = [[0, -I_n], [I_n, 0]] on R^{2n}.
Mat standard_j(int n);

/// Symplectic direct sum M1 ⋄ M2: coordinates (x_1..x_i, y_1..y_j | ...) are
/// interleaved so that each factor keeps its (q, p) pairing.
Mat diamond(const Mat& a, const Mat& b);

/// R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]] = exp(θ J) in Sp(2).
Mat rotation(double theta);

/// N_1(λ, b) = [[λ, b], [0, λ]].
Mat jordan_block(double lambda, double b);

/// Block (x_k, x_{k+n}) extraction / insertion helpers for block-diagonal
/// symplectic matrices.
Mat plane_block(const Mat& m, int k);

/// ‖MᵀJM − J‖_∞ (max-abs entry).
double symplectic_defect(const Mat& m);

/// exp(s J) on R^{2n}.
Mat rotation_all(int n, double s);

double max_abs(const Mat& m);

/// Number of singular values of (m - ω I) below tol (real dimension for real
/// ω, complex dimension otherwise).
int kernel_dimension(const CMat& m, double tol);

/// Eigenvalues sorted by (arg, modulus) for deterministic output.
std::vector<Complex> sorted_eigenvalues(const Mat& m);

}  // namespace maslovkit
