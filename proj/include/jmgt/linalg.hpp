#ifndef JMGT_LINALG_HPP
#define JMGT_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace jmgt {

// Pade-13 scaling-and-squaring matrix exponential (Higham 2005 coefficients).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

// phi_k(A) for k = 0..kmax via one exponential of the block-augmented matrix
// [[A, I, 0, ...], [0, 0, I, ...], ...]: contour-free and cancellation-free
// down to A = 0 (phi_k(0) = 1/k!).
std::vector<Eigen::MatrixXd> phi_functions(const Eigen::MatrixXd& a, int kmax);

// Eigenvalues of a dense real matrix (real Schur via Eigen).
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

}  // namespace jmgt

#endif
