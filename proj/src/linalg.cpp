#include "jmgt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace jmgt {

namespace {

Eigen::MatrixXd pade13(const Eigen::MatrixXd& a) {
  static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                             1187353796428800.,  129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,       1323241920.,
                             40840800.,          960960.,            16380.,
                             182.,               1.};
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  Eigen::MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  Eigen::MatrixXd v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double theta13 = 5.371920351148152;
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int s = 0;
  Eigen::MatrixXd scaled = a;
  if (nrm > theta13) {
    s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    scaled /= std::ldexp(1.0, s);
  }
  Eigen::MatrixXd e = pade13(scaled);
  for (int i = 0; i < s; i++) e = e * e;
  return e;
}

std::vector<Eigen::MatrixXd> phi_functions(const Eigen::MatrixXd& a, int kmax) {
  const int n = static_cast<int>(a.rows());
  const int dim = n + kmax * n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
  w.topLeftCorner(n, n) = a;
  for (int k = 0; k < kmax; k++)
    w.block(k * n, (k + 1) * n, n, n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd e = expm(w);
  std::vector<Eigen::MatrixXd> phis;
  phis.reserve(kmax + 1);
  phis.push_back(e.topLeftCorner(n, n));  // phi_0 = exp(A)
  for (int k = 1; k <= kmax; k++) phis.push_back(e.block(0, k * n, n, n));
  return phis;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) return {};
  std::vector<std::complex<double>> out(a.rows());
  for (int i = 0; i < a.rows(); i++) out[i] = es.eigenvalues()(i);
  return out;
}

}  // namespace jmgt
