#ifndef ISING_PFAFFIAN_HPP
#define ISING_PFAFFIAN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ising {

// Pfaffian of a dense skew-symmetric matrix by Parlett-Reid tridiagonalization
// with partial pivoting.  Destroys its argument.
template <typename Scalar>
Scalar pfaffian_inplace(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  using std::abs;
  const Eigen::Index n = A.rows();
  if (n != A.cols()) throw std::invalid_argument("pfaffian: matrix not square");
  if (n % 2 != 0) return Scalar(0);
  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index piv = k + 1;
    double best = abs(A(k + 1, k));
    for (Eigen::Index j = k + 2; j < n; ++j)
      if (abs(A(j, k)) > best) best = abs(A(j, k)), piv = j;
    if (best == 0.0) return Scalar(0);
    if (piv != k + 1) {
      A.row(piv).swap(A.row(k + 1));
      A.col(piv).swap(A.col(k + 1));
      pf = -pf;
    }
    pf *= A(k, k + 1);
    Eigen::Index m = n - k - 2;
    if (m > 0) {
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
          A.block(k + 2, k, m, 1) / A(k + 1, k);
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = A.block(k + 2, k + 1, m, 1);
      A.block(k + 2, k + 2, m, m).noalias() += tau * w.transpose();
      A.block(k + 2, k + 2, m, m).noalias() -= w * tau.transpose();
    }
  }
  return pf;
}

template <typename Scalar>
Scalar pfaffian(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A,
                double antisym_tol = 1e-12) {
  double scale = A.cwiseAbs().maxCoeff();
  if ((A + A.transpose()).cwiseAbs().maxCoeff() > antisym_tol * std::max(1.0, scale))
    throw std::invalid_argument("pfaffian: matrix not antisymmetric");
  return pfaffian_inplace(A);
}

// Sign and log-magnitude version for large real matrices (dimer engine).
struct LogPfaffian {
  int sign = 0;        // -1, 0, +1
  double log_abs = 0;  // log |Pf|, meaningful only when sign != 0
};
inline LogPfaffian pfaffian_log(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  LogPfaffian out;
  if (n % 2 != 0) return out;
  int sign = 1;
  double lg = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index piv = k + 1;
    double best = std::abs(A(k + 1, k));
    for (Eigen::Index j = k + 2; j < n; ++j)
      if (std::abs(A(j, k)) > best) best = std::abs(A(j, k)), piv = j;
    if (best == 0.0) return out;
    if (piv != k + 1) {
      A.row(piv).swap(A.row(k + 1));
      A.col(piv).swap(A.col(k + 1));
      sign = -sign;
    }
    double p = A(k, k + 1);
    lg += std::log(std::abs(p));
    if (p < 0) sign = -sign;
    Eigen::Index m = n - k - 2;
    if (m > 0) {
      Eigen::VectorXd tau = A.block(k + 2, k, m, 1) / A(k + 1, k);
      Eigen::VectorXd w = A.block(k + 2, k + 1, m, 1);
      A.block(k + 2, k + 2, m, m).noalias() += tau * w.transpose();
      A.block(k + 2, k + 2, m, m).noalias() -= w * tau.transpose();
    }
  }
  out.sign = sign;
  out.log_abs = lg;
  return out;
}

}  // namespace ising

#endif
