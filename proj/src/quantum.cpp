#include "qtherm/quantum.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qtherm {
namespace {

void check_square_dim(const Mat& a, int dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim)
    throw DimMismatchError(std::string(what) + ": operator is " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                           " but the state has dimension " + std::to_string(dim));
}

}  // namespace

PureState normalize(const Vec& v) {
  const double n = v.norm();
  if (n < kZeroNorm)
    throw ZeroNormError("cannot normalize: ||v|| = " + std::to_string(n));
  return PureState{v / n};
}

complex expectation(const PureState& psi, const Mat& a) {
  check_square_dim(a, psi.dim(), "expectation");
  return psi.amp.dot(a * psi.amp);  // Eigen dot conjugates its left argument
}

double real_expectation(const PureState& psi, const Mat& a) {
  return expectation(psi, a).real();
}

std::pair<PureState, double> apply_kraus(const Mat& m, const PureState& psi) {
  check_square_dim(m, psi.dim(), "apply_kraus");
  Vec v = m * psi.amp;
  const double p = v.squaredNorm();
  if (p < kZeroNorm * kZeroNorm)
    throw ZeroNormError("apply_kraus: outcome has zero weight");
  return {PureState{v / std::sqrt(p)}, p};
}

DensityMatrix pure_density(const PureState& psi) {
  if (psi.dim() == 0) throw DimMismatchError("pure_density: empty state");
  return DensityMatrix{psi.amp * psi.amp.adjoint()};
}

DensityMatrix make_density(const Mat& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw InvalidDensityError("density matrix must be square and non-empty");
  if (!is_hermitian(rho, kHermTol))
    throw InvalidDensityError("density matrix is not Hermitian within 1e-12");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kNormTol)
    throw InvalidDensityError("density trace deviates from 1 by " +
                              std::to_string(tr - 1.0));
  Mat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < kEigFloor)
    throw InvalidDensityError("density eigenvalue " + std::to_string(lo) +
                              " below tolerance");
  return DensityMatrix{h / h.trace().real()};
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Mat h = 0.5 * (rho.rho + rho.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p < kEigFloor)
      throw InvalidDensityError("entropy of a non-density matrix (eigenvalue " +
                                std::to_string(p) + ")");
    if (p < kZeroNorm) continue;  // 0 log 0 = 0
    s -= p * std::log(p);
  }
  return s;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw DimMismatchError("trace_distance: dimensions differ");
  Mat d = a.rho - b.rho;
  d = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimMismatchError("fidelity: dimensions differ");
  return std::norm(a.amp.dot(b.amp));
}

bool is_hermitian(const Mat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Mat dagger(const Mat& a) { return a.adjoint(); }

}  // namespace qtherm
