#pragma once
#include <complex>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "qtherm/errors.hpp"

namespace qtherm {

using complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// tolerances shared across the library
inline constexpr double kNormTol = 1e-10;   // allowed drift of ||psi|| from 1
inline constexpr double kHermTol = 1e-12;   // max|A - A^dag| for Hermitian checks
inline constexpr double kZeroNorm = 1e-14;  // below this a norm counts as zero
inline constexpr double kEigFloor = -1e-10; // most negative admissible density eigenvalue

// |psi>; invariant: ||amp|| == 1 within kNormTol
struct PureState {
  Vec amp;
  PureState() = default;
  explicit PureState(Vec a) : amp(std::move(a)) {}
  int dim() const { return static_cast<int>(amp.size()); }
};

// throws ZeroNormError when ||v|| < kZeroNorm
PureState normalize(const Vec& v);

// <psi|A|psi>
complex expectation(const PureState& psi, const Mat& a);
// real part of <psi|A|psi>; intended for Hermitian A
double real_expectation(const PureState& psi, const Mat& a);

// (M|psi> renormalized, ||M psi||^2); throws ZeroNormError on zero weight
std::pair<PureState, double> apply_kraus(const Mat& m, const PureState& psi);

// unit trace within kNormTol, Hermitian within kHermTol,
// eigenvalues >= kEigFloor
struct DensityMatrix {
  Mat rho;
  int dim() const { return static_cast<int>(rho.rows()); }
};

DensityMatrix pure_density(const PureState& psi);
// validates the invariants, then hermitizes and renormalizes the trace
DensityMatrix make_density(const Mat& rho);

// -tr(rho log rho) in nats; eigenvalues in [kEigFloor, 0) are clamped to 0,
// weights below kZeroNorm contribute nothing; more negative ones throw
double von_neumann_entropy(const DensityMatrix& rho);

// (1/2) tr|a - b|
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

bool is_hermitian(const Mat& a, double tol = kHermTol);
Mat dagger(const Mat& a);

}  // namespace qtherm
