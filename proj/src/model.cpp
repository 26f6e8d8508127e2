#include "qtherm/model.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qtherm {

double OpenSystemModel::max_rate() const {
  double r = 0;
  for (const auto& c : channels) r = std::max(r, c.rate);
  return r;
}

void OpenSystemModel::validate() const {
  if (dim <= 0) throw ValidationError("model dimension must be positive");
  const Mat h0 = h.at(0.0);
  if (h0.rows() != dim || h0.cols() != dim)
    throw DimMismatchError("Hamiltonian does not match the model dimension");
  if (!is_hermitian(h0, 1e-10))
    throw ValidationError("Hamiltonian is not Hermitian");

  if (basis.states.size() != basis.energy.size())
    throw ValidationError("pointer basis has " + std::to_string(basis.states.size()) +
                          " states but " + std::to_string(basis.energy.size()) +
                          " energies");
  for (size_t i = 0; i < basis.states.size(); ++i) {
    if (basis.states[i].dim() != dim)
      throw DimMismatchError("pointer state dimension mismatch");
    for (size_t j = 0; j <= i; ++j) {
      const complex ov = basis.states[i].amp.dot(basis.states[j].amp);
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(ov - want) > 1e-10)
        throw ValidationError("pointer basis is not orthonormal");
    }
  }

  for (size_t k = 0; k < channels.size(); ++k) {
    const auto& c = channels[k];
    if (c.op.rows() != dim || c.op.cols() != dim)
      throw DimMismatchError("channel " + std::to_string(k) + " has wrong dimensions");
    if (!(c.rate >= 0) || !std::isfinite(c.rate))
      throw ChannelError("channel " + std::to_string(k) + " has invalid rate");
    if (c.single_transition()) {
      const size_t nb = basis.states.size();
      if (static_cast<size_t>(c.from) >= nb || static_cast<size_t>(c.to) >= nb)
        throw ChannelError("channel " + std::to_string(k) +
                           " transition labels exceed the pointer basis");
      const Mat want = basis.states[c.to].amp * basis.states[c.from].amp.adjoint();
      if ((c.op - want).cwiseAbs().maxCoeff() > 1e-12)
        throw ChannelError("channel " + std::to_string(k) +
                           " operator is not |to><from| for its labels");
      // a zero-temperature bath cannot hand energy to the system
      if (beta && std::isinf(*beta) && c.rate > 0 &&
          basis.energy[c.to] > basis.energy[c.from] + 1e-12)
        throw ChannelError("channel " + std::to_string(k) +
                           " absorbs energy from a zero-temperature bath");
    }
  }
}

Mat effective_hamiltonian(const OpenSystemModel& m, double t) {
  Mat heff = m.h.at(t);
  for (const auto& c : m.channels)
    heff -= complex(0, 0.5 * c.rate) * (c.op.adjoint() * c.op);
  return heff;
}

KrausSet build_qj_kraus(const OpenSystemModel& m, double t, double dt) {
  if (!(dt > 0)) throw TimestepError("dt must be positive");
  if (dt * m.max_rate() >= 0.1)
    throw TimestepError("dt * max rate = " + std::to_string(dt * m.max_rate()) +
                        " is outside the short-time regime (< 0.1)");
  KrausSet ks;
  ks.dt = dt;
  ks.no_jump = Mat::Identity(m.dim, m.dim) - complex(0, dt) * effective_hamiltonian(m, t);
  ks.jump.reserve(m.channels.size());
  for (const auto& c : m.channels) ks.jump.push_back(std::sqrt(c.rate * dt) * c.op);
  return ks;
}

DensityMatrix lindblad_step(const OpenSystemModel& m, const DensityMatrix& rho,
                            double t, double dt) {
  if (!(dt > 0)) throw TimestepError("dt must be positive");
  if (rho.dim() != m.dim) throw DimMismatchError("lindblad_step: dimension mismatch");
  const Mat h = m.h.at(t);
  Mat d = complex(0, -1) * (h * rho.rho - rho.rho * h);
  for (const auto& c : m.channels) {
    const Mat ldl = c.op.adjoint() * c.op;
    d += c.rate * (c.op * rho.rho * c.op.adjoint() -
                   0.5 * (ldl * rho.rho + rho.rho * ldl));
  }
  Mat out = rho.rho + dt * d;
  out = 0.5 * (out + out.adjoint());
  const double tr = out.trace().real();
  if (tr < kZeroNorm) throw InvalidDensityError("lindblad_step: trace collapsed");
  return DensityMatrix{out / tr};
}

DensityMatrix thermal_state(const Mat& h, double beta) {
  if (!is_hermitian(h, 1e-10))
    throw ValidationError("thermal_state: Hamiltonian is not Hermitian");
  if (!(beta > 0)) throw ValidationError("thermal_state: beta must be > 0");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const auto& ev = es.eigenvalues();
  const double emin = ev.minCoeff();
  Eigen::VectorXd w(ev.size());
  if (std::isinf(beta)) {
    for (int i = 0; i < ev.size(); ++i) w(i) = (ev(i) - emin <= 1e-12) ? 1.0 : 0.0;
  } else {
    for (int i = 0; i < ev.size(); ++i) w(i) = std::exp(-beta * (ev(i) - emin));
  }
  w /= w.sum();
  Mat rho = es.eigenvectors() * w.asDiagonal().toDenseMatrix().cast<complex>() *
            es.eigenvectors().adjoint();
  return make_density(rho);
}

double equilibrium_free_energy(const Mat& h, double beta) {
  if (!is_hermitian(h, 1e-10))
    throw ValidationError("free energy: Hamiltonian is not Hermitian");
  if (!(beta > 0) || std::isinf(beta))
    throw ValidationError("free energy: beta must be finite and > 0");
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double emin = ev.minCoeff();
  double z = 0;
  for (int i = 0; i < ev.size(); ++i) z += std::exp(-beta * (ev(i) - emin));
  return emin - std::log(z) / beta;
}

namespace qubit {

Mat id2() { return Mat::Identity(2, 2); }

Mat sx() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat sy() {
  Mat m(2, 2);
  m << 0, complex(0, -1), complex(0, 1), 0;
  return m;
}

Mat sz() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat sp() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1;  // |e><g|
  return m;
}

Mat sm() {
  Mat m = Mat::Zero(2, 2);
  m(1, 0) = 1;  // |g><e|
  return m;
}

PureState excited() {
  Vec v(2);
  v << 1, 0;
  return PureState{v};
}

PureState ground() {
  Vec v(2);
  v << 0, 1;
  return PureState{v};
}

PureState plus_theta(double theta) {
  Vec v(2);
  v << std::cos(0.5 * theta), std::sin(0.5 * theta);
  return PureState{v};
}

PureState minus_theta(double theta) {
  Vec v(2);
  v << -std::sin(0.5 * theta), std::cos(0.5 * theta);
  return PureState{v};
}

Mat h_qubit(double omega0) { return 0.5 * omega0 * sz(); }

OpenSystemModel closed_model(double omega0) {
  OpenSystemModel m;
  m.dim = 2;
  m.h.h0 = h_qubit(omega0);
  m.basis.states = {excited(), ground()};
  m.basis.energy = {0.5 * omega0, -0.5 * omega0};
  m.validate();
  return m;
}

OpenSystemModel spontaneous_emission_model(double omega0, double gamma) {
  OpenSystemModel m = closed_model(omega0);
  m.channels.push_back({sm(), gamma, /*from=*/0, /*to=*/1});
  m.beta = kInf;
  m.validate();
  return m;
}

OpenSystemModel dephasing_model(double omega0, double gamma_star) {
  OpenSystemModel m = closed_model(omega0);
  m.channels.push_back({sz(), gamma_star});
  m.validate();
  return m;
}

OpenSystemModel thermal_bath_model(double omega0, double gamma, double beta) {
  if (!(beta > 0) || !(omega0 > 0))
    throw ValidationError("thermal bath needs beta > 0 and omega0 > 0");
  OpenSystemModel m = closed_model(omega0);
  const double nbar = std::isinf(beta) ? 0.0 : 1.0 / std::expm1(beta * omega0);
  m.channels.push_back({sm(), gamma * (nbar + 1.0), /*from=*/0, /*to=*/1});
  m.channels.push_back({sp(), gamma * nbar, /*from=*/1, /*to=*/0});
  m.beta = beta;
  m.validate();
  return m;
}

OpenSystemModel rotated_thermal_bath_model(double omega0, double gamma,
                                           double beta, double chi) {
  if (!(beta > 0) || !(omega0 > 0))
    throw ValidationError("thermal bath needs beta > 0 and omega0 > 0");
  OpenSystemModel m;
  m.dim = 2;
  m.h.h0 = 0.5 * omega0 * (std::cos(chi) * sz() + std::sin(chi) * sx());
  const PureState e_chi = plus_theta(chi);   // eigenvector at +omega0/2
  const PureState g_chi = minus_theta(chi);  // eigenvector at -omega0/2
  m.basis.states = {e_chi, g_chi};
  m.basis.energy = {0.5 * omega0, -0.5 * omega0};
  const double nbar = std::isinf(beta) ? 0.0 : 1.0 / std::expm1(beta * omega0);
  const Mat down = g_chi.amp * e_chi.amp.adjoint();
  const Mat up = e_chi.amp * g_chi.amp.adjoint();
  m.channels.push_back({down, gamma * (nbar + 1.0), /*from=*/0, /*to=*/1});
  m.channels.push_back({up, gamma * nbar, /*from=*/1, /*to=*/0});
  m.beta = beta;
  m.validate();
  return m;
}

}  // namespace qubit

}  // namespace qtherm
