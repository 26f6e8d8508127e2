#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "qtherm/quantum.hpp"

namespace qtherm {

// Units: hbar = 1, energies in units of the qubit splitting unless stated.
// Qubit basis convention used throughout: index 0 = |e>, index 1 = |g>,
// sigma_z = diag(+1, -1), sigma_- = |g><e|.

// system Hamiltonian schedule; static is the common case and lets the
// steppers cache their one-step propagators
struct Hamiltonian {
  Mat h0;                            // used when drive is absent
  std::function<Mat(double)> drive;  // full H(t) when present
  bool is_static() const { return !drive; }
  Mat at(double t) const { return drive ? drive(t) : h0; }
};

struct LindbladChannel {
  Mat op;           // L_k
  double rate = 0;  // Gamma_k >= 0
  // channels of the form L = |to><from| between pointer states carry their
  // label pair, so jump heat can be split into classical and quantum parts
  int from = -1, to = -1;
  bool single_transition() const { return from >= 0 && to >= 0; }
};

// measurement/bookkeeping basis with the energies used by the ledgers
struct PointerBasis {
  std::vector<PureState> states;  // orthonormal
  std::vector<double> energy;     // <i|H|i>
};

struct OpenSystemModel {
  int dim = 0;
  Hamiltonian h;
  std::vector<LindbladChannel> channels;
  PointerBasis basis;
  // bath inverse temperature; +inf means a zero-temperature bath (emission
  // only); unset for purely dephasing or closed models
  std::optional<double> beta;

  double max_rate() const;
  void validate() const;
};

// H_eff = H(t) - (i/2) sum_k Gamma_k L_k^dag L_k
Mat effective_hamiltonian(const OpenSystemModel& m, double t);

// first-order short-time measurement operators
//   M_0 = 1 - i dt H_eff,   M_k = sqrt(Gamma_k dt) L_k
// completeness sum_a M_a^dag M_a = 1 holds to O(dt^2);
// requires dt * max_rate < 0.1
struct KrausSet {
  Mat no_jump;
  std::vector<Mat> jump;
  double dt = 0;
};
KrausSet build_qj_kraus(const OpenSystemModel& m, double t, double dt);

// one Euler step of the master equation
//   rho' = rho + dt ( -i[H,rho] + sum_k Gamma_k (L rho L^dag - {L^dag L, rho}/2) )
// followed by hermitization and trace renormalization
DensityMatrix lindblad_step(const OpenSystemModel& m, const DensityMatrix& rho,
                            double t, double dt);

// Gibbs state exp(-beta h)/Z; beta = +inf gives the (possibly degenerate)
// ground-space projector normalized; beta must be > 0
DensityMatrix thermal_state(const Mat& h, double beta);
// F = -log(Z)/beta for finite beta > 0
double equilibrium_free_energy(const Mat& h, double beta);

namespace qubit {

Mat id2();
Mat sx();
Mat sy();
Mat sz();
Mat sp();  // |e><g|
Mat sm();  // |g><e|

PureState excited();
PureState ground();
// cos(theta/2)|e> + sin(theta/2)|g>
PureState plus_theta(double theta);
// -sin(theta/2)|e> + cos(theta/2)|g>, orthogonal partner of plus_theta
PureState minus_theta(double theta);

// (omega0/2) sigma_z
Mat h_qubit(double omega0);

OpenSystemModel closed_model(double omega0);
// zero-temperature bath: emission channel sigma_- at rate gamma
OpenSystemModel spontaneous_emission_model(double omega0, double gamma);
// pure dephasing: channel sigma_z at rate gamma_star
OpenSystemModel dephasing_model(double omega0, double gamma_star);
// thermal bath with detailed balance: emission at gamma(nbar+1), absorption
// at gamma*nbar, nbar = 1/(exp(beta omega0) - 1)
OpenSystemModel thermal_bath_model(double omega0, double gamma, double beta);
// same bath, but attached to H = (omega0/2)(cos(chi) sz + sin(chi) sx);
// pointer basis is the rotated energy eigenbasis, the gap stays omega0
OpenSystemModel rotated_thermal_bath_model(double omega0, double gamma,
                                           double beta, double chi);

}  // namespace qubit

}  // namespace qtherm
