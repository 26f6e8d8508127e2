#pragma once
#include "qtherm/unraveling.hpp"

namespace qtherm {

// <psi|h|psi>
double internal_energy(const PureState& psi, const Mat& h);

// Heat carried by a jump through a single-transition channel |to><from|:
// the bath absorbs/provides the pointer gap, the remainder is assigned to
// the measurement backaction.
//   q_cl = e_to - e_from
//   q_q  = e_from - u_pre
struct HeatSplit {
  double q_cl = 0, q_q = 0;
};
HeatSplit split_heat_qj(const OpenSystemModel& m, int channel, double u_pre);

// Heat read off the measurement operators instead of energy differences
// (delta = h - <h>):
//   jump k:   <L^dag delta L> / <L^dag L>                      (exact)
//   no jump:  -sum_k (Gamma_k dt / 2) <{L^dag L, delta}>       (O(dt^2))
double heat_operator_qj(const OpenSystemModel& m, const PureState& pre,
                        const MeasurementOutcome& out, double t, double dt);

// Diffusive-step heat from the applied increment operator B (dpsi = B psi):
//   dq = <B^dag delta + delta B> + <G^dag delta G>,
// with G the innovation part; reproduces the renormalized energy change to
// O(dt^{3/2}) pathwise.
double heat_operator_qsd(const OpenSystemModel& m, const PureState& pre,
                         const std::vector<double>& dw, double t, double dt);
// Ito-averaged variant (dw_k dw_l -> dt delta_kl): same mean, but the
// quadratic innovation term is replaced by its expectation
double heat_operator_qsd_mean(const OpenSystemModel& m, const PureState& pre,
                              const std::vector<double>& dw, double t, double dt);

struct LedgerStep {
  double t = 0;  // step start
  double dU = 0, dW = 0, dW_fb = 0, dQ_cl = 0, dQ_q = 0;
};

struct ThermoLedger {
  double u_initial = 0, u_final = 0;
  double work = 0;     // drive work (Hamiltonian changes, incl. quenches)
  double work_fb = 0;  // feedback kick work
  double q_cl = 0;     // classical (bath) heat
  double q_q = 0;      // quantum (measurement) heat
  int jump_count = 0;
  double first_jump_time = std::numeric_limits<double>::quiet_NaN();
  std::vector<LedgerStep> steps;  // kept only on request

  double delta_u() const { return u_final - u_initial; }
  // dU - (W + W_fb + Q_cl + Q_q); zero to rounding by construction
  double first_law_residual() const {
    return delta_u() - (work + work_fb + q_cl + q_q);
  }
};

// Incremental energy bookkeeping fed by the trajectory runner. Per step:
//   dW   = <pre|H(t+dt) - H(t)|pre>
//   dQ   = <post_meas|H(t+dt)|post_meas> - <pre|H(t+dt)|pre>
//   dW_fb = <post_step|H(t+dt)|post_step> - <post_meas|H(t+dt)|post_meas>
// so dU = dW + dQ + dW_fb holds exactly. Jump heat through a labelled
// channel is split classical/quantum; everything else is quantum heat.
class LedgerBuilder {
 public:
  explicit LedgerBuilder(const OpenSystemModel* m, bool keep_steps = false);

  void start(const PureState& psi0, double t);
  void on_step(const StepView& v);
  // sudden Hamiltonian switch: meters <psi|h_new - h_old|psi> as work;
  // call switch_model right after
  void quench(const OpenSystemModel* next, const PureState& psi, double t);
  // projective readout onto a pointer state with energy e_out
  void project(double e_out, double t);
  ThermoLedger take();

  double u() const { return u_; }
  bool started() const { return started_; }

 private:
  const OpenSystemModel* m_;
  bool keep_;
  bool started_ = false;
  double u_ = 0;
  ThermoLedger led_;
};

}  // namespace qtherm
