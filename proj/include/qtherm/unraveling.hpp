#pragma once
#include <cmath>
#include <functional>
#include <variant>
#include <vector>

#include "qtherm/model.hpp"
#include "qtherm/rng.hpp"

namespace qtherm {

struct NoJump {};
struct Jump {
  int channel = 0;
};
// one Wiener increment per channel, dw_k ~ N(0, dt)
struct Diffusive {
  std::vector<double> dw;
};
using MeasurementOutcome = std::variant<NoJump, Jump, Diffusive>;

enum class Scheme { QJ, QSD };

// Precomputed one-step operators for the jump unraveling. The no-jump branch
// applies the exact exponential exp(-i dt H_eff); it agrees with the
// first-order operator 1 - i dt H_eff to O(dt^2) and keeps long products of
// step norms free of secular error when H is static.
struct QjOps {
  Mat no_jump;             // exp(-i dt H_eff(t))
  std::vector<Mat> jump;   // sqrt(Gamma_k dt) L_k
  std::vector<Mat> ldagl;  // L_k^dag L_k
  double t = 0, dt = 0;
};
QjOps make_qj_ops(const OpenSystemModel& m, double t, double dt);

// one discrete outcome of a jump step
struct QjBranch {
  MeasurementOutcome outcome;
  double prob = 0;       // sampling probability; branch probs sum to 1 exactly
  double log_prob = 0;   // log ||M_a psi||^2 of the applied operator
  PureState state;       // normalized post-measurement state
};
// all outcomes of one step: index 0 is no-jump (p_0 = 1 - sum_k p_k), then
// one branch per channel with p_k = Gamma_k dt <L^dag L>;
// throws TimestepError when sum_k p_k >= 0.5
std::vector<QjBranch> qj_branches(const QjOps& ops, const PureState& psi);

struct StepResult {
  PureState state;  // post-measurement state, normalized
  MeasurementOutcome outcome;
  double log_prob = 0;      // log ||M psi||^2 of the applied operator
  double log_sampling = 0;  // log of the branch probability actually sampled
};

StepResult qj_step(const QjOps& ops, const PureState& psi, Rng& rng);
StepResult qj_step(const OpenSystemModel& m, const PureState& psi, double t,
                   double dt, Rng& rng);

// norm-preserving diffusive update driven by caller-supplied increments:
//   dpsi = -i dt H psi
//        + sum_k Gamma_k dt (l* L - L^dag L / 2 - |l|^2 / 2) psi
//        + sum_k sqrt(Gamma_k) dw_k (L - l) psi,    l = <L>
// followed by renormalization
PureState qsd_apply(const OpenSystemModel& m, const PureState& psi, double t,
                    double dt, const std::vector<double>& dw);
// same update with dw_k ~ N(0, dt) drawn from rng (in channel order)
StepResult qsd_step(const OpenSystemModel& m, const PureState& psi, double t,
                    double dt, Rng& rng);

struct TrajectoryRecord {
  Scheme scheme = Scheme::QJ;
  double t0 = 0, dt = 0;
  int steps = 0;
  std::vector<MeasurementOutcome> outcomes;  // one per step
  // post-step states including feedback, size steps+1 (initial state first),
  // kept only on request
  std::vector<PureState> states;
  PureState final_state;         // always set
  double log_sampling_prob = 0;  // QJ: sum of log branch probabilities
};

// feedback hook: called after each measurement step with the step's end time
// and post-measurement state; returns the unitary to apply
using FeedbackKick = std::function<Mat(double t_next, const PureState& post_meas)>;

// per-step view handed to observers; post_step includes the feedback kick
struct StepView {
  double t = 0, dt = 0;
  const PureState& pre;
  const PureState& post_meas;
  const PureState& post_step;
  const MeasurementOutcome& outcome;
};
using StepObserver = std::function<void(const StepView&)>;

struct TrajectoryOptions {
  bool keep_states = false;
  const FeedbackKick* feedback = nullptr;
  const StepObserver* observer = nullptr;
};

// duration must be an integer number of steps within 1e-9 relative
TrajectoryRecord run_trajectory(const OpenSystemModel& m, Scheme scheme,
                                const PureState& psi0, double t0, double duration,
                                double dt, Rng& rng,
                                const TrajectoryOptions& opt = {});

// number of steps implied by (duration, dt); throws ValidationError when the
// grid does not divide the duration
int step_count(double duration, double dt);

}  // namespace qtherm
