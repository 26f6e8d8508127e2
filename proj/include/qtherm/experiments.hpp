#pragma once
#include <map>
#include <string>

#include "qtherm/irreversibility.hpp"

namespace qtherm {

// ---- protocol phases ------------------------------------------------------
// An experiment is a sequence of phases executed on one trajectory:
// a preparation, zero or more evolution windows (each under one model), and
// optional projective readouts. Consecutive phases that reference different
// models imply a sudden Hamiltonian switch whose work is metered.

struct PhasePrepare {
  PureState state;
};
// classical mixture: branch b is prepared with probability prob[b]
struct PhaseMixturePrepare {
  std::vector<double> prob;
  std::vector<PureState> states;
};
// sample a pointer state of the model's basis with its Gibbs weight
struct PhaseThermalPrepare {
  int model = 0;
};
struct PhaseEvolve {
  int model = 0;
  Scheme scheme = Scheme::QJ;
  double duration = 0;
};
// projective measurement in the model's pointer basis
struct PhaseProject {
  int model = 0;
};
using Phase = std::variant<PhasePrepare, PhaseMixturePrepare, PhaseThermalPrepare,
                           PhaseEvolve, PhaseProject>;

// how the reverse experiment prepares "the trajectory's final class"
enum class FinalClassPolicy {
  None,               // entropy production not assembled
  ProjectiveOutcome,  // weight of the final projective outcome in the
                      // deterministically evolved ensemble
  JumpClass,          // jump / no-jump dichotomy of a single emission window
  BornWeight,         // <psi_final| rho_final |psi_final> in that ensemble
};

// rotating-frame feedback toward the circle state at latitude theta_target;
// each kick is the fidelity-maximizing sigma_y rotation, clipped so its
// work stays within work_cutoff
struct FeedbackSetup {
  double theta_target = 1.5707963267948966;
  double work_cutoff = kInf;
  double omega0 = 1.0;
};

struct ExperimentSpec {
  std::string name;
  std::vector<OpenSystemModel> models;
  std::vector<Phase> phases;
  double dt = 1e-3;
  // bath inverse temperature used by exponent-form estimators (the models
  // carry their own beta for record reversal)
  std::optional<double> beta;
  std::optional<double> delta_f;  // equilibrium free-energy difference
  std::optional<FeedbackSetup> feedback;
  std::vector<double> sample_times;  // state snapshots, on the step grid
  FinalClassPolicy final_class = FinalClassPolicy::None;

  double total_duration() const;
  void validate() const;
};

// ---- preset experiments ----------------------------------------------------

// prepare |+theta_prep> (or, with mixed_preparation, the classical mixture
// cos^2 |e> + sin^2 |g> of the same populations) and measure in the
// {plus,minus}_theta_meas basis
ExperimentSpec prepare_measure(double theta_prep, double theta_meas, double omega0,
                               bool mixed_preparation);
// |+x> decaying into a zero-temperature bath, jump unraveling
ExperimentSpec spontaneous_emission(double omega0, double gamma, double duration);
// |+x> under pure dephasing, diffusive unraveling
ExperimentSpec dephasing_diffusion(double omega0, double gamma_star, double duration);
// same bath with a feedback loop holding the state at latitude theta_target
ExperimentSpec dephasing_feedback(double omega0, double gamma_star, double duration,
                                  double work_cutoff, double theta_target);
// two-point scheme around a sudden quench (omega0/2) sz -> (omega1/2) sx with
// a unitary window of length tau in between
ExperimentSpec jarzynski_closed(double omega0, double omega1, double beta, double tau);
// two-point scheme for a staircase drive: the energy eigenbasis rotates by
// chi_max over `segments` windows of length `segment_duration`, the gap stays
// omega0, and a detailed-balance bath of width gamma follows the eigenbasis
ExperimentSpec jarzynski_open(double omega0, double gamma, double beta,
                              double chi_max, int segments, double segment_duration);

// ---- feedback law ----------------------------------------------------------

// lab-frame kick unitary for the rotating-frame controller
Mat feedback_kick(const FeedbackSetup& fb, double t, const PureState& post_meas);
// unclipped rotation angle that maximizes overlap with the target
double feedback_control_angle(const PureState& current, const PureState& target);
// rotating-frame target at time t, in the lab frame
PureState feedback_target(const FeedbackSetup& fb, double t);

// ---- preset registry (used by config/CLI) ----------------------------------

struct PresetInfo {
  std::string name;
  std::string summary;
  std::map<std::string, double> defaults;
  std::function<ExperimentSpec(const std::map<std::string, double>&)> build;
};
const std::vector<PresetInfo>& preset_registry();
// builds a preset by name; unknown names and unknown parameter keys throw
// ValidationError
ExperimentSpec build_preset(const std::string& name,
                            const std::map<std::string, double>& params);

}  // namespace qtherm
