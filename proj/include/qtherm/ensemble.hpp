#pragma once
#include <string>

#include "qtherm/experiments.hpp"

namespace qtherm {

// deterministic ensemble-level propagation of the protocol (master equation
// for evolution windows, dephasing for projective readouts); serves as the
// oracle the stochastic ensemble is compared against
struct DensityTrack {
  std::vector<double> times;        // sample times
  std::vector<DensityMatrix> rho;   // ensemble state at those times
  DensityMatrix initial;            // right after preparation
  DensityMatrix final_pre;          // before the final projective readout
  DensityMatrix final_state;        // end of protocol
  std::vector<double> final_outcome_prob;  // weights of the last readout
  bool comparable = true;  // false when feedback makes the track non-Lindblad
};
DensityTrack density_track(const ExperimentSpec& spec);

// everything retained per trajectory
struct ProtocolResult {
  uint64_t index = 0;
  std::string error;  // non-empty marks a divergent trajectory

  double log_p_initial = 0;  // log weight of the sampled preparation branch
  int initial_outcome = -1;  // branch / pointer index of the preparation
  int final_outcome = -1;    // pointer index of the final projective readout

  ThermoLedger ledger;
  PureState final_state;
  double final_fidelity = -1;  // vs the feedback target, when feedback is on

  std::vector<double> sampled_u;        // U at the configured sample times
  std::vector<PureState> sampled_state;

  // conditional record probabilities summed over evolution windows
  // (projective factors cancel between directions and are excluded)
  double log_pd_cond = 0;
  double log_pr_cond = 0;
  bool has_entropy = false;
  EntropyBreakdown entropy;
  // exponent-form irreversibility beta (dU - Q_cl - dF), when defined
  std::optional<double> ledger_exponent;

  // full per-window records, retained on request
  std::vector<TrajectoryRecord> records;
};

struct RunOptions {
  int threads = 0;            // 0: hardware concurrency
  bool keep_step_series = false;
  bool keep_records = false;
  // assemble entropy production (needs per-window records while running;
  // they are dropped afterwards unless keep_records is set)
  bool entropy = true;
};

struct EnsembleStats {
  std::string experiment;
  long long n = 0;
  uint64_t master_seed = 0;
  double dt = 0;
  std::vector<ProtocolResult> trajectories;  // index order, divergent included
  long long divergent = 0;
  std::vector<double> sample_times;
  std::vector<DensityMatrix> mean_density;  // over non-divergent trajectories
  DensityTrack track;
  // probability that a single-emission-window record stays jump-free
  // (filled for the JumpClass policy)
  std::optional<double> p_no_jump;
};

EnsembleStats run_ensemble(const ExperimentSpec& spec, long long n,
                           uint64_t master_seed, const RunOptions& opt = {});

// exhaustive walk of the discrete outcome tree; prob is the exact record
// probability, and probabilities over all leaves sum to 1
struct EnumeratedTrajectory {
  double prob = 0;
  ProtocolResult result;
};
// throws EnumerationError for diffusive schemes or when the tree exceeds
// max_nodes visited states
std::vector<EnumeratedTrajectory> enumerate_trajectories(
    const ExperimentSpec& spec, long long max_nodes = 1000000,
    const RunOptions& opt = {});

// ---- histograms -------------------------------------------------------------

struct Histogram {
  // binned mode: edges has size bins+1 and value is the bin center;
  // exact mode: edges is empty and value lists the distinct sample values
  std::vector<double> edges;
  std::vector<double> value;
  std::vector<double> mass;  // normalized to sum 1
  std::vector<long long> count;
};

// Freedman-Diaconis binning; falls back to exact grouping when the IQR
// vanishes; throws ValidationError on empty input
Histogram histogram_fd(std::vector<double> samples);
// group samples closer than tol into one atom
Histogram histogram_exact(std::vector<double> samples, double tol = 1e-9);
// fixed uniform binning on [lo, hi]
Histogram histogram_fixed(const std::vector<double>& samples, double lo, double hi,
                          int bins);

}  // namespace qtherm
