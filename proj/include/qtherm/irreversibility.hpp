#pragma once
#include <optional>

#include "qtherm/thermo.hpp"

namespace qtherm {

// Conditional probability of a recorded outcome sequence,
//   P[record | psi0] = prod_n ||M_(a_n) psihat_n||^2,
// accumulated in log space along the normalized walk. For diffusive records
// the operator is M(dw) = 1 - i dt H_eff + sum_k sqrt(Gamma_k) dw_k L_k with
// the Gaussian weight of the increments omitted: that weight is common to a
// record and its reverse and cancels in every ratio this library forms.
// When psi_final is given, the overlap |<psi_final|psihat_N>|^2 is included.
double log_direct_probability(const OpenSystemModel& m, const TrajectoryRecord& rec,
                              const PureState& psi0,
                              const PureState* psi_final = nullptr);

// Time-reversed operator of one recorded step:
//   M^r = exp(beta q_cl / 2) M^dag
// with q_cl the classical heat label of the outcome (zero for no-jump and
// diffusive steps, so the prefactor is 1 even for a zero-temperature bath).
// A jump that released heat into a zero-temperature bath cannot be reversed:
// the operator is identically zero.
Mat reversed_step_operator(const OpenSystemModel& m, const MeasurementOutcome& out,
                           double t, double dt);

// P[reversed record | psi_final], walking the record backwards from
// psi_final and ending on the overlap with psi0; returns -inf when the
// reversed record has zero probability
double log_reversed_probability(const OpenSystemModel& m, const TrajectoryRecord& rec,
                                const PureState& psi0, const PureState& psi_final);

// entropy production of one trajectory, split into
//   boundary    = log p(psi0) - log p_r(class of psi_final)
//   conditional = log P[record|psi0] - log P[reversed record|psi_final]
// conditional is +inf when the reversed record is impossible
struct EntropyBreakdown {
  double boundary = 0;
  double conditional = 0;
  double total() const { return boundary + conditional; }
  bool infinite() const { return std::isinf(boundary) || std::isinf(conditional); }
};

EntropyBreakdown entropy_production(double log_p_initial, double p_final_class,
                                    double log_pd_cond, double log_pr_cond);

struct EstimatorResult {
  double value = 0;
  double std_error = 0;  // 0 in exact (enumeration) mode
  long long n = 0;
};

// <exp(-x)> over samples; +inf samples contribute exp(-inf) = 0.
// weights empty: equal-weight Monte Carlo with the standard error of the
// mean; weights given: exact weighted sum (they must add up to 1 within
// 1e-9) with zero standard error.
EstimatorResult exp_average(const std::vector<double>& x,
                            const std::vector<double>& weights = {});

// plain (weighted) mean; +inf samples make the mean +inf
EstimatorResult mean_value(const std::vector<double>& x,
                           const std::vector<double>& weights = {});

}  // namespace qtherm
