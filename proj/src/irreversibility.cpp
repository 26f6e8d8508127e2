#include "qtherm/irreversibility.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace qtherm {
namespace {

// forward step operator for a recorded outcome
Mat direct_step_operator(const OpenSystemModel& m, const MeasurementOutcome& out,
                         double t, double dt) {
  if (std::holds_alternative<NoJump>(out)) {
    const Mat a = complex(0, -dt) * effective_hamiltonian(m, t);
    return a.exp();
  }
  if (const Jump* j = std::get_if<Jump>(&out)) {
    const auto& c = m.channels.at(j->channel);
    return std::sqrt(c.rate * dt) * c.op;
  }
  const auto& d = std::get<Diffusive>(out);
  if (d.dw.size() != m.channels.size())
    throw DimMismatchError("diffusive record has wrong increment count");
  Mat op = Mat::Identity(m.dim, m.dim) - complex(0, dt) * effective_hamiltonian(m, t);
  for (size_t k = 0; k < m.channels.size(); ++k)
    op += std::sqrt(m.channels[k].rate) * d.dw[k] * m.channels[k].op;
  return op;
}

double classical_heat_of(const OpenSystemModel& m, const MeasurementOutcome& out) {
  const Jump* j = std::get_if<Jump>(&out);
  if (!j) return 0.0;
  const auto& c = m.channels.at(j->channel);
  if (!c.single_transition()) return 0.0;
  return m.basis.energy[c.to] - m.basis.energy[c.from];
}

}  // namespace

double log_direct_probability(const OpenSystemModel& m, const TrajectoryRecord& rec,
                              const PureState& psi0, const PureState* psi_final) {
  if (psi0.dim() != m.dim)
    throw DimMismatchError("log_direct_probability: state dimension mismatch");
  PureState psi = psi0;
  double lp = 0;
  // cache per outcome kind when the generator is static
  const bool cached = m.h.is_static();
  Mat nj;
  bool have_nj = false;
  for (int n = 0; n < rec.steps; ++n) {
    const double t = rec.t0 + n * rec.dt;
    const auto& out = rec.outcomes.at(n);
    Mat op;
    if (cached && std::holds_alternative<NoJump>(out)) {
      if (!have_nj) {
        nj = direct_step_operator(m, out, t, rec.dt);
        have_nj = true;
      }
      op = nj;
    } else {
      op = direct_step_operator(m, out, t, rec.dt);
    }
    const Vec v = op * psi.amp;
    const double p = v.squaredNorm();
    if (p < kZeroNorm * kZeroNorm) return -kInf;
    lp += std::log(p);
    psi = PureState{v / std::sqrt(p)};
  }
  if (psi_final) {
    const double ov = std::norm(psi_final->amp.dot(psi.amp));
    if (ov <= 0) return -kInf;
    lp += std::log(ov);
  }
  return lp;
}

Mat reversed_step_operator(const OpenSystemModel& m, const MeasurementOutcome& out,
                           double t, double dt) {
  const Mat mdag = direct_step_operator(m, out, t, dt).adjoint();
  const double q_cl = classical_heat_of(m, out);
  if (q_cl == 0.0) return mdag;
  if (!m.beta)
    throw ProtocolError(
        "reversing a record with bath heat needs the bath inverse temperature");
  const double beta = *m.beta;
  if (std::isinf(beta)) {
    if (q_cl > 0)
      throw ChannelError("a zero-temperature bath cannot have provided energy");
    return Mat::Zero(m.dim, m.dim);  // exp(-inf) M^dag
  }
  return std::exp(0.5 * beta * q_cl) * mdag;
}

double log_reversed_probability(const OpenSystemModel& m, const TrajectoryRecord& rec,
                                const PureState& psi0, const PureState& psi_final) {
  if (psi_final.dim() != m.dim)
    throw DimMismatchError("log_reversed_probability: state dimension mismatch");
  PureState phi = psi_final;
  double lp = 0;
  for (int n = rec.steps - 1; n >= 0; --n) {
    const double t = rec.t0 + n * rec.dt;
    const Mat op = reversed_step_operator(m, rec.outcomes.at(n), t, rec.dt);
    const Vec v = op * phi.amp;
    const double p = v.squaredNorm();
    if (p < kZeroNorm * kZeroNorm) return -kInf;
    lp += std::log(p);
    phi = PureState{v / std::sqrt(p)};
  }
  const double ov = std::norm(psi0.amp.dot(phi.amp));
  if (ov <= 0) return -kInf;
  return lp + std::log(ov);
}

EntropyBreakdown entropy_production(double log_p_initial, double p_final_class,
                                    double log_pd_cond, double log_pr_cond) {
  if (!std::isfinite(log_p_initial))
    throw ProtocolError("entropy_production: realized preparation has zero weight");
  if (p_final_class < 0 || p_final_class > 1 + 1e-12)
    throw ProtocolError("entropy_production: final class weight must be in [0, 1]");
  if (!std::isfinite(log_pd_cond))
    throw ProtocolError("entropy_production: realized record has zero probability");
  EntropyBreakdown e;
  // a final class the reversed experiment never prepares diverges
  e.boundary = p_final_class == 0 ? kInf : log_p_initial - std::log(p_final_class);
  e.conditional = (log_pr_cond == -kInf) ? kInf : log_pd_cond - log_pr_cond;
  return e;
}

namespace {

void check_weights(const std::vector<double>& x, const std::vector<double>& w) {
  if (w.empty()) return;
  if (w.size() != x.size())
    throw ValidationError("estimator weights must match the sample count");
  double s = 0;
  for (double wi : w) {
    if (!(wi >= 0)) throw ValidationError("estimator weights must be >= 0");
    s += wi;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw ValidationError("estimator weights sum to " + std::to_string(s) +
                          ", expected 1");
}

}  // namespace

EstimatorResult exp_average(const std::vector<double>& x,
                            const std::vector<double>& w) {
  if (x.empty()) throw ValidationError("exp_average: no samples");
  check_weights(x, w);
  EstimatorResult r;
  r.n = static_cast<long long>(x.size());
  if (!w.empty()) {
    double v = 0;
    for (size_t i = 0; i < x.size(); ++i)
      v += w[i] * (std::isinf(x[i]) && x[i] > 0 ? 0.0 : std::exp(-x[i]));
    r.value = v;
    r.std_error = 0;
    return r;
  }
  double s = 0, s2 = 0;
  for (double xi : x) {
    const double f = (std::isinf(xi) && xi > 0) ? 0.0 : std::exp(-xi);
    s += f;
    s2 += f * f;
  }
  const double n = static_cast<double>(x.size());
  r.value = s / n;
  const double var = std::max(0.0, (s2 - s * s / n) / std::max(1.0, n - 1));
  r.std_error = std::sqrt(var / n);
  return r;
}

EstimatorResult mean_value(const std::vector<double>& x,
                           const std::vector<double>& w) {
  if (x.empty()) throw ValidationError("mean_value: no samples");
  check_weights(x, w);
  EstimatorResult r;
  r.n = static_cast<long long>(x.size());
  if (!w.empty()) {
    double v = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      if (std::isinf(x[i])) {
        if (w[i] > 0) {
          r.value = x[i];
          r.std_error = 0;
          return r;
        }
        continue;
      }
      v += w[i] * x[i];
    }
    r.value = v;
    r.std_error = 0;
    return r;
  }
  double s = 0, s2 = 0;
  for (double xi : x) {
    if (std::isinf(xi)) {
      r.value = xi;
      r.std_error = kInf;
      return r;
    }
    s += xi;
    s2 += xi * xi;
  }
  const double n = static_cast<double>(x.size());
  r.value = s / n;
  const double var = std::max(0.0, (s2 - s * s / n) / std::max(1.0, n - 1));
  r.std_error = std::sqrt(var / n);
  return r;
}

}  // namespace qtherm
