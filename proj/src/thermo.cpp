#include "qtherm/thermo.hpp"

namespace qtherm {

double internal_energy(const PureState& psi, const Mat& h) {
  return real_expectation(psi, h);
}

HeatSplit split_heat_qj(const OpenSystemModel& m, int channel, double u_pre) {
  if (channel < 0 || static_cast<size_t>(channel) >= m.channels.size())
    throw ChannelError("split_heat_qj: channel index out of range");
  const auto& c = m.channels[channel];
  if (!c.single_transition())
    throw ChannelError("split_heat_qj: channel " + std::to_string(channel) +
                       " is not a single pointer transition");
  HeatSplit hs;
  hs.q_cl = m.basis.energy[c.to] - m.basis.energy[c.from];
  hs.q_q = m.basis.energy[c.from] - u_pre;
  return hs;
}

double heat_operator_qj(const OpenSystemModel& m, const PureState& pre,
                        const MeasurementOutcome& out, double t, double dt) {
  const Mat h = m.h.at(t);
  const double u = internal_energy(pre, h);
  const Mat delta = h - u * Mat::Identity(m.dim, m.dim);
  if (const Jump* j = std::get_if<Jump>(&out)) {
    const auto& c = m.channels.at(j->channel);
    const Vec lpsi = c.op * pre.amp;
    const double w = lpsi.squaredNorm();
    if (w < kZeroNorm * kZeroNorm)
      throw ZeroNormError("heat_operator_qj: jump from a dark state");
    return (lpsi.dot(delta * lpsi)).real() / w;
  }
  if (std::holds_alternative<NoJump>(out)) {
    double q = 0;
    for (const auto& c : m.channels) {
      const Vec lpsi = c.op * pre.amp;
      // <{L^dag L, delta}> = 2 Re <L psi| L delta psi>
      q -= c.rate * dt * (lpsi.dot(c.op * (delta * pre.amp))).real();
    }
    return q;
  }
  throw ProtocolError("heat_operator_qj: outcome is not a jump-scheme record");
}

namespace {

// increment operators for one diffusive step: full B and innovation G,
// applied to |pre>
void qsd_increment(const OpenSystemModel& m, const PureState& pre, double t,
                   double dt, const std::vector<double>& dw, Vec& b, Vec& g) {
  b = complex(0, -dt) * (m.h.at(t) * pre.amp);
  g = Vec::Zero(pre.dim());
  for (size_t k = 0; k < m.channels.size(); ++k) {
    const auto& c = m.channels[k];
    const Vec lpsi = c.op * pre.amp;
    const complex l = pre.amp.dot(lpsi);
    b += (c.rate * dt) * (std::conj(l) * lpsi - 0.5 * (c.op.adjoint() * lpsi) -
                          0.5 * std::norm(l) * pre.amp);
    g += (std::sqrt(c.rate) * dw[k]) * (lpsi - l * pre.amp);
  }
  b += g;
}

}  // namespace

double heat_operator_qsd(const OpenSystemModel& m, const PureState& pre,
                         const std::vector<double>& dw, double t, double dt) {
  if (dw.size() != m.channels.size())
    throw DimMismatchError("heat_operator_qsd: one increment per channel expected");
  const Mat h = m.h.at(t);
  const double u = internal_energy(pre, h);
  Vec b, g;
  qsd_increment(m, pre, t, dt, dw, b, g);
  const Vec dpsi_h = h * pre.amp - u * pre.amp;  // delta |pre>
  // <B^dag delta + delta B> + <G^dag delta G>
  return 2.0 * b.dot(dpsi_h).real() +
         (g.dot(h * g).real() - u * g.squaredNorm());
}

double heat_operator_qsd_mean(const OpenSystemModel& m, const PureState& pre,
                              const std::vector<double>& dw, double t, double dt) {
  if (dw.size() != m.channels.size())
    throw DimMismatchError("heat_operator_qsd_mean: one increment per channel expected");
  const Mat h = m.h.at(t);
  const double u = internal_energy(pre, h);
  double q = 0;
  for (size_t k = 0; k < m.channels.size(); ++k) {
    const auto& c = m.channels[k];
    const Vec lpsi = c.op * pre.amp;
    const complex l = pre.amp.dot(lpsi);
    // noise term: sqrt(Gamma) dw <(L - l)^dag delta + delta (L - l)>
    const Vec devl = lpsi - l * pre.amp;
    q += 2.0 * std::sqrt(c.rate) * dw[k] *
         (devl.dot(h * pre.amp).real() - u * devl.dot(pre.amp).real());
    // drift + averaged quadratic term:
    //   Gamma dt ( <L^dag h L> - <{L^dag L, h}>/2 )
    q += c.rate * dt *
         (lpsi.dot(h * lpsi).real() - (lpsi.dot(c.op * (h * pre.amp))).real());
  }
  return q;
}

LedgerBuilder::LedgerBuilder(const OpenSystemModel* m, bool keep_steps)
    : m_(m), keep_(keep_steps) {
  if (!m_) throw ProtocolError("LedgerBuilder needs a model");
}

void LedgerBuilder::start(const PureState& psi0, double t) {
  if (started_) throw ProtocolError("LedgerBuilder::start called twice");
  u_ = internal_energy(psi0, m_->h.at(t));
  led_.u_initial = u_;
  started_ = true;
}

void LedgerBuilder::on_step(const StepView& v) {
  if (!started_) throw ProtocolError("LedgerBuilder used before start");
  const bool moving = !m_->h.is_static();
  const Mat h_next = m_->h.at(v.t + v.dt);
  const double w = moving
                       ? real_expectation(v.pre, h_next) -
                             real_expectation(v.pre, m_->h.at(v.t))
                       : 0.0;
  const double u_meas = internal_energy(v.post_meas, h_next);
  const bool kicked = &v.post_step != &v.post_meas;
  const double u_post = kicked ? internal_energy(v.post_step, h_next) : u_meas;

  const double dq = u_meas - (u_ + w);
  const double w_fb = u_post - u_meas;

  double dq_cl = 0, dq_q = dq;
  if (const Jump* j = std::get_if<Jump>(&v.outcome)) {
    const auto& c = m_->channels.at(j->channel);
    if (c.single_transition()) {
      const HeatSplit hs = split_heat_qj(*m_, j->channel, u_ + w);
      dq_cl = hs.q_cl;
      dq_q = dq - dq_cl;
    }
    ++led_.jump_count;
    if (std::isnan(led_.first_jump_time)) led_.first_jump_time = v.t;
  }

  led_.work += w;
  led_.work_fb += w_fb;
  led_.q_cl += dq_cl;
  led_.q_q += dq_q;
  if (keep_) led_.steps.push_back({v.t, u_post - u_, w, w_fb, dq_cl, dq_q});
  u_ = u_post;
}

void LedgerBuilder::quench(const OpenSystemModel* next, const PureState& psi,
                           double t) {
  if (!started_) throw ProtocolError("LedgerBuilder used before start");
  if (!next) throw ProtocolError("quench needs the next model");
  const double u_new = internal_energy(psi, next->h.at(t));
  const double w = u_new - u_;
  led_.work += w;
  if (keep_) led_.steps.push_back({t, w, w, 0, 0, 0});
  u_ = u_new;
  m_ = next;
}

void LedgerBuilder::project(double e_out, double t) {
  if (!started_) throw ProtocolError("LedgerBuilder used before start");
  const double dq = e_out - u_;
  led_.q_q += dq;
  if (keep_) led_.steps.push_back({t, dq, 0, 0, 0, dq});
  u_ = e_out;
}

ThermoLedger LedgerBuilder::take() {
  if (!started_) throw ProtocolError("LedgerBuilder::take before start");
  led_.u_final = u_;
  return std::move(led_);
}

}  // namespace qtherm
