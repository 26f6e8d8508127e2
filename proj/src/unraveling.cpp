#include "qtherm/unraveling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace qtherm {

QjOps make_qj_ops(const OpenSystemModel& m, double t, double dt) {
  if (!(dt > 0)) throw TimestepError("dt must be positive");
  if (dt * m.max_rate() >= 0.1)
    throw TimestepError("dt * max rate = " + std::to_string(dt * m.max_rate()) +
                        " is outside the short-time regime (< 0.1)");
  QjOps ops;
  ops.t = t;
  ops.dt = dt;
  const Mat a = complex(0, -dt) * effective_hamiltonian(m, t);
  ops.no_jump = a.exp();
  ops.jump.reserve(m.channels.size());
  ops.ldagl.reserve(m.channels.size());
  for (const auto& c : m.channels) {
    ops.jump.push_back(std::sqrt(c.rate * dt) * c.op);
    ops.ldagl.push_back(c.op.adjoint() * c.op);
  }
  return ops;
}

std::vector<QjBranch> qj_branches(const QjOps& ops, const PureState& psi) {
  const size_t nc = ops.jump.size();
  std::vector<QjBranch> out;
  out.reserve(nc + 1);

  // jump probabilities p_k = ||M_k psi||^2 = Gamma_k dt <L^dag L>
  std::vector<double> pk(nc);
  double psum = 0;
  for (size_t k = 0; k < nc; ++k) {
    pk[k] = (ops.jump[k] * psi.amp).squaredNorm();
    psum += pk[k];
  }
  if (psum >= 0.5)
    throw TimestepError("total jump probability " + std::to_string(psum) +
                        " per step; dt is too coarse");

  QjBranch nj;
  nj.outcome = NoJump{};
  nj.prob = 1.0 - psum;  // complement, so branch probabilities sum to 1 exactly
  Vec v = ops.no_jump * psi.amp;
  const double pnj_applied = v.squaredNorm();
  if (pnj_applied < kZeroNorm * kZeroNorm)
    throw ZeroNormError("no-jump branch has zero weight");
  nj.log_prob = std::log(pnj_applied);
  nj.state = PureState{v / std::sqrt(pnj_applied)};
  out.push_back(std::move(nj));

  for (size_t k = 0; k < nc; ++k) {
    QjBranch b;
    b.outcome = Jump{static_cast<int>(k)};
    b.prob = pk[k];
    if (pk[k] > 0) {
      b.log_prob = std::log(pk[k]);
      b.state = PureState{(ops.jump[k] * psi.amp) / std::sqrt(pk[k])};
    }
    out.push_back(std::move(b));
  }
  return out;
}

StepResult qj_step(const QjOps& ops, const PureState& psi, Rng& rng) {
  auto branches = qj_branches(ops, psi);
  const double r = rng.uniform();
  // walk the jump branches first so the no-jump branch absorbs rounding
  double acc = 0;
  for (size_t k = 1; k < branches.size(); ++k) {
    acc += branches[k].prob;
    if (r < acc)
      return {std::move(branches[k].state), branches[k].outcome,
              branches[k].log_prob, std::log(branches[k].prob)};
  }
  return {std::move(branches[0].state), branches[0].outcome,
          branches[0].log_prob, std::log(branches[0].prob)};
}

StepResult qj_step(const OpenSystemModel& m, const PureState& psi, double t,
                   double dt, Rng& rng) {
  return qj_step(make_qj_ops(m, t, dt), psi, rng);
}

PureState qsd_apply(const OpenSystemModel& m, const PureState& psi, double t,
                    double dt, const std::vector<double>& dw) {
  if (dw.size() != m.channels.size())
    throw DimMismatchError("qsd_apply: expected one increment per channel");
  if (!(dt > 0)) throw TimestepError("dt must be positive");
  if (dt * m.max_rate() >= 0.1)
    throw TimestepError("dt * max rate = " + std::to_string(dt * m.max_rate()) +
                        " is outside the short-time regime (< 0.1)");
  Vec d = complex(0, -dt) * (m.h.at(t) * psi.amp);
  for (size_t k = 0; k < m.channels.size(); ++k) {
    const auto& c = m.channels[k];
    const Vec lpsi = c.op * psi.amp;
    const complex l = psi.amp.dot(lpsi);  // <L>
    // drift: Gamma dt (l* L - L^dag L/2 - |l|^2/2) psi
    d += (c.rate * dt) * (std::conj(l) * lpsi - 0.5 * (c.op.adjoint() * lpsi) -
                          0.5 * std::norm(l) * psi.amp);
    // innovation: sqrt(Gamma) dw (L - l) psi
    d += (std::sqrt(c.rate) * dw[k]) * (lpsi - l * psi.amp);
  }
  return normalize(psi.amp + d);
}

StepResult qsd_step(const OpenSystemModel& m, const PureState& psi, double t,
                    double dt, Rng& rng) {
  Diffusive out;
  out.dw.resize(m.channels.size());
  const double s = std::sqrt(dt);
  for (auto& w : out.dw) w = rng.normal(s);
  StepResult r{qsd_apply(m, psi, t, dt, out.dw), std::move(out), 0.0, 0.0};
  return r;
}

int step_count(double duration, double dt) {
  if (!(dt > 0)) throw TimestepError("dt must be positive");
  if (duration < 0) throw ValidationError("duration must be >= 0");
  const long long n = std::llround(duration / dt);
  if (std::abs(n * dt - duration) > 1e-9 * std::max(1.0, std::abs(duration)))
    throw ValidationError("duration " + std::to_string(duration) +
                          " is not an integer number of dt = " + std::to_string(dt) +
                          " steps");
  return static_cast<int>(n);
}

TrajectoryRecord run_trajectory(const OpenSystemModel& m, Scheme scheme,
                                const PureState& psi0, double t0, double duration,
                                double dt, Rng& rng, const TrajectoryOptions& opt) {
  if (psi0.dim() != m.dim)
    throw DimMismatchError("run_trajectory: state dimension mismatch");
  if (std::abs(psi0.amp.norm() - 1.0) > kNormTol)
    throw ZeroNormError("run_trajectory: initial state is not normalized");

  TrajectoryRecord rec;
  rec.scheme = scheme;
  rec.t0 = t0;
  rec.dt = dt;
  rec.steps = step_count(duration, dt);
  rec.outcomes.reserve(rec.steps);
  if (opt.keep_states) {
    rec.states.reserve(rec.steps + 1);
    rec.states.push_back(psi0);
  }

  PureState psi = psi0;
  // cache the step operators when the generator has no explicit time dependence
  QjOps ops;
  const bool cached = m.h.is_static();
  if (scheme == Scheme::QJ && cached && rec.steps > 0) ops = make_qj_ops(m, t0, dt);

  for (int n = 0; n < rec.steps; ++n) {
    const double t = t0 + n * dt;
    PureState pre = psi;
    StepResult sr = (scheme == Scheme::QJ)
                        ? (cached ? qj_step(ops, pre, rng)
                                  : qj_step(m, pre, t, dt, rng))
                        : qsd_step(m, pre, t, dt, rng);
    PureState post_meas = std::move(sr.state);
    PureState post;
    bool kicked = false;
    if (opt.feedback && *opt.feedback) {
      const Mat u = (*opt.feedback)(t + dt, post_meas);
      post = normalize(u * post_meas.amp);
      kicked = true;
    }
    const PureState& post_ref = kicked ? post : post_meas;
    if (opt.observer && *opt.observer) {
      StepView v{t, dt, pre, post_meas, post_ref, sr.outcome};
      (*opt.observer)(v);
    }
    rec.outcomes.push_back(std::move(sr.outcome));
    rec.log_sampling_prob += sr.log_sampling;
    psi = kicked ? std::move(post) : std::move(post_meas);
    if (opt.keep_states) rec.states.push_back(psi);
  }
  rec.final_state = std::move(psi);
  return rec;
}

}  // namespace qtherm
