#include "qtherm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace qtherm {

namespace {

// Gibbs weights over a model's pointer basis; beta = +inf puts all weight on
// the lowest pointer energies
std::vector<double> gibbs_weights(const OpenSystemModel& m) {
  if (!m.beta) throw ProtocolError("thermal preparation needs the model's beta");
  const double beta = *m.beta;
  const auto& e = m.basis.energy;
  if (e.empty()) throw ProtocolError("thermal preparation needs a pointer basis");
  const double emin = *std::min_element(e.begin(), e.end());
  std::vector<double> w(e.size());
  double z = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    w[i] = std::isinf(beta) ? (e[i] - emin <= 1e-12 ? 1.0 : 0.0)
                            : std::exp(-beta * (e[i] - emin));
    z += w[i];
  }
  for (auto& wi : w) wi /= z;
  return w;
}

int sample_discrete(const std::vector<double>& w, Rng& rng) {
  const double r = rng.uniform();
  double acc = 0;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    acc += w[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace

// ---- deterministic ensemble track -------------------------------------------

DensityTrack density_track(const ExperimentSpec& spec) {
  spec.validate();
  DensityTrack tr;
  tr.comparable = !spec.feedback.has_value();
  tr.times = spec.sample_times;

  DensityMatrix rho;
  double t = 0;
  size_t next = 0;
  bool projected = false;
  auto snap = [&]() {
    while (next < tr.times.size() && tr.times[next] <= t + 1e-9) {
      tr.rho.push_back(rho);
      ++next;
    }
  };

  for (const auto& ph : spec.phases) {
    if (const auto* p = std::get_if<PhasePrepare>(&ph)) {
      rho = pure_density(p->state);
      tr.initial = rho;
      snap();
    } else if (const auto* p = std::get_if<PhaseMixturePrepare>(&ph)) {
      Mat r = Mat::Zero(p->states[0].dim(), p->states[0].dim());
      for (size_t b = 0; b < p->prob.size(); ++b)
        r += p->prob[b] * (p->states[b].amp * p->states[b].amp.adjoint());
      rho = make_density(r);
      tr.initial = rho;
      snap();
    } else if (const auto* p = std::get_if<PhaseThermalPrepare>(&ph)) {
      const auto& m = spec.models[p->model];
      const auto w = gibbs_weights(m);
      Mat r = Mat::Zero(m.dim, m.dim);
      for (size_t i = 0; i < w.size(); ++i)
        r += w[i] * (m.basis.states[i].amp * m.basis.states[i].amp.adjoint());
      rho = make_density(r);
      tr.initial = rho;
      snap();
    } else if (const auto* p = std::get_if<PhaseEvolve>(&ph)) {
      const auto& m = spec.models[p->model];
      const int steps = step_count(p->duration, spec.dt);
      for (int s = 0; s < steps; ++s) {
        rho = lindblad_step(m, rho, t, spec.dt);
        t += spec.dt;
        snap();
      }
    } else if (const auto* p = std::get_if<PhaseProject>(&ph)) {
      const auto& m = spec.models[p->model];
      tr.final_pre = rho;
      projected = true;
      tr.final_outcome_prob.assign(m.basis.states.size(), 0.0);
      Mat r = Mat::Zero(m.dim, m.dim);
      for (size_t k = 0; k < m.basis.states.size(); ++k) {
        const double w =
            (m.basis.states[k].amp.adjoint() * rho.rho * m.basis.states[k].amp)(0)
                .real();
        tr.final_outcome_prob[k] = std::max(0.0, w);
        r += tr.final_outcome_prob[k] *
             (m.basis.states[k].amp * m.basis.states[k].amp.adjoint());
      }
      rho = make_density(r);
      snap();
    }
  }
  if (!projected) tr.final_pre = rho;
  tr.final_state = rho;
  // any unreached sample times (end of protocol) collapse to the final state
  while (next < tr.times.size()) {
    tr.rho.push_back(rho);
    ++next;
  }
  return tr;
}

// ---- single-trajectory protocol walk ----------------------------------------

namespace {

ProtocolResult run_one(const ExperimentSpec& spec, uint64_t idx, Rng& rng,
                       const RunOptions& opt, bool want_probs) {
  ProtocolResult res;
  res.index = idx;
  const auto& models = spec.models;

  PureState psi;
  double t = 0;
  int active = -1;
  std::optional<LedgerBuilder> lb;
  size_t next_sample = 0;

  auto snapshot_now = [&]() {
    while (next_sample < spec.sample_times.size() &&
           spec.sample_times[next_sample] <= t + 1e-9) {
      res.sampled_u.push_back(lb->u());
      res.sampled_state.push_back(psi);
      ++next_sample;
    }
  };
  auto begin_ledger = [&](int model_idx) {
    active = model_idx;
    lb.emplace(&models[model_idx], opt.keep_step_series);
    lb->start(psi, t);
  };
  auto ensure_model = [&](int model_idx) {
    if (model_idx != active) {
      lb->quench(&models[model_idx], psi, t);
      active = model_idx;
    }
  };

  for (const auto& ph : spec.phases) {
    if (const auto* p = std::get_if<PhasePrepare>(&ph)) {
      psi = p->state;
      begin_ledger(0);
      res.log_p_initial = 0;
      res.initial_outcome = 0;
      snapshot_now();
    } else if (const auto* p = std::get_if<PhaseMixturePrepare>(&ph)) {
      const int b = sample_discrete(p->prob, rng);
      if (!(p->prob[b] > 0))
        throw ProtocolError("sampled a zero-weight preparation branch");
      psi = p->states[b];
      begin_ledger(0);
      res.log_p_initial = std::log(p->prob[b]);
      res.initial_outcome = b;
      snapshot_now();
    } else if (const auto* p = std::get_if<PhaseThermalPrepare>(&ph)) {
      const auto& m = models[p->model];
      const auto w = gibbs_weights(m);
      const int b = sample_discrete(w, rng);
      if (!(w[b] > 0))
        throw ProtocolError("sampled a zero-weight thermal branch");
      psi = m.basis.states[b];
      begin_ledger(p->model);
      res.log_p_initial = std::log(w[b]);
      res.initial_outcome = b;
      snapshot_now();
    } else if (const auto* p = std::get_if<PhaseEvolve>(&ph)) {
      if (!lb) throw ProtocolError("evolution before preparation");
      ensure_model(p->model);
      const auto& m = models[p->model];

      FeedbackKick kick;
      if (spec.feedback && p->scheme == Scheme::QSD)
        kick = [fb = *spec.feedback](double tn, const PureState& s) {
          return feedback_kick(fb, tn, s);
        };
      StepObserver obs = [&](const StepView& v) {
        lb->on_step(v);
        while (next_sample < spec.sample_times.size() &&
               spec.sample_times[next_sample] <= v.t + v.dt + 1e-9) {
          res.sampled_u.push_back(lb->u());
          res.sampled_state.push_back(v.post_step);
          ++next_sample;
        }
      };
      TrajectoryOptions topt;
      topt.feedback = kick ? &kick : nullptr;
      topt.observer = &obs;

      const PureState entry = psi;
      TrajectoryRecord rec =
          run_trajectory(m, p->scheme, psi, t, p->duration, spec.dt, rng, topt);
      psi = rec.final_state;
      t += step_count(p->duration, spec.dt) * spec.dt;

      if (want_probs) {
        res.log_pd_cond += log_direct_probability(m, rec, entry);
        res.log_pr_cond += log_reversed_probability(m, rec, entry, rec.final_state);
      }
      if (opt.keep_records) res.records.push_back(std::move(rec));
    } else if (const auto* p = std::get_if<PhaseProject>(&ph)) {
      if (!lb) throw ProtocolError("readout before preparation");
      ensure_model(p->model);
      const auto& m = models[p->model];
      std::vector<double> w(m.basis.states.size());
      for (size_t k = 0; k < w.size(); ++k)
        w[k] = std::norm(m.basis.states[k].amp.dot(psi.amp));
      const int k = sample_discrete(w, rng);
      if (!(w[k] > 0)) throw ProtocolError("sampled a zero-weight readout branch");
      lb->project(m.basis.energy[k], t);
      psi = m.basis.states[k];
      res.final_outcome = k;
      snapshot_now();
    }
  }
  snapshot_now();

  res.final_state = psi;
  if (spec.feedback)
    res.final_fidelity = fidelity(psi, feedback_target(*spec.feedback, t));
  res.ledger = lb ? lb->take() : ThermoLedger{};
  if (spec.beta && spec.delta_f)
    res.ledger_exponent =
        *spec.beta * (res.ledger.delta_u() - res.ledger.q_cl - *spec.delta_f);
  return res;
}

// probability that a JumpClass experiment's emission window stays jump-free
std::optional<double> no_jump_probability(const ExperimentSpec& spec) {
  if (spec.final_class != FinalClassPolicy::JumpClass) return std::nullopt;
  const PhasePrepare* prep = nullptr;
  const PhaseEvolve* ev = nullptr;
  for (const auto& ph : spec.phases) {
    if (const auto* p = std::get_if<PhasePrepare>(&ph)) prep = p;
    if (const auto* p = std::get_if<PhaseEvolve>(&ph)) {
      if (ev) throw ProtocolError("JumpClass policy needs a single evolution window");
      ev = p;
    }
  }
  if (!prep || !ev || ev->scheme != Scheme::QJ)
    throw ProtocolError(
        "JumpClass policy needs a deterministic preparation and one jump window");
  TrajectoryRecord rec;
  rec.scheme = Scheme::QJ;
  rec.t0 = 0;
  rec.dt = spec.dt;
  rec.steps = step_count(ev->duration, spec.dt);
  rec.outcomes.assign(rec.steps, NoJump{});
  return std::exp(
      log_direct_probability(spec.models[ev->model], rec, prep->state));
}

void assemble_entropy(const ExperimentSpec& spec, const DensityTrack& track,
                      const std::optional<double>& p_nj, ProtocolResult& r) {
  double pf = 0;
  switch (spec.final_class) {
    case FinalClassPolicy::None:
      return;
    case FinalClassPolicy::ProjectiveOutcome: {
      if (r.final_outcome < 0 ||
          static_cast<size_t>(r.final_outcome) >= track.final_outcome_prob.size())
        throw ProtocolError("trajectory has no final readout to classify");
      pf = track.final_outcome_prob[r.final_outcome];
      break;
    }
    case FinalClassPolicy::JumpClass: {
      if (!p_nj) throw ProtocolError("jump-class weight missing");
      pf = (r.ledger.jump_count > 0) ? 1.0 - *p_nj : *p_nj;
      break;
    }
    case FinalClassPolicy::BornWeight: {
      pf = (r.final_state.amp.adjoint() * track.final_state.rho *
            r.final_state.amp)(0)
               .real();
      break;
    }
  }
  r.entropy = entropy_production(r.log_p_initial, pf, r.log_pd_cond, r.log_pr_cond);
  r.has_entropy = true;
}

}  // namespace

// ---- ensemble driver ---------------------------------------------------------

EnsembleStats run_ensemble(const ExperimentSpec& spec, long long n,
                           uint64_t master_seed, const RunOptions& opt) {
  spec.validate();
  if (n <= 0) throw ValidationError("ensemble size must be positive");

  EnsembleStats st;
  st.experiment = spec.name;
  st.n = n;
  st.master_seed = master_seed;
  st.dt = spec.dt;
  st.sample_times = spec.sample_times;
  st.track = density_track(spec);
  st.p_no_jump = no_jump_probability(spec);
  st.trajectories.resize(n);

  const bool want_probs = opt.entropy && spec.final_class != FinalClassPolicy::None;

  auto worker = [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i) {
      Rng rng(master_seed, static_cast<uint64_t>(i));
      try {
        st.trajectories[i] = run_one(spec, i, rng, opt, want_probs);
      } catch (const std::exception& e) {
        st.trajectories[i] = ProtocolResult{};
        st.trajectories[i].index = i;
        st.trajectories[i].error = e.what();
      }
    }
  };

  int threads = opt.threads > 0
                    ? opt.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  const long long cap = std::min<long long>(n, 64);
  threads = static_cast<int>(std::max<long long>(1, std::min<long long>(threads, cap)));
  if (threads == 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const long long lo = w * chunk, hi = std::min<long long>(n, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // serial aggregation in index order keeps results thread-count independent
  for (auto& r : st.trajectories) {
    if (!r.error.empty()) {
      ++st.divergent;
      continue;
    }
    if (want_probs) assemble_entropy(spec, st.track, st.p_no_jump, r);
  }

  if (!spec.sample_times.empty()) {
    const int dim = spec.models.front().dim;
    std::vector<Mat> acc(spec.sample_times.size(), Mat::Zero(dim, dim));
    long long ok = 0;
    for (const auto& r : st.trajectories) {
      if (!r.error.empty()) continue;
      if (r.sampled_state.size() != spec.sample_times.size())
        throw ProtocolError("trajectory missed a sample time");
      for (size_t s = 0; s < acc.size(); ++s)
        acc[s] += r.sampled_state[s].amp * r.sampled_state[s].amp.adjoint();
      ++ok;
    }
    if (ok > 0) {
      st.mean_density.reserve(acc.size());
      for (auto& a : acc) st.mean_density.push_back(make_density(a / double(ok)));
    }
  }
  return st;
}

// ---- exhaustive enumeration ---------------------------------------------------

namespace {

struct EnumCtx {
  const ExperimentSpec& spec;
  const RunOptions& opt;
  bool want_probs = false;
  long long max_nodes = 0;
  long long visited = 0;
  std::vector<EnumeratedTrajectory> leaves;
};

struct EnumFrame {
  PureState psi;
  double t = 0;
  int active = -1;
  std::optional<LedgerBuilder> lb;
  ProtocolResult res;
  double log_w = 0;  // accumulated sampling log-probability
  size_t next_sample = 0;
  // evolve-in-progress bookkeeping
  TrajectoryRecord rec;
  PureState entry;
};

void touch(EnumCtx& cx) {
  if (++cx.visited > cx.max_nodes)
    throw EnumerationError("outcome tree exceeds " + std::to_string(cx.max_nodes) +
                           " nodes");
}

void snapshot_now(const ExperimentSpec& spec, EnumFrame& f) {
  while (f.next_sample < spec.sample_times.size() &&
         spec.sample_times[f.next_sample] <= f.t + 1e-9) {
    f.res.sampled_u.push_back(f.lb->u());
    f.res.sampled_state.push_back(f.psi);
    ++f.next_sample;
  }
}

void walk_phase(EnumCtx& cx, size_t phase_idx, EnumFrame f);

void finish_leaf(EnumCtx& cx, EnumFrame f) {
  f.res.final_state = f.psi;
  f.res.ledger = f.lb ? f.lb->take() : ThermoLedger{};
  if (cx.spec.beta && cx.spec.delta_f)
    f.res.ledger_exponent = *cx.spec.beta * (f.res.ledger.delta_u() -
                                             f.res.ledger.q_cl - *cx.spec.delta_f);
  f.res.index = cx.leaves.size();
  cx.leaves.push_back({std::exp(f.log_w), std::move(f.res)});
}

// branch over the remaining steps of an evolve window, then continue
void walk_evolve(EnumCtx& cx, size_t phase_idx, const PhaseEvolve& ev, int step,
                 int steps, const QjOps& ops, EnumFrame f) {
  if (step == steps) {
    f.rec.final_state = f.psi;
    if (cx.want_probs) {
      const auto& m = cx.spec.models[ev.model];
      f.res.log_pd_cond += log_direct_probability(m, f.rec, f.entry);
      f.res.log_pr_cond += log_reversed_probability(m, f.rec, f.entry, f.psi);
    }
    if (cx.opt.keep_records) f.res.records.push_back(f.rec);
    f.rec = TrajectoryRecord{};
    walk_phase(cx, phase_idx + 1, std::move(f));
    return;
  }
  const auto& m = cx.spec.models[ev.model];
  const bool cached = m.h.is_static();
  QjOps local;
  if (!cached) local = make_qj_ops(m, f.t, cx.spec.dt);
  const QjOps& use = cached ? ops : local;

  auto branches = qj_branches(use, f.psi);
  for (auto& b : branches) {
    if (!(b.prob > 1e-300)) continue;  // zero-probability branch
    touch(cx);
    EnumFrame g = f;
    const double t0 = g.t;
    g.log_w += std::log(b.prob);
    PureState pre = g.psi;
    StepView v{t0, cx.spec.dt, pre, b.state, b.state, b.outcome};
    g.lb->on_step(v);
    g.psi = b.state;
    g.t = t0 + cx.spec.dt;
    g.rec.outcomes.push_back(b.outcome);
    g.rec.log_sampling_prob += std::log(b.prob);
    while (g.next_sample < cx.spec.sample_times.size() &&
           cx.spec.sample_times[g.next_sample] <= g.t + 1e-9) {
      g.res.sampled_u.push_back(g.lb->u());
      g.res.sampled_state.push_back(g.psi);
      ++g.next_sample;
    }
    walk_evolve(cx, phase_idx, ev, step + 1, steps, use, std::move(g));
  }
}

void walk_phase(EnumCtx& cx, size_t phase_idx, EnumFrame f) {
  const auto& spec = cx.spec;
  if (phase_idx == spec.phases.size()) {
    snapshot_now(spec, f);
    finish_leaf(cx, std::move(f));
    return;
  }
  const auto& ph = spec.phases[phase_idx];

  if (const auto* p = std::get_if<PhasePrepare>(&ph)) {
    touch(cx);
    f.psi = p->state;
    f.active = 0;
    f.lb.emplace(&spec.models[0], cx.opt.keep_step_series);
    f.lb->start(f.psi, f.t);
    f.res.log_p_initial = 0;
    f.res.initial_outcome = 0;
    snapshot_now(spec, f);
    walk_phase(cx, phase_idx + 1, std::move(f));
    return;
  }
  if (const auto* p = std::get_if<PhaseMixturePrepare>(&ph)) {
    for (size_t b = 0; b < p->prob.size(); ++b) {
      if (!(p->prob[b] > 1e-300)) continue;
      touch(cx);
      EnumFrame g = f;
      g.psi = p->states[b];
      g.active = 0;
      g.lb.emplace(&spec.models[0], cx.opt.keep_step_series);
      g.lb->start(g.psi, g.t);
      g.log_w += std::log(p->prob[b]);
      g.res.log_p_initial = std::log(p->prob[b]);
      g.res.initial_outcome = static_cast<int>(b);
      snapshot_now(spec, g);
      walk_phase(cx, phase_idx + 1, std::move(g));
    }
    return;
  }
  if (const auto* p = std::get_if<PhaseThermalPrepare>(&ph)) {
    const auto& m = spec.models[p->model];
    const auto w = gibbs_weights(m);
    for (size_t b = 0; b < w.size(); ++b) {
      if (!(w[b] > 1e-300)) continue;
      touch(cx);
      EnumFrame g = f;
      g.psi = m.basis.states[b];
      g.active = p->model;
      g.lb.emplace(&m, cx.opt.keep_step_series);
      g.lb->start(g.psi, g.t);
      g.log_w += std::log(w[b]);
      g.res.log_p_initial = std::log(w[b]);
      g.res.initial_outcome = static_cast<int>(b);
      snapshot_now(spec, g);
      walk_phase(cx, phase_idx + 1, std::move(g));
    }
    return;
  }
  if (const auto* p = std::get_if<PhaseEvolve>(&ph)) {
    if (!f.lb) throw ProtocolError("evolution before preparation");
    if (p->scheme != Scheme::QJ)
      throw EnumerationError("diffusive records have no discrete outcome tree");
    if (p->model != f.active) {
      f.lb->quench(&spec.models[p->model], f.psi, f.t);
      f.active = p->model;
    }
    const auto& m = spec.models[p->model];
    const int steps = step_count(p->duration, spec.dt);
    f.rec = TrajectoryRecord{};
    f.rec.scheme = Scheme::QJ;
    f.rec.t0 = f.t;
    f.rec.dt = spec.dt;
    f.rec.steps = steps;
    f.entry = f.psi;
    QjOps ops;
    if (m.h.is_static() && steps > 0) ops = make_qj_ops(m, f.t, spec.dt);
    walk_evolve(cx, phase_idx, *p, 0, steps, ops, std::move(f));
    return;
  }
  if (const auto* p = std::get_if<PhaseProject>(&ph)) {
    if (!f.lb) throw ProtocolError("readout before preparation");
    if (p->model != f.active) {
      f.lb->quench(&spec.models[p->model], f.psi, f.t);
      f.active = p->model;
    }
    const auto& m = spec.models[p->model];
    for (size_t k = 0; k < m.basis.states.size(); ++k) {
      const double w = std::norm(m.basis.states[k].amp.dot(f.psi.amp));
      if (!(w > 1e-300)) continue;
      touch(cx);
      EnumFrame g = f;
      g.lb->project(m.basis.energy[k], g.t);
      g.psi = m.basis.states[k];
      g.log_w += std::log(w);
      g.res.final_outcome = static_cast<int>(k);
      snapshot_now(spec, g);
      walk_phase(cx, phase_idx + 1, std::move(g));
    }
    return;
  }
  throw ProtocolError("unhandled phase kind");
}

}  // namespace

std::vector<EnumeratedTrajectory> enumerate_trajectories(const ExperimentSpec& spec,
                                                         long long max_nodes,
                                                         const RunOptions& opt) {
  spec.validate();
  if (spec.feedback)
    throw EnumerationError("feedback loops cannot be enumerated");
  EnumCtx cx{spec, opt};
  cx.want_probs = opt.entropy && spec.final_class != FinalClassPolicy::None;
  cx.max_nodes = max_nodes;

  walk_phase(cx, 0, EnumFrame{});

  if (cx.want_probs) {
    const DensityTrack track = density_track(spec);
    const auto p_nj = no_jump_probability(spec);
    for (auto& leaf : cx.leaves)
      assemble_entropy(spec, track, p_nj, leaf.result);
  }
  return cx.leaves;
}

// ---- histograms ---------------------------------------------------------------

Histogram histogram_exact(std::vector<double> samples, double tol) {
  if (samples.empty()) throw ValidationError("histogram: no samples");
  std::sort(samples.begin(), samples.end());
  Histogram h;
  size_t i = 0;
  const double n = static_cast<double>(samples.size());
  while (i < samples.size()) {
    size_t j = i;
    double sum = 0;
    while (j < samples.size() && samples[j] - samples[i] <= tol) {
      sum += samples[j];
      ++j;
    }
    h.value.push_back(sum / static_cast<double>(j - i));
    h.count.push_back(static_cast<long long>(j - i));
    h.mass.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return h;
}

Histogram histogram_fixed(const std::vector<double>& samples, double lo, double hi,
                          int bins) {
  if (samples.empty()) throw ValidationError("histogram: no samples");
  if (!(hi > lo) || bins < 1) throw ValidationError("histogram: bad binning");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b)
    h.edges[b] = lo + (hi - lo) * b / bins;
  h.count.assign(bins, 0);
  const double w = (hi - lo) / bins;
  for (double x : samples) {
    int b = static_cast<int>(std::floor((x - lo) / w));
    b = std::max(0, std::min(bins - 1, b));  // clamp outliers into edge bins
    ++h.count[b];
  }
  const double n = static_cast<double>(samples.size());
  h.value.resize(bins);
  h.mass.resize(bins);
  for (int b = 0; b < bins; ++b) {
    h.value[b] = 0.5 * (h.edges[b] + h.edges[b + 1]);
    h.mass[b] = h.count[b] / n;
  }
  return h;
}

Histogram histogram_fd(std::vector<double> samples) {
  if (samples.empty()) throw ValidationError("histogram: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  auto quantile = [&](double q) {
    const double pos = q * (n - 1);
    const size_t i = static_cast<size_t>(pos);
    const double fr = pos - i;
    return (i + 1 < samples.size()) ? samples[i] * (1 - fr) + samples[i + 1] * fr
                                    : samples[i];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = samples.front(), hi = samples.back();
  const double width = 2.0 * iqr / std::cbrt(n);
  if (!(width > 0) || !(hi > lo)) return histogram_exact(std::move(samples));
  const int bins =
      static_cast<int>(std::min(1e6, std::max(1.0, std::ceil((hi - lo) / width))));
  return histogram_fixed(samples, lo, hi + (hi - lo) * 1e-12, bins);
}

}  // namespace qtherm
