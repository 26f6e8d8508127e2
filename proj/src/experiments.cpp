#include "qtherm/experiments.hpp"

#include <cmath>

namespace qtherm {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

double ExperimentSpec::total_duration() const {
  double d = 0;
  for (const auto& ph : phases)
    if (const auto* ev = std::get_if<PhaseEvolve>(&ph)) d += ev->duration;
  return d;
}

void ExperimentSpec::validate() const {
  if (models.empty()) throw ProtocolError("experiment has no models");
  for (const auto& m : models) m.validate();
  const int dim = models.front().dim;
  for (const auto& m : models)
    if (m.dim != dim) throw ProtocolError("all models must share one dimension");
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  if (phases.empty()) throw ProtocolError("experiment has no phases");

  bool prepared = false;
  bool has_diffusive = false;
  size_t idx = 0;
  for (const auto& ph : phases) {
    const bool is_prep = std::holds_alternative<PhasePrepare>(ph) ||
                         std::holds_alternative<PhaseMixturePrepare>(ph) ||
                         std::holds_alternative<PhaseThermalPrepare>(ph);
    if (is_prep && prepared)
      throw ProtocolError("phase " + std::to_string(idx) + ": second preparation");
    if (!is_prep && !prepared)
      throw ProtocolError("the first phase must prepare a state");
    prepared = prepared || is_prep;

    if (const auto* p = std::get_if<PhaseMixturePrepare>(&ph)) {
      if (p->prob.size() != p->states.size() || p->prob.empty())
        throw ProtocolError("mixture preparation is malformed");
      double s = 0;
      for (double w : p->prob) {
        if (!(w >= 0)) throw ProtocolError("mixture weights must be >= 0");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw ProtocolError("mixture weights sum to " + std::to_string(s));
      for (const auto& st : p->states)
        if (st.dim() != dim) throw DimMismatchError("mixture state dimension");
    }
    if (const auto* p = std::get_if<PhasePrepare>(&ph)) {
      if (p->state.dim() != dim) throw DimMismatchError("prepared state dimension");
      if (std::abs(p->state.amp.norm() - 1.0) > kNormTol)
        throw ProtocolError("prepared state is not normalized");
    }
    auto check_model = [&](int mi) {
      if (mi < 0 || static_cast<size_t>(mi) >= models.size())
        throw ProtocolError("phase " + std::to_string(idx) +
                            " references model " + std::to_string(mi));
    };
    if (const auto* p = std::get_if<PhaseThermalPrepare>(&ph)) {
      check_model(p->model);
      if (!models[p->model].beta)
        throw ProtocolError("thermal preparation needs the model's beta");
    }
    if (const auto* p = std::get_if<PhaseEvolve>(&ph)) {
      check_model(p->model);
      step_count(p->duration, dt);  // throws when off grid
      if (p->scheme == Scheme::QSD && feedback) has_diffusive = true;
    }
    if (const auto* p = std::get_if<PhaseProject>(&ph)) {
      check_model(p->model);
      const auto& b = models[p->model].basis;
      if (b.states.size() != static_cast<size_t>(dim))
        throw ProtocolError("projective readout needs a complete pointer basis");
    }
    ++idx;
  }
  if (feedback && !has_diffusive)
    throw ProtocolError("feedback requires a diffusive evolution phase");

  // sample times must lie on the global step grid
  const double total = total_duration();
  for (double ts : sample_times) {
    if (ts < -1e-12 || ts > total + 1e-12)
      throw ValidationError("sample time " + std::to_string(ts) +
                            " outside the protocol duration");
    const double k = ts / dt;
    if (std::abs(k - std::llround(k)) > 1e-6)
      throw ValidationError("sample time " + std::to_string(ts) +
                            " is not on the dt grid");
  }
  for (size_t i = 1; i < sample_times.size(); ++i)
    if (sample_times[i] <= sample_times[i - 1] + 1e-15)
      throw ValidationError("sample times must be strictly increasing");
}

namespace {

std::vector<double> linspace_samples(double total, int n) {
  std::vector<double> ts;
  ts.reserve(n);
  for (int i = 1; i <= n; ++i) ts.push_back(total * i / n);
  return ts;
}

// round sample times onto the dt grid exactly
std::vector<double> snap(std::vector<double> ts, double dt) {
  for (double& t : ts) t = std::llround(t / dt) * dt;
  return ts;
}

}  // namespace

ExperimentSpec prepare_measure(double theta_prep, double theta_meas, double omega0,
                               bool mixed_preparation) {
  using namespace qubit;
  ExperimentSpec s;
  s.name = "prepare_measure";
  OpenSystemModel meas = closed_model(omega0);
  // readout basis {plus,minus}_theta with its mean energies
  meas.basis.states = {plus_theta(theta_meas), minus_theta(theta_meas)};
  meas.basis.energy = {0.5 * omega0 * std::cos(theta_meas),
                       -0.5 * omega0 * std::cos(theta_meas)};
  meas.validate();
  s.models = {std::move(meas)};
  if (mixed_preparation) {
    const double pe = std::cos(0.5 * theta_prep) * std::cos(0.5 * theta_prep);
    s.phases.push_back(PhaseMixturePrepare{{pe, 1.0 - pe}, {excited(), ground()}});
  } else {
    s.phases.push_back(PhasePrepare{plus_theta(theta_prep)});
  }
  s.phases.push_back(PhaseProject{0});
  s.dt = 1.0;  // no evolution window
  s.final_class = FinalClassPolicy::ProjectiveOutcome;
  return s;
}

ExperimentSpec spontaneous_emission(double omega0, double gamma, double duration) {
  using namespace qubit;
  ExperimentSpec s;
  s.name = "spontaneous_emission";
  s.models = {spontaneous_emission_model(omega0, gamma)};
  s.phases.push_back(PhasePrepare{plus_theta(0.5 * kPi)});
  s.phases.push_back(PhaseEvolve{0, Scheme::QJ, duration});
  s.dt = 1e-3;
  s.sample_times = snap(linspace_samples(duration, 10), s.dt);
  s.final_class = FinalClassPolicy::JumpClass;
  return s;
}

ExperimentSpec dephasing_diffusion(double omega0, double gamma_star, double duration) {
  using namespace qubit;
  ExperimentSpec s;
  s.name = "dephasing_diffusion";
  s.models = {dephasing_model(omega0, gamma_star)};
  s.phases.push_back(PhasePrepare{plus_theta(0.5 * kPi)});
  s.phases.push_back(PhaseEvolve{0, Scheme::QSD, duration});
  s.dt = 1e-2;
  s.sample_times = snap(linspace_samples(duration, 10), s.dt);
  s.final_class = FinalClassPolicy::BornWeight;
  return s;
}

ExperimentSpec dephasing_feedback(double omega0, double gamma_star, double duration,
                                  double work_cutoff, double theta_target) {
  ExperimentSpec s = dephasing_diffusion(omega0, gamma_star, duration);
  s.name = "dephasing_feedback";
  // start on the target circle state
  s.phases[0] = PhasePrepare{qubit::plus_theta(theta_target)};
  s.feedback = FeedbackSetup{theta_target, work_cutoff, omega0};
  s.final_class = FinalClassPolicy::None;
  return s;
}

ExperimentSpec jarzynski_closed(double omega0, double omega1, double beta, double tau) {
  using namespace qubit;
  ExperimentSpec s;
  s.name = "jarzynski_closed";
  OpenSystemModel before = closed_model(omega0);
  OpenSystemModel after;
  after.dim = 2;
  after.h.h0 = 0.5 * omega1 * sx();
  after.basis.states = {plus_theta(0.5 * kPi), minus_theta(0.5 * kPi)};
  after.basis.energy = {0.5 * omega1, -0.5 * omega1};
  after.beta = beta;
  after.validate();
  before.beta = beta;
  s.models = {std::move(before), std::move(after)};
  s.phases.push_back(PhaseThermalPrepare{0});
  s.phases.push_back(PhaseEvolve{1, Scheme::QJ, tau});
  s.phases.push_back(PhaseProject{1});
  s.dt = tau / 128;
  s.beta = beta;
  s.delta_f = equilibrium_free_energy(s.models[1].h.h0, beta) -
              equilibrium_free_energy(s.models[0].h.h0, beta);
  s.final_class = FinalClassPolicy::ProjectiveOutcome;
  return s;
}

ExperimentSpec jarzynski_open(double omega0, double gamma, double beta,
                              double chi_max, int segments, double segment_duration) {
  using namespace qubit;
  if (segments < 1) throw ValidationError("jarzynski_open needs >= 1 segments");
  ExperimentSpec s;
  s.name = "jarzynski_open";
  s.models.reserve(segments + 1);
  for (int m = 0; m <= segments; ++m)
    s.models.push_back(
        rotated_thermal_bath_model(omega0, gamma, beta, chi_max * m / segments));
  s.phases.push_back(PhaseThermalPrepare{0});
  for (int m = 1; m <= segments; ++m)
    s.phases.push_back(PhaseEvolve{m, Scheme::QJ, segment_duration});
  s.phases.push_back(PhaseProject{segments});
  s.dt = 1e-3;
  s.beta = beta;
  // the gap never changes, so the endpoint free energies coincide
  s.delta_f = equilibrium_free_energy(s.models[segments].h.h0, beta) -
              equilibrium_free_energy(s.models[0].h.h0, beta);
  s.final_class = FinalClassPolicy::ProjectiveOutcome;
  return s;
}

// ---- feedback law ----------------------------------------------------------

PureState feedback_target(const FeedbackSetup& fb, double t) {
  // lab frame: exp(-i omega0 t sz/2) |+theta>
  const double c = std::cos(0.5 * fb.theta_target);
  const double sn = std::sin(0.5 * fb.theta_target);
  Vec v(2);
  v << c * std::exp(complex(0, -0.5 * fb.omega0 * t)),
      sn * std::exp(complex(0, +0.5 * fb.omega0 * t));
  return PureState{v};
}

double feedback_control_angle(const PureState& current, const PureState& target) {
  if (current.dim() != 2 || target.dim() != 2)
    throw DimMismatchError("feedback control is defined for qubits");
  // |<T| exp(-i phi sy/2) |C>|^2 = |a cos(phi/2) + b sin(phi/2)|^2 with
  //   a = <T|C>,  b = -i <T|sy|C>
  // = const + A cos(phi) + B sin(phi), maximized at atan2(B, A)
  const complex a = target.amp.dot(current.amp);
  const Vec syc = qubit::sy() * current.amp;
  const complex b = complex(0, -1) * target.amp.dot(syc);
  const double A = 0.5 * (std::norm(a) - std::norm(b));
  const double B = (a * std::conj(b)).real();
  if (std::abs(A) < 1e-15 && std::abs(B) < 1e-15) return 0.0;
  return std::atan2(B, A);
}

namespace {

Mat rot_y(double phi) {
  Mat u(2, 2);
  const double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
  u << c, -s, s, c;
  return u;
}

}  // namespace

Mat feedback_kick(const FeedbackSetup& fb, double t, const PureState& post_meas) {
  // The kick rotates about the y axis of the frame co-rotating with the free
  // precession, so the angle must be optimized on the de-rotated state
  // against the fixed frame target |+theta>. Work of angle phi there:
  //   dW(phi) = (omega0/2) (z cos(phi) - x sin(phi) - z)
  // pick the fidelity-maximizing angle; if its work exceeds the cutoff, take
  // the admissible angle closest to it (same sign)
  Mat rz = Mat::Zero(2, 2);
  rz(0, 0) = std::exp(complex(0, -0.5 * fb.omega0 * t));
  rz(1, 1) = std::exp(complex(0, +0.5 * fb.omega0 * t));
  const PureState rot_state{Vec(rz.adjoint() * post_meas.amp)};
  const PureState target = feedback_target(fb, 0.0);
  double phi = feedback_control_angle(rot_state, target);
  if (std::isfinite(fb.work_cutoff)) {
    const double z = real_expectation(rot_state, qubit::sz());
    const double x = real_expectation(rot_state, qubit::sx());
    auto work = [&](double p) {
      return 0.5 * fb.omega0 * (z * std::cos(p) - x * std::sin(p) - z);
    };
    if (std::abs(work(phi)) > fb.work_cutoff + 1e-15) {
      // dW(phi) = (omega0/2)(R cos(phi + d) - z), R = hypot(x, z)
      const double r = std::hypot(x, z);
      const double d = std::atan2(x, z);
      double best = 0;  // phi = 0 does no work, always admissible
      const double lo = std::min(0.0, phi), hi = std::max(0.0, phi);
      for (double sign : {+1.0, -1.0}) {
        const double c = (z + sign * 2.0 * fb.work_cutoff / fb.omega0) / r;
        if (std::abs(c) > 1.0) continue;
        const double base = std::acos(std::max(-1.0, std::min(1.0, c)));
        for (double branch : {base, -base}) {
          for (double cand : {branch - d, branch - d + 2 * kPi, branch - d - 2 * kPi}) {
            if (cand < lo - 1e-12 || cand > hi + 1e-12) continue;
            if (std::abs(work(cand)) > fb.work_cutoff + 1e-9) continue;
            if (std::abs(cand - phi) < std::abs(best - phi)) best = cand;
          }
        }
      }
      phi = best;
    }
  }
  // conjugate the rotating-frame kick back to the lab frame:
  //   U = R(t) exp(-i phi sy/2) R(t)^dag,  R(t) = exp(-i omega0 t sz/2)
  return rz * rot_y(phi) * rz.adjoint();
}

// ---- registry ---------------------------------------------------------------

namespace {

double param(const std::map<std::string, double>& p,
             const std::map<std::string, double>& defaults, const char* key) {
  auto it = p.find(key);
  if (it != p.end()) return it->second;
  return defaults.at(key);
}

void reject_unknown(const std::map<std::string, double>& p,
                    const std::map<std::string, double>& defaults) {
  for (const auto& [k, v] : p)
    if (!defaults.count(k))
      throw ValidationError("unknown parameter '" + k + "'");
}

std::vector<PresetInfo> make_registry() {
  std::vector<PresetInfo> r;

  {
    PresetInfo pi;
    pi.name = "prepare_measure";
    pi.summary = "prepare a qubit state, measure in a rotated basis";
    pi.defaults = {{"theta_prep", kPi / 3}, {"theta_meas", kPi / 3},
                   {"omega0", 1.0},         {"mixed", 1.0}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      return prepare_measure(param(p, d, "theta_prep"), param(p, d, "theta_meas"),
                             param(p, d, "omega0"), param(p, d, "mixed") != 0.0);
    };
    r.push_back(std::move(pi));
  }
  {
    PresetInfo pi;
    pi.name = "spontaneous_emission";
    pi.summary = "|+x> relaxing into a zero-temperature bath (jump record)";
    pi.defaults = {{"omega0", 1.0}, {"gamma", 1.0}, {"duration", 2.0}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      return spontaneous_emission(param(p, d, "omega0"), param(p, d, "gamma"),
                                  param(p, d, "duration"));
    };
    r.push_back(std::move(pi));
  }
  {
    PresetInfo pi;
    pi.name = "dephasing_diffusion";
    pi.summary = "|+x> under pure dephasing (diffusive record)";
    pi.defaults = {{"omega0", 1.0}, {"gamma_star", 1.0}, {"duration", 2.0}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      return dephasing_diffusion(param(p, d, "omega0"), param(p, d, "gamma_star"),
                                 param(p, d, "duration"));
    };
    r.push_back(std::move(pi));
  }
  {
    PresetInfo pi;
    pi.name = "dephasing_feedback";
    pi.summary = "dephasing with a work-limited feedback loop holding |+theta>";
    pi.defaults = {{"omega0", 1.0},       {"gamma_star", 0.1},
                   {"duration", 1.5},     {"work_cutoff", kInf},
                   {"theta_target", kPi / 2}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      return dephasing_feedback(param(p, d, "omega0"), param(p, d, "gamma_star"),
                                param(p, d, "duration"), param(p, d, "work_cutoff"),
                                param(p, d, "theta_target"));
    };
    r.push_back(std::move(pi));
  }
  {
    PresetInfo pi;
    pi.name = "jarzynski_closed";
    pi.summary = "two-point work statistics across a sudden sz -> sx quench";
    pi.defaults = {{"omega0", 1.0}, {"omega1", 2.0}, {"beta", 1.0}, {"tau", 1.0}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      return jarzynski_closed(param(p, d, "omega0"), param(p, d, "omega1"),
                              param(p, d, "beta"), param(p, d, "tau"));
    };
    r.push_back(std::move(pi));
  }
  {
    PresetInfo pi;
    pi.name = "jarzynski_open";
    pi.summary = "two-point statistics for a rotating eigenbasis with a thermal bath";
    pi.defaults = {{"omega0", 1.0},   {"gamma", 0.2},    {"beta", 1.0},
                   {"chi_max", kPi / 3}, {"segments", 6.0}, {"segment_duration", 1.0}};
    pi.build = [d = pi.defaults](const std::map<std::string, double>& p) {
      reject_unknown(p, d);
      const double seg = param(p, d, "segments");
      if (seg < 1 || std::abs(seg - std::llround(seg)) > 1e-9)
        throw ValidationError("segments must be a positive integer");
      return jarzynski_open(param(p, d, "omega0"), param(p, d, "gamma"),
                            param(p, d, "beta"), param(p, d, "chi_max"),
                            static_cast<int>(std::llround(seg)),
                            param(p, d, "segment_duration"));
    };
    r.push_back(std::move(pi));
  }
  return r;
}

}  // namespace

const std::vector<PresetInfo>& preset_registry() {
  static const std::vector<PresetInfo> r = make_registry();
  return r;
}

ExperimentSpec build_preset(const std::string& name,
                            const std::map<std::string, double>& params) {
  for (const auto& pi : preset_registry())
    if (pi.name == name) return pi.build(params);
  std::string known;
  for (const auto& pi : preset_registry()) known += " " + pi.name;
  throw ValidationError("unknown experiment '" + name + "'; available:" + known);
}

}  // namespace qtherm
