#include <cmath>

#include "doctest.h"
#include "qtherm/irreversibility.hpp"

using namespace qtherm;
using doctest::Approx;

namespace {

TrajectoryRecord const_record(int steps, double dt, const MeasurementOutcome& out) {
  TrajectoryRecord rec;
  rec.scheme = Scheme::QJ;
  rec.t0 = 0;
  rec.dt = dt;
  rec.steps = steps;
  rec.outcomes.assign(steps, out);
  return rec;
}

}  // namespace

TEST_CASE("direct probability of a jump-free record is the survival law") {
  const double gamma = 1.0, T = 0.5, dt = 1e-3;
  const OpenSystemModel m = qubit::spontaneous_emission_model(1.0, gamma);
  const auto rec = const_record(500, dt, NoJump{});
  CHECK(log_direct_probability(m, rec, qubit::excited()) ==
        Approx(-gamma * T).epsilon(1e-12));
  // final-state overlap multiplies in; an orthogonal target kills the record
  const PureState g = qubit::ground();
  CHECK(log_direct_probability(m, rec, qubit::excited(), &g) == -kInf);
}

TEST_CASE("a jump-free record from an energy eigenstate is reversible") {
  const OpenSystemModel m = qubit::spontaneous_emission_model(1.0, 1.0);
  const auto rec = const_record(400, 1e-3, NoJump{});
  const double pd = log_direct_probability(m, rec, qubit::excited());
  const double pr =
      log_reversed_probability(m, rec, qubit::excited(), qubit::excited());
  CHECK(pd == Approx(pr).epsilon(1e-12));
}

TEST_CASE("an emission into a zero-temperature bath cannot be undone") {
  const OpenSystemModel m = qubit::spontaneous_emission_model(1.0, 1.0);
  const Mat rev = reversed_step_operator(m, Jump{0}, 0.0, 1e-3);
  CHECK(rev.cwiseAbs().maxCoeff() == 0.0);

  TrajectoryRecord rec = const_record(10, 1e-3, NoJump{});
  rec.outcomes[4] = Jump{0};
  const double pr =
      log_reversed_probability(m, rec, qubit::plus_theta(1.0), qubit::ground());
  CHECK(pr == -kInf);
}

TEST_CASE("detailed balance maps each jump onto its partner") {
  const double beta = 1.3, omega0 = 1.0, gamma = 0.6, dt = 1e-3;
  const OpenSystemModel m = qubit::thermal_bath_model(omega0, gamma, beta);
  REQUIRE(m.channels.size() == 2);
  int down = -1, up = -1;
  for (int k = 0; k < 2; ++k)
    (m.channels[k].from == 0 ? down : up) = k;

  // exp(beta q_cl / 2) M_down^dag equals the forward absorption operator
  const Mat rev_down = reversed_step_operator(m, Jump{down}, 0.0, dt);
  const Mat fwd_up = std::sqrt(m.channels[up].rate * dt) * m.channels[up].op;
  CHECK((rev_down - fwd_up).cwiseAbs().maxCoeff() < 1e-14);

  // no-jump reversal is the plain adjoint of the applied operator
  const QjOps ops = make_qj_ops(m, 0.0, dt);
  const Mat rev0 = reversed_step_operator(m, NoJump{}, 0.0, dt);
  CHECK((rev0 - dagger(ops.no_jump)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("trajectory-wise balance: log P_r - log P_d = beta Q_cl") {
  const double beta = 1.0, omega0 = 1.0;
  const OpenSystemModel m = qubit::thermal_bath_model(omega0, 0.5, beta);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(77, seed);
    const auto rec =
        run_trajectory(m, Scheme::QJ, qubit::ground(), 0.0, 2.0, 1e-3, rng);
    double q_cl = 0;
    for (const auto& out : rec.outcomes)
      if (const Jump* j = std::get_if<Jump>(&out)) {
        const auto& c = m.channels[j->channel];
        q_cl += m.basis.energy[c.to] - m.basis.energy[c.from];
      }
    const double pd = log_direct_probability(m, rec, qubit::ground());
    const double pr =
        log_reversed_probability(m, rec, qubit::ground(), rec.final_state);
    CHECK(std::abs(pr - pd - beta * q_cl) < 1e-9);
  }
}

TEST_CASE("entropy production bookkeeping") {
  SUBCASE("finite case") {
    const EntropyBreakdown e =
        entropy_production(std::log(0.5), 0.25, -1.0, -2.5);
    CHECK(e.boundary == Approx(std::log(0.5) - std::log(0.25)).epsilon(1e-14));
    CHECK(e.conditional == Approx(1.5).epsilon(1e-14));
    CHECK(e.total() == Approx(std::log(2.0) + 1.5).epsilon(1e-13));
    CHECK_FALSE(e.infinite());
  }
  SUBCASE("impossible reversal diverges") {
    const EntropyBreakdown e = entropy_production(0.0, 0.5, -1.0, -kInf);
    CHECK(e.conditional == kInf);
    CHECK(e.infinite());
  }
  SUBCASE("empty final class diverges") {
    const EntropyBreakdown e = entropy_production(0.0, 0.0, -1.0, -1.0);
    CHECK(e.boundary == kInf);
    CHECK(e.infinite());
  }
}

TEST_CASE("exponential average") {
  SUBCASE("Monte Carlo mode with standard error") {
    const EstimatorResult r = exp_average({std::log(2.0), std::log(4.0)});
    CHECK(r.value == Approx(0.375).epsilon(1e-14));
    CHECK(r.std_error == Approx(0.125).epsilon(1e-12));
    CHECK(r.n == 2);
  }
  SUBCASE("weighted exact mode") {
    const EstimatorResult r =
        exp_average({std::log(2.0), std::log(4.0)}, {0.25, 0.75});
    CHECK(r.value == Approx(0.3125).epsilon(1e-14));
    CHECK(r.std_error == 0.0);
    CHECK_THROWS_AS(exp_average({0.0, 0.0}, {0.2, 0.2}), ValidationError);
  }
  SUBCASE("diverging samples contribute nothing") {
    const EstimatorResult r = exp_average({kInf, 0.0});
    CHECK(r.value == Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("plain average") {
  const EstimatorResult r = mean_value({1.0, 2.0, 3.0});
  CHECK(r.value == Approx(2.0).epsilon(1e-14));
  CHECK(r.std_error == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(mean_value({kInf, 1.0}).value == kInf);
  CHECK(mean_value({1.0, 3.0}, {0.5, 0.5}).value == Approx(2.0).epsilon(1e-14));
}
