#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "gpc/engineering.hpp"
#include "oracles.hpp"

using gpc::BeyondSemigroupParams;
using gpc::ConstantIsotropicParams;
using gpc::CustomKernelParams;
using gpc::ExpDecayParams;
using gpc::ScenarioSpec;
using gpc::Trajectory;
using gpc::UniformGrid;

namespace {

// Piecewise-constant random rate tables for the no-gain property.
std::vector<std::vector<double>> random_step_rates(int d, const UniformGrid& grid,
                                                   double lo, double hi,
                                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> draw(lo, hi);
  const int segments = 4;
  std::vector<std::vector<double>> rates(d + 1, std::vector<double>(grid.size()));
  for (auto& row : rates) {
    std::vector<double> levels(segments);
    for (double& l : levels) l = draw(rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const int seg = std::min<int>(segments - 1,
                                    static_cast<int>(grid.time(i) / grid.t_max * segments));
      row[i] = levels[seg];
    }
  }
  return rates;
}

}  // namespace

TEST_CASE("advantage starts at exactly zero") {
  const UniformGrid grid(5.0, 500);
  for (const ScenarioSpec& spec :
       {ScenarioSpec{ConstantIsotropicParams{1.0, 2.0}},
        ScenarioSpec{ExpDecayParams{1.0, 1.0 / 3, 2.0, 2, 0}},
        ScenarioSpec{BeyondSemigroupParams{1.0 / 3, 2.0, 2, 0}}}) {
    const Trajectory traj = gpc::capacity_trajectory(spec, grid);
    CHECK(traj.advantage[0] == 0.0);
    CHECK(traj.capacity_markov[0] == Catch::Approx(std::log(2.0)).margin(1e-15));
  }
}

TEST_CASE("constant scenario reproduces the advantage window") {
  const UniformGrid grid(5.0, 5000);
  const Trajectory traj =
      gpc::capacity_trajectory(ScenarioSpec{ConstantIsotropicParams{1.0, 2.0}}, grid);
  const gpc::AdvantageReport rep = gpc::advantage_windows(traj);

  REQUIRE_FALSE(rep.windows.empty());
  // First window boundaries located by |lambda_osc| = lambda_markov.
  CHECK(rep.windows[0].first == Catch::Approx(1.0040488486).margin(2e-3));
  CHECK(rep.windows[0].second == Catch::Approx(2.1269700169).margin(2e-3));
  CHECK(rep.max_advantage == Catch::Approx(0.1028935150).margin(1e-4));
  CHECK_FALSE(rep.first_cp_violation.has_value());

  // d=2: positive advantage exactly where |lambda_osc| exceeds the Markov
  // eigenvalue (the capacity is symmetric in the eigenvalue sign).
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double osc = std::abs(traj.combined[i].lambdas[0]);
    const double markov = traj.markov[i].lambdas[0];
    if (std::abs(osc - markov) > 1e-6)
      CHECK((traj.advantage[i] > 1e-12) == (osc > markov));
  }
}

TEST_CASE("markov capacity decays monotonically") {
  const UniformGrid grid(8.0, 800);
  for (const ScenarioSpec& spec :
       {ScenarioSpec{ConstantIsotropicParams{1.0, 2.0}},
        ScenarioSpec{ExpDecayParams{0.6, 0.2, 0.95, 3, 0}},
        ScenarioSpec{BeyondSemigroupParams{1.0 / 3, 2.0, 2, 0}}}) {
    const Trajectory traj = gpc::capacity_trajectory(spec, grid);
    for (std::size_t i = 1; i < grid.size(); ++i)
      CHECK(traj.capacity_markov[i] <= traj.capacity_markov[i - 1] + 1e-12);
  }
}

TEST_CASE("noise-free custom kernel gives identically zero advantage") {
  const UniformGrid grid(5.0, 500);
  CustomKernelParams params;
  params.d = 2;
  params.delta_weights = {-1.0, -1.0, -1.0};
  params.smooth = {nullptr, nullptr, nullptr};
  const Trajectory traj = gpc::capacity_trajectory(ScenarioSpec{params}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(traj.advantage[i] == 0.0);
    CHECK(traj.combined[i].lambdas[0] == traj.markov[i].lambdas[0]);
  }
  CHECK_FALSE(gpc::full_cp_validation(traj).has_value());  // semigroup stays CP

  // Vanishingly small noise: advantage within 1e-10 of zero.
  params.smooth = {[](double) { return -1e-12; }, [](double) { return -1e-12; }, nullptr};
  const Trajectory noisy = gpc::capacity_trajectory(ScenarioSpec{params}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(noisy.advantage[i]) < 1e-10);
}

TEST_CASE("qutrit trajectory surfaces the positivity breakdown") {
  const UniformGrid grid(10.0, 10000);
  const Trajectory traj =
      gpc::capacity_trajectory(ScenarioSpec{ExpDecayParams{0.6, 0.2, 0.95, 3, 0}}, grid);
  const gpc::AdvantageReport rep = gpc::advantage_windows(traj);

  REQUIRE_FALSE(rep.windows.empty());
  CHECK(rep.windows[0].first == Catch::Approx(2.1315167456).margin(5e-3));
  REQUIRE(rep.first_cp_violation.has_value());
  CHECK(*rep.first_cp_violation == Catch::Approx(2.1521882533).margin(1e-3));
  // Advantage opens slightly before the map stops being a channel.
  CHECK(rep.windows[0].first < *rep.first_cp_violation);
  // The value comparison is an honest lower bound at d=3.
  bool any_bound = false;
  for (auto b : traj.combined_is_bound) any_bound = any_bound || b;
  CHECK(any_bound);
}

TEST_CASE("synthetic advantage: sin(t) with zero tolerance") {
  const UniformGrid grid(2.0 * std::numbers::pi, 2000);
  Trajectory traj;
  traj.spec = ScenarioSpec{CustomKernelParams{2, {0, 0, 0}, {nullptr, nullptr, nullptr}}};
  traj.grid = grid;
  traj.d = 2;
  const std::size_t n = grid.size();
  traj.markov.assign(n, gpc::ChannelSpectrum{2, {1, 1, 1}});
  traj.combined.assign(n, gpc::ChannelSpectrum{2, {1, 1, 1}});
  traj.capacity_markov.assign(n, 0.0);
  traj.capacity_combined.assign(n, 0.0);
  traj.cp_lower_margin.assign(n, 1.0);
  traj.cp_upper_margin.assign(n, 1.0);
  traj.combined_is_bound.assign(n, 0);
  traj.advantage.resize(n);
  for (std::size_t i = 0; i < n; ++i) traj.advantage[i] = std::sin(grid.time(i));

  const gpc::AdvantageReport rep = gpc::advantage_windows(traj, 0.0);
  REQUIRE(rep.windows.size() == 1);
  CHECK(rep.windows[0].first == Catch::Approx(0.0).margin(1e-9));
  CHECK(rep.windows[0].second == Catch::Approx(std::numbers::pi).margin(1e-3));
  CHECK(rep.max_advantage == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("no-gain: zero noise means equality") {
  const UniformGrid grid(5.0, 200);
  gpc::NoGainSample sample;
  sample.markov_rates.assign(3, std::vector<double>(grid.size(), 0.3));
  sample.noise_rates.assign(3, std::vector<double>(grid.size(), 0.0));
  const auto res = gpc::no_gain_check(sample, grid, 2);
  CHECK(res.legitimate);
  CHECK(res.no_gain);
  CHECK(res.max_spectrum_excess == Catch::Approx(0.0).margin(1e-15));
  CHECK(res.max_capacity_excess == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("no-gain: a noise part that is not an evolution is filtered out") {
  // Negative constant rates make the summed generator perfectly Markovian,
  // yet the noise factor alone has eigenvalues above 1 and would fake a
  // capacity gain; the legitimacy filter must reject the sample.
  const UniformGrid grid(1.0, 100);
  gpc::NoGainSample sample;
  sample.markov_rates.assign(3, std::vector<double>(grid.size(), 0.25));
  sample.noise_rates = {std::vector<double>(grid.size(), 0.0),
                        std::vector<double>(grid.size(), -0.2),
                        std::vector<double>(grid.size(), -0.2)};
  const auto res = gpc::no_gain_check(sample, grid, 2);
  CHECK_FALSE(res.legitimate);
}

TEST_CASE("no-gain property on random legitimate samples") {
  const UniformGrid grid(5.0, 250);
  for (int d : {2, 3}) {
    CAPTURE(d);
    std::mt19937_64 rng(1000 + d);
    int accepted = 0, attempts = 0;
    while (accepted < 25 && attempts < 5000) {
      ++attempts;
      gpc::NoGainSample sample;
      sample.markov_rates = random_step_rates(d, grid, 0.0, 0.6, rng);
      sample.noise_rates = random_step_rates(d, grid, -0.25, 0.75, rng);
      const auto res = gpc::no_gain_check(sample, grid, d);
      if (!res.legitimate) continue;
      ++accepted;
      CHECK(res.no_gain);
      CHECK(res.max_spectrum_excess <= 1e-9);
      CHECK(res.max_capacity_excess <= 1e-9);
    }
    REQUIRE(accepted == 25);
  }
}

TEST_CASE("no-gain rejects negative Markov rates") {
  const UniformGrid grid(1.0, 10);
  gpc::NoGainSample sample;
  sample.markov_rates.assign(3, std::vector<double>(grid.size(), -0.1));
  sample.noise_rates.assign(3, std::vector<double>(grid.size(), 0.0));
  CHECK_THROWS_AS(gpc::no_gain_check(sample, grid, 2), std::invalid_argument);
}

TEST_CASE("sweep over the constant family") {
  gpc::SweepRequest req;
  req.family = gpc::ScenarioFamily::kConstantIsotropic;
  req.gamma = {0.5, 1.0, 2};
  req.omega = {1.0, 2.0, 2};
  req.grid = UniformGrid(5.0, 1000);
  const gpc::SweepResult result = gpc::sweep(req);
  REQUIRE(result.rows.size() == 4);
  CHECK(result.skipped.empty());
  bool found = false;
  for (const auto& row : result.rows)
    if (row.gamma == 1.0 && row.omega == 2.0) {
      found = true;
      CHECK(row.max_advantage > 0.05);
      CHECK(row.cp_sufficient_holds);
      CHECK(row.full_cp_ok_until == Catch::Approx(5.0));
      CHECK_FALSE(row.bound_flag);
    }
  CHECK(found);
}

TEST_CASE("sweep skips invalid points with reasons") {
  gpc::SweepRequest req;
  req.family = gpc::ScenarioFamily::kConstantIsotropic;
  req.gamma = {4.0, 4.0, 1};
  req.omega = {1.0, 2.5, 2};
  req.grid = UniformGrid(5.0, 500);
  const gpc::SweepResult result = gpc::sweep(req);
  REQUIRE(result.rows.size() == 1);  // gamma=4, omega=2.5 survives
  REQUIRE(result.skipped.size() == 1);
  CHECK_THAT(result.skipped[0].reason,
             Catch::Matchers::ContainsSubstring("gamma < 2*omega"));

  // Nothing valid at all: an error, with the reasons embedded.
  req.omega = {1.0, 1.0, 1};
  CHECK_THROWS_AS(gpc::sweep(req), std::runtime_error);
}

TEST_CASE("sweep rows are independent of the parallelism degree") {
  gpc::SweepRequest req;
  req.family = gpc::ScenarioFamily::kExpDecay;
  req.d = 2;
  req.gamma = {0.8, 1.2, 3};
  req.z = {1.0 / 3, 1.0 / 3, 1};
  req.omega = {1.5, 2.5, 2};
  req.grid = UniformGrid(5.0, 500);
  const auto serial = gpc::sweep(req, 1);
  const auto parallel = gpc::sweep(req, 4);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].gamma == parallel.rows[i].gamma);
    CHECK(serial.rows[i].omega == parallel.rows[i].omega);
    CHECK(serial.rows[i].max_advantage == parallel.rows[i].max_advantage);
    CHECK(serial.rows[i].full_cp_ok_until == parallel.rows[i].full_cp_ok_until);
    CHECK(serial.rows[i].window_total_length == parallel.rows[i].window_total_length);
  }
}

TEST_CASE("exp-decay sweep row matching the qubit reference point") {
  gpc::SweepRequest req;
  req.family = gpc::ScenarioFamily::kExpDecay;
  req.d = 2;
  req.gamma = {1.0, 1.0, 1};
  req.z = {1.0 / 3, 1.0 / 3, 1};
  req.omega = {2.0, 2.0, 1};
  req.grid = UniformGrid(10.0, 2000);
  const auto result = gpc::sweep(req);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].cp_sufficient_holds);
  CHECK(result.rows[0].max_advantage > 0.01);
  CHECK(result.rows[0].full_cp_ok_until == Catch::Approx(10.0));
}
