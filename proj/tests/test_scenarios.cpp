#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "gpc/scenarios.hpp"
#include "oracles.hpp"

using gpc::BeyondSemigroupParams;
using gpc::ConstantIsotropicParams;
using gpc::ExpDecayParams;
using gpc::ScenarioSpec;
using gpc::UniformGrid;

TEST_CASE("all spectra start at the identity") {
  const gpc::ScenarioSpectra s1 = gpc::eval_constant_scenario(1.0, 2.0, 0.0);
  const gpc::ScenarioSpectra s2 = gpc::eval_expdecay_scenario(1.0, 1.0 / 3, 2.0, 3, 0, 0.0);
  const gpc::ScenarioSpectra s3 = gpc::eval_beyond_scenario(1.0 / 3, 2.0, 2, 0, 0.0);
  for (const auto* sp : {&s1, &s2, &s3})
    for (const auto* spec : {&sp->markov, &sp->noise, &sp->combined})
      for (double l : spec->lambdas) CHECK(l == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("constant scenario closed form") {
  // gamma=1, omega=2 at t=1.2 (independently computed references).
  const auto sp = gpc::eval_constant_scenario(1.0, 2.0, 1.2);
  CHECK(sp.combined.lambdas[0] == Catch::Approx(-0.47868430420128652).margin(1e-12));
  CHECK(sp.combined.lambdas[1] == sp.combined.lambdas[0]);
  CHECK(sp.combined.lambdas[2] == Catch::Approx(std::exp(-1.2)).margin(1e-15));
  CHECK(sp.noise.lambdas[0] == Catch::Approx(std::cos(2.4)).margin(1e-15));
  CHECK(sp.noise.lambdas[2] == 1.0);
  for (double l : sp.markov.lambdas) CHECK(l == Catch::Approx(std::exp(-1.2)).margin(1e-15));
}

TEST_CASE("closed forms match the partial-fraction oracle") {
  for (double t = 0.0; t <= 8.0; t += 0.37) {
    CHECK(gpc::eval_constant_scenario(1.0, 2.0, t).combined.lambdas[0] ==
          Catch::Approx(oracles::constant_combined(1.0, 2.0, t)).margin(1e-12));

    const auto e = gpc::eval_expdecay_scenario(1.0, 1.0 / 3, 2.0, 2, 0, t);
    CHECK(e.combined.lambdas[0] ==
          Catch::Approx(oracles::expdecay_combined(1.0, 1.0 / 3, 2.0, t)).margin(1e-12));
    CHECK(e.noise.lambdas[0] ==
          Catch::Approx(oracles::expdecay_noise(1.0 / 3, 2.0, t)).margin(1e-12));

    const auto b = gpc::eval_beyond_scenario(1.0 / 3, 2.0, 2, 0, t);
    CHECK(b.combined.lambdas[0] ==
          Catch::Approx(oracles::beyond_combined(1.0 / 3, 2.0, 2, t)).margin(1e-12));
    CHECK(b.noise.lambdas[0] ==
          Catch::Approx(oracles::beyond_noise(1.0 / 3, 2.0, 2, t)).margin(1e-12));
    CHECK(b.markov.lambdas[0] ==
          Catch::Approx((1.0 + 2.0 * std::exp(-t / 3.0)) / 3.0).margin(1e-14));
  }
}

TEST_CASE("qutrit exponential-decay values near the cosine minimum") {
  const auto sp = gpc::eval_expdecay_scenario(0.6, 0.2, 0.95, 3, 0, 3.1544);
  for (int a = 0; a < 3; ++a)
    CHECK(sp.combined.lambdas[a] == Catch::Approx(-0.28964674183375022).margin(1e-12));
  CHECK(sp.combined.lambdas[3] == Catch::Approx(0.15067350525310743).margin(1e-12));
}

TEST_CASE("initial slope equals the delta weight") {
  const double h = 1e-6;
  auto slope = [h](auto eval) { return (eval(h) - eval(0.0)) / h; };

  CHECK(slope([](double t) {
          return gpc::eval_constant_scenario(1.0, 2.0, t).combined.lambdas[0];
        }) == Catch::Approx(-1.0).margin(1e-4));
  CHECK(slope([](double t) {
          return gpc::eval_expdecay_scenario(0.6, 0.2, 0.95, 3, 0, t).combined.lambdas[0];
        }) == Catch::Approx(-0.6).margin(1e-4));
  // Beyond-semigroup: delta weight is -d r/(d+1) on every alpha.
  CHECK(slope([](double t) {
          return gpc::eval_beyond_scenario(1.0 / 3, 2.0, 2, 0, t).combined.lambdas[0];
        }) == Catch::Approx(-2.0 / 9.0).margin(1e-4));
  CHECK(slope([](double t) {
          return gpc::eval_beyond_scenario(1.0 / 3, 2.0, 2, 0, t).combined.lambdas[2];
        }) == Catch::Approx(-2.0 / 9.0).margin(1e-4));
}

TEST_CASE("z -> gamma: noise solution flips the arctangent sign") {
  const double gamma = 1.0, omega = 2.0;
  const double p = std::sqrt(4 * omega * omega - gamma * gamma);
  for (double t = 0.1; t < 5.0; t += 0.7) {
    const double noise = gpc::eval_expdecay_scenario(gamma, gamma, omega, 2, 0, t)
                             .noise.lambdas[0];
    const double flipped = (2 * omega / p) * std::exp(-gamma * t / 2) *
                           std::cos(p * t / 2 - std::atan(gamma / p));
    CHECK(noise == Catch::Approx(flipped).margin(1e-12));
    const double combined = gpc::eval_constant_scenario(gamma, omega, t).combined.lambdas[0];
    CHECK(std::abs(noise - combined) > 1e-3);  // same envelope, different phase
  }
}

TEST_CASE("kernel eigenvalue split") {
  // Constant scenario: alpha = 3 carries only the local part.
  auto ks = gpc::kernel_eigenvalues(ScenarioSpec{ConstantIsotropicParams{1.0, 2.0}}, 0.7);
  CHECK(ks[2].delta_weight == -1.0);
  CHECK(ks[2].smooth == 0.0);
  CHECK(ks[0].smooth == -4.0);

  // Exponential decay at t = 0.
  ks = gpc::kernel_eigenvalues(ScenarioSpec{ExpDecayParams{1.0, 0.5, 2.0, 2, 0}}, 0.0);
  CHECK(ks[0].smooth == Catch::Approx(-4.0).margin(1e-15));
  CHECK(ks[2].smooth == 0.0);
  CHECK(ks[0].delta_weight == -1.0);

  // Beyond the semigroup: the Markov part itself has a smooth tail
  // (dr/(d+1)) * (r/(d+1)) e^{-rt/(d+1)}; for d=2, r=1/3 this is 2/81 at t=0.
  ks = gpc::kernel_eigenvalues(ScenarioSpec{BeyondSemigroupParams{1.0 / 3, 2.0, 2, 0}}, 0.0);
  CHECK(ks[2].delta_weight == Catch::Approx(-2.0 / 9).margin(1e-15));
  CHECK(ks[2].smooth == Catch::Approx(2.0 / 81).margin(1e-15));
  CHECK(ks[0].smooth == Catch::Approx(2.0 / 81 - 4.0).margin(1e-15));
}

TEST_CASE("kernel component splits integrate to the component solutions") {
  const ScenarioSpec spec{BeyondSemigroupParams{1.0 / 3, 2.0, 2, 0}};
  const UniformGrid grid(8.0, 8000);
  const auto markov_kernels = gpc::kernel_functions(spec, gpc::MapComponent::kMarkov);
  const auto noise_kernels = gpc::kernel_functions(spec, gpc::MapComponent::kNoise);

  // The noise-free index carries no noise kernel at all.
  CHECK(noise_kernels[2].delta_weight == 0.0);
  CHECK_FALSE(static_cast<bool>(noise_kernels[2].smooth));

  const auto markov_traj = gpc::solve_nakajima_zwanzig(markov_kernels[0], grid);
  const auto noise_traj = gpc::solve_nakajima_zwanzig(noise_kernels[0], grid);
  double err_markov = 0.0, err_noise = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto sp = gpc::eval_beyond_scenario(1.0 / 3, 2.0, 2, 0, grid.time(i));
    err_markov = std::max(err_markov, std::abs(markov_traj.values[i] - sp.markov.lambdas[0]));
    err_noise = std::max(err_noise, std::abs(noise_traj.values[i] - sp.noise.lambdas[0]));
  }
  CHECK(err_markov < 1e-4);
  CHECK(err_noise < 1e-4);
}

TEST_CASE("sufficient CP conditions: reference parameter sets") {
  // Constant isotropic, gamma=1, omega=2.
  auto suff = gpc::cp_sufficient(ScenarioSpec{ConstantIsotropicParams{1.0, 2.0}});
  CHECK(suff.combined.t_star == Catch::Approx(1.4918279477120165).margin(1e-10));
  CHECK(suff.combined.lhs == Catch::Approx(1.2913340754403496).margin(1e-10));
  CHECK(suff.combined.rhs == Catch::Approx(1.0327955589886445).margin(1e-10));
  CHECK(suff.combined.holds);
  CHECK_FALSE(suff.noise.has_value());

  // Exponential decay, gamma=1, z=1/3, omega=2, d=2.
  suff = gpc::cp_sufficient(ScenarioSpec{ExpDecayParams{1.0, 1.0 / 3, 2.0, 2, 0}});
  CHECK(suff.combined.lhs == Catch::Approx(2.0283702113484398).margin(1e-10));
  CHECK(suff.combined.rhs == Catch::Approx(3.3380033522809172).margin(1e-10));
  CHECK(suff.combined.holds);
  REQUIRE(suff.noise.has_value());
  CHECK(suff.noise->t_star == Catch::Approx(1.6181396991502591).margin(1e-10));
  CHECK(suff.noise->lhs == Catch::Approx(1.3095583590274244).margin(1e-10));
  CHECK(suff.noise->rhs == Catch::Approx(1.0034904120085089).margin(1e-10));
  CHECK(suff.noise->holds);

  // The qutrit parameter set: its own sufficient condition fails.
  suff = gpc::cp_sufficient(ScenarioSpec{ExpDecayParams{0.6, 0.2, 0.95, 3, 0}});
  CHECK(suff.combined.lhs == Catch::Approx(6.1375536834630868).margin(1e-9));
  CHECK(suff.combined.rhs == Catch::Approx(4.5958271401505895).margin(1e-9));
  CHECK_FALSE(suff.combined.holds);

  // Beyond the semigroup, r=1/3, omega=2, d=2.
  suff = gpc::cp_sufficient(ScenarioSpec{BeyondSemigroupParams{1.0 / 3, 2.0, 2, 0}});
  CHECK(suff.combined.lhs == Catch::Approx(1.5005826374272934).margin(1e-10));
  CHECK(suff.combined.rhs == Catch::Approx(1.6828048671080125).margin(1e-10));
  CHECK(suff.combined.t_star == Catch::Approx(1.5622966598642749).margin(1e-10));
  CHECK(suff.combined.holds);
}

TEST_CASE("scenario validation errors") {
  CHECK_THROWS_WITH(gpc::eval_constant_scenario(4.0, 1.0, 0.5),
                    Catch::Matchers::ContainsSubstring("gamma < 2*omega"));
  CHECK_THROWS_AS(gpc::eval_expdecay_scenario(5.0, 0.1, 1.0, 2, 0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(gpc::eval_expdecay_scenario(1.0, 0.1, 1.0, 2, 5, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(gpc::eval_beyond_scenario(3.0, 1.0, 2, 0, 0.5), std::invalid_argument);
  // 4 omega^2 > r^2 implies (d+1)^2 omega^2 > d r^2 (4d <= (d+1)^2), so the
  // second discriminant never fails alone; both are still enforced.
  CHECK_NOTHROW(gpc::validate_scenario(ScenarioSpec{BeyondSemigroupParams{1.9, 1.0, 8, 0}}));
}

TEST_CASE("kernel admissibility") {
  const UniformGrid grid(5.0, 500);
  const std::size_t n = grid.size();

  // ell == 0: identity evolution, everything passes.
  std::vector<std::vector<double>> ell(3, std::vector<double>(n, 0.0));
  auto rep = gpc::kernel_admissibility(ell, grid, 2);
  CHECK(rep.pass);

  // ell_alpha = gamma e^{-gamma t}: L = 1 - e^{-gamma t} in [0,1), sum below
  // d^2/(d-1) = 4; trapezoid integral tracks the analytic one.
  const double gamma = 0.8;
  for (auto& row : ell)
    for (std::size_t i = 0; i < n; ++i) row[i] = gamma * std::exp(-gamma * grid.time(i));
  rep = gpc::kernel_admissibility(ell, grid, 2);
  CHECK(rep.pass);
  for (std::size_t i = 0; i < n; i += 50)
    CHECK(rep.integrated[0][i] ==
          Catch::Approx(1.0 - std::exp(-gamma * grid.time(i))).margin(1e-6));

  // One eigenvalue decaying alone violates d L_1 <= sum L immediately.
  ell.assign(3, std::vector<double>(n, 0.0));
  ell[0].assign(n, 1.0);
  rep = gpc::kernel_admissibility(ell, grid, 2);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.dominance_violation.has_value());
  CHECK(*rep.dominance_violation == Catch::Approx(grid.dt()).margin(1e-12));

  // Overshooting the total budget sum L <= 4 at t = 4/9.
  ell.assign(3, std::vector<double>(n, 3.0));
  rep = gpc::kernel_admissibility(ell, grid, 2);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.sum_bound_violation.has_value());
  CHECK(*rep.sum_bound_violation > 4.0 / 9.0 - 1e-9);
  CHECK(*rep.sum_bound_violation < 4.0 / 9.0 + 2.0 * grid.dt());

  // Negative integral.
  ell.assign(3, std::vector<double>(n, 0.0));
  ell[1].assign(n, -0.1);
  rep = gpc::kernel_admissibility(ell, grid, 2);
  CHECK_FALSE(rep.pass);
  CHECK(rep.nonneg_violation.has_value());
}

TEST_CASE("map kernel (null space) flags") {
  const UniformGrid grid(4.0, 4000);
  const std::size_t n = grid.size();
  std::vector<double> lam(n);

  for (std::size_t i = 0; i < n; ++i) lam[i] = std::exp(-grid.time(i));
  auto rep = gpc::kernel_nondecreasing_check(lam, grid, 1e-9);
  CHECK(rep.is_invertible);
  CHECK(rep.is_kernel_nondecreasing);
  CHECK(rep.zero_crossings.empty());

  for (std::size_t i = 0; i < n; ++i) lam[i] = std::cos(2.0 * grid.time(i));
  rep = gpc::kernel_nondecreasing_check(lam, grid, 1e-9);
  CHECK_FALSE(rep.is_invertible);
  CHECK_FALSE(rep.is_kernel_nondecreasing);
  REQUIRE(rep.zero_crossings.size() >= 2);
  CHECK(rep.zero_crossings[0] == Catch::Approx(std::numbers::pi / 4).margin(1e-6));
  CHECK(rep.zero_crossings[1] == Catch::Approx(3 * std::numbers::pi / 4).margin(1e-6));

  // Hits zero in finite time and stays there: non-invertible but the map
  // kernel never loses vectors.
  const UniformGrid grid3(3.0, 3000);
  lam.resize(grid3.size());
  for (std::size_t i = 0; i < grid3.size(); ++i)
    lam[i] = std::max(0.0, 1.0 - grid3.time(i));
  rep = gpc::kernel_nondecreasing_check(lam, grid3, 1e-9);
  CHECK_FALSE(rep.is_invertible);
  CHECK(rep.is_kernel_nondecreasing);
}
