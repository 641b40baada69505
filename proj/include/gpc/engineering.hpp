#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gpc/capacity.hpp"
#include "gpc/channel.hpp"
#include "gpc/dynamics.hpp"
#include "gpc/grid.hpp"
#include "gpc/scenarios.hpp"

namespace gpc {

inline constexpr double kDefaultAdvantageTol = 1e-9;  // nats

// Capacity trajectory of one scenario: per grid point the Markov and
// combined spectra, their capacities (nats), the capacity advantage and the
// Fujiwara-Algoet margins of the combined map. For d > 2 a capacity entry is
// the single-letter lower bound whenever no exact pattern applies; the
// per-point flag records that. Capacity is NaN at points whose spectrum has
// left the domain of the capacity formula entirely (such maps are far from
// CP and the margins tell the story).
struct Trajectory {
  ScenarioSpec spec;
  UniformGrid grid;
  int d = 0;
  std::vector<ChannelSpectrum> markov;
  std::vector<ChannelSpectrum> combined;
  std::vector<double> capacity_markov;
  std::vector<double> capacity_combined;
  std::vector<double> advantage;
  std::vector<double> cp_lower_margin;
  std::vector<double> cp_upper_margin;
  std::vector<std::uint8_t> combined_is_bound;
};

namespace detail {

inline double capacity_or_nan(const ChannelSpectrum& s, bool* is_bound = nullptr) {
  try {
    const CapacityResult res = classify_and_compute(s);
    if (is_bound) *is_bound = res.kind == CapacityKind::kLowerBound && s.d > 2;
    return res.value;
  } catch (const std::domain_error&) {
    if (is_bound) *is_bound = false;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

inline Trajectory capacity_trajectory(const ScenarioSpec& spec, const UniformGrid& grid) {
  validate_scenario(spec);
  Trajectory traj;
  traj.spec = spec;
  traj.grid = grid;
  traj.d = scenario_dim(spec);
  const std::size_t n = grid.size();
  traj.markov.resize(n);
  traj.combined.resize(n);

  if (family_of(spec) == ScenarioFamily::kCustom) {
    // No closed form: integrate the full kernel per alpha. The Markovian
    // baseline is the delta part alone, run through the same solver so that
    // a noise-free kernel gives exactly zero advantage.
    const auto kernels = kernel_functions(spec, MapComponent::kCombined);
    std::vector<EigenTrajectory> solved(kernels.size()), baseline(kernels.size());
    for (std::size_t a = 0; a < kernels.size(); ++a) {
      solved[a] = solve_nakajima_zwanzig(kernels[a], grid);
      baseline[a] =
          solve_nakajima_zwanzig(KernelFunction{kernels[a].delta_weight, {}}, grid);
    }
    for (std::size_t i = 0; i < n; ++i) {
      traj.markov[i].d = traj.d;
      traj.combined[i].d = traj.d;
      traj.markov[i].lambdas.resize(kernels.size());
      traj.combined[i].lambdas.resize(kernels.size());
      for (std::size_t a = 0; a < kernels.size(); ++a) {
        traj.markov[i].lambdas[a] = baseline[a].values[i];
        traj.combined[i].lambdas[a] = solved[a].values[i];
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      ScenarioSpectra sp = eval_scenario(spec, grid.time(i));
      traj.markov[i] = std::move(sp.markov);
      traj.combined[i] = std::move(sp.combined);
    }
  }

  traj.capacity_markov.resize(n);
  traj.capacity_combined.resize(n);
  traj.advantage.resize(n);
  traj.cp_lower_margin.resize(n);
  traj.cp_upper_margin.resize(n);
  traj.combined_is_bound.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool bound = false;
    traj.capacity_markov[i] = detail::capacity_or_nan(traj.markov[i]);
    traj.capacity_combined[i] = detail::capacity_or_nan(traj.combined[i], &bound);
    traj.combined_is_bound[i] = bound ? 1 : 0;
    traj.advantage[i] = traj.capacity_combined[i] - traj.capacity_markov[i];
    const CpReport rep = check_cp(traj.combined[i]);
    traj.cp_lower_margin[i] = rep.lower_margin;
    traj.cp_upper_margin[i] = rep.upper_margin;
  }
  return traj;
}

// Earliest time at which the combined map violates the Fujiwara-Algoet
// conditions (either margin below -tol), or nullopt if it stays completely
// positive on the whole grid. The grid hit is refined to 1e-6 s by bisecting
// the closed-form margins; tabulated (custom) trajectories interpolate.
inline std::optional<double> full_cp_validation(const Trajectory& traj,
                                                double tol = kDefaultCpTol) {
  const std::size_t n = traj.grid.size();
  std::size_t hit = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::min(traj.cp_lower_margin[i], traj.cp_upper_margin[i]) < -tol) {
      hit = i;
      break;
    }
  }
  if (hit == n) return std::nullopt;
  if (hit == 0) return 0.0;

  const double margin_hit = std::min(traj.cp_lower_margin[hit], traj.cp_upper_margin[hit]);
  const double margin_prev =
      std::min(traj.cp_lower_margin[hit - 1], traj.cp_upper_margin[hit - 1]);
  if (family_of(traj.spec) == ScenarioFamily::kCustom) {
    const double f0 = margin_prev + tol, f1 = margin_hit + tol;
    return traj.grid.time(hit - 1) + traj.grid.dt() * f0 / (f0 - f1);
  }
  auto violated = [&](double t) {
    const ScenarioSpectra sp = eval_scenario(traj.spec, t);
    const CpReport rep = check_cp(sp.combined);
    return std::min(rep.lower_margin, rep.upper_margin) < -tol;
  };
  double lo = traj.grid.time(hit - 1), hi = traj.grid.time(hit);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (violated(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Time intervals on which the combined capacity exceeds the Markov baseline
// by more than tol, with linearly interpolated edges.
struct AdvantageReport {
  std::vector<std::pair<double, double>> windows;
  double max_advantage = 0.0;  // nats
  double t_at_max = 0.0;
  std::optional<double> first_cp_violation;
};

inline AdvantageReport advantage_windows(const Trajectory& traj,
                                         double tol = kDefaultAdvantageTol) {
  AdvantageReport rep;
  rep.first_cp_violation = full_cp_validation(traj);
  const std::size_t n = traj.grid.size();
  bool inside = false;
  double start = 0.0;
  auto cross_time = [&](std::size_t i) {
    const double f0 = traj.advantage[i] - tol, f1 = traj.advantage[i + 1] - tol;
    if (!std::isfinite(f0) || !std::isfinite(f1) || f0 == f1)
      return traj.grid.time(f1 > 0.0 ? i + 1 : i);
    return traj.grid.time(i) + traj.grid.dt() * f0 / (f0 - f1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double f = traj.advantage[i] - tol;
    const bool now = f > 0.0;  // NaN compares false
    if (now && !inside) {
      start = i == 0 ? traj.grid.time(0) : cross_time(i - 1);
      inside = true;
    } else if (!now && inside) {
      rep.windows.emplace_back(start, cross_time(i - 1));
      inside = false;
    }
    if (std::isfinite(traj.advantage[i]) && traj.advantage[i] > rep.max_advantage) {
      rep.max_advantage = traj.advantage[i];
      rep.t_at_max = traj.grid.time(i);
    }
  }
  if (inside) rep.windows.emplace_back(start, traj.grid.t_max);
  return rep;
}

// ---------------------------------------------------------------------------
// Composition of time-local generators: the no-gain property
// ---------------------------------------------------------------------------

// One sampled pair of tabulated rate sets: a Markovian part with nonnegative
// rates and a noise part whose rates may dip negative.
struct NoGainSample {
  std::vector<std::vector<double>> markov_rates;  // gamma^M_alpha(t_i) >= 0
  std::vector<std::vector<double>> noise_rates;   // mixed sign
};

struct NoGainResult {
  bool legitimate = false;  // noise map and summed map pass the CP check everywhere
  bool no_gain = true;
  double max_spectrum_excess = 0.0;  // max over alpha,t of lambda - lambda^M
  double max_capacity_excess = 0.0;  // max over t of C(combined) - C(markov)
};

// Checks that adding a noise generator to a Markovian one never raises the
// classical capacity: componentwise lambda = lambda^M lambda^N <= lambda^M
// and C(combined) <= C(markov) at every grid point. Only samples whose noise
// part is itself a legitimate evolution count; a noise generator that is not
// an evolution can trivially undo Markovian damping. The summed generator is
// checked too (it follows when both parts are legitimate).
inline NoGainResult no_gain_check(const NoGainSample& sample, const UniformGrid& grid, int d,
                                  double tol = kDefaultCpTol) {
  if (sample.markov_rates.size() != static_cast<std::size_t>(d) + 1 ||
      sample.noise_rates.size() != static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("no_gain_check: need d+1 rate rows per part");
  for (const auto& row : sample.markov_rates)
    for (double v : row)
      if (v < 0.0)
        throw std::invalid_argument("no_gain_check: Markov rates must be nonnegative");

  const auto gamma_m = cumulative_rate_integrals(sample.markov_rates, grid);
  const auto gamma_n = cumulative_rate_integrals(sample.noise_rates, grid);
  const std::size_t n = grid.size();
  const std::size_t m = gamma_m.size();

  NoGainResult res;
  res.legitimate = true;
  std::vector<double> at_point(m), summed(m);
  for (std::size_t i = 0; i < n && res.legitimate; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      at_point[a] = gamma_n[a][i];
      summed[a] = gamma_m[a][i] + gamma_n[a][i];
    }
    res.legitimate = timelocal_cp_check(at_point, d, tol) && timelocal_cp_check(summed, d, tol);
  }
  if (!res.legitimate) return res;

  const auto lam_m = timelocal_solve(sample.markov_rates, grid);
  const auto lam_n = timelocal_solve(sample.noise_rates, grid);
  for (std::size_t i = 0; i < n; ++i) {
    ChannelSpectrum markov{d, {}}, combined{d, {}};
    markov.lambdas.resize(m);
    combined.lambdas.resize(m);
    for (std::size_t a = 0; a < m; ++a) {
      markov.lambdas[a] = lam_m[a].values[i];
      combined.lambdas[a] = lam_m[a].values[i] * lam_n[a].values[i];
      res.max_spectrum_excess =
          std::max(res.max_spectrum_excess, combined.lambdas[a] - markov.lambdas[a]);
    }
    const double excess =
        classify_and_compute(combined).value - classify_and_compute(markov).value;
    res.max_capacity_excess = std::max(res.max_capacity_excess, excess);
  }
  res.no_gain = res.max_spectrum_excess <= tol && res.max_capacity_excess <= tol;
  return res;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
};

inline std::vector<double> range_values(const ParamRange& r) {
  if (r.count < 1) throw std::invalid_argument("ParamRange: count must be >= 1");
  if (r.count == 1) return {r.min};
  if (!(r.min <= r.max)) throw std::invalid_argument("ParamRange: min must be <= max");
  std::vector<double> out(r.count);
  for (int i = 0; i < r.count; ++i)
    out[i] = r.min + (r.max - r.min) * static_cast<double>(i) / (r.count - 1);
  return out;
}

struct SweepRequest {
  ScenarioFamily family = ScenarioFamily::kConstantIsotropic;
  int d = 2;
  int alpha_star = 0;  // 0 -> d+1
  ParamRange gamma, z, omega, r;
  UniformGrid grid;
  double advantage_tol = kDefaultAdvantageTol;
  double cp_tol = kDefaultCpTol;
};

struct SweepRow {
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double z = std::numeric_limits<double>::quiet_NaN();
  double omega = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();
  int d = 2;
  int alpha_star = 0;
  bool cp_sufficient_holds = false;
  double full_cp_ok_until = 0.0;  // first FA violation, or t_max when none
  double max_advantage = 0.0;
  double window_total_length = 0.0;
  bool bound_flag = false;  // some capacity entries were lower bounds (d > 2)
};

struct SweepSkip {
  std::string point;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSkip> skipped;
};

namespace detail {

inline ScenarioSpec spec_for_point(const SweepRequest& req, const SweepRow& pt) {
  switch (req.family) {
    case ScenarioFamily::kConstantIsotropic:
      return ConstantIsotropicParams{pt.gamma, pt.omega};
    case ScenarioFamily::kExpDecay:
      return ExpDecayParams{pt.gamma, pt.z, pt.omega, req.d, req.alpha_star};
    case ScenarioFamily::kBeyondSemigroup:
      return BeyondSemigroupParams{pt.r, pt.omega, req.d, req.alpha_star};
    default:
      throw std::invalid_argument("sweep: custom scenarios are not sweepable");
  }
}

inline std::string point_label(const ScenarioFamily family, const SweepRow& pt) {
  std::ostringstream os;
  os << family_name(family);
  if (!std::isnan(pt.gamma)) os << " gamma=" << pt.gamma;
  if (!std::isnan(pt.z)) os << " z=" << pt.z;
  if (!std::isnan(pt.omega)) os << " omega=" << pt.omega;
  if (!std::isnan(pt.r)) os << " r=" << pt.r;
  return os.str();
}

}  // namespace detail

// Evaluates one capacity trajectory per parameter point and condenses it to
// a SweepRow. Points violating the scenario invariants are skipped with a
// reason instead of failing the sweep; if nothing remains, that is an error.
// Points are independent work items: rows are keyed by iteration order, so
// the result does not depend on the parallelism degree.
inline SweepResult sweep(const SweepRequest& req, int jobs = 1) {
  std::vector<SweepRow> points;
  const bool has_gamma = req.family != ScenarioFamily::kBeyondSemigroup;
  const bool has_z = req.family == ScenarioFamily::kExpDecay;
  const bool has_r = req.family == ScenarioFamily::kBeyondSemigroup;
  const auto gammas = has_gamma ? range_values(req.gamma) : std::vector<double>{0.0};
  const auto zs = has_z ? range_values(req.z) : std::vector<double>{0.0};
  const auto omegas = range_values(req.omega);
  const auto rs = has_r ? range_values(req.r) : std::vector<double>{0.0};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double g : gammas)
    for (double z : zs)
      for (double w : omegas)
        for (double r : rs) {
          SweepRow pt;
          pt.gamma = has_gamma ? g : nan;
          pt.z = has_z ? z : nan;
          pt.omega = w;
          pt.r = has_r ? r : nan;
          pt.d = req.family == ScenarioFamily::kConstantIsotropic ? 2 : req.d;
          pt.alpha_star = resolved_alpha_star(req.alpha_star, pt.d);
          points.push_back(pt);
        }
  if (points.empty()) throw std::runtime_error("sweep: empty parameter grid");

  struct Outcome {
    bool ok = false;
    SweepRow row;
    std::string reason;
  };
  auto evaluate = [&req](SweepRow pt) {
    Outcome out;
    out.row = pt;
    try {
      const ScenarioSpec spec = detail::spec_for_point(req, pt);
      validate_scenario(spec);
      const Trajectory traj = capacity_trajectory(spec, req.grid);
      const AdvantageReport adv = advantage_windows(traj, req.advantage_tol);
      out.row.cp_sufficient_holds = cp_sufficient(spec).combined.holds;
      out.row.full_cp_ok_until =
          full_cp_validation(traj, req.cp_tol).value_or(req.grid.t_max);
      out.row.max_advantage = adv.max_advantage;
      out.row.window_total_length = 0.0;
      for (const auto& [a, b] : adv.windows) out.row.window_total_length += b - a;
      out.row.bound_flag =
          std::any_of(traj.combined_is_bound.begin(), traj.combined_is_bound.end(),
                      [](std::uint8_t b) { return b != 0; });
      out.ok = true;
    } catch (const std::exception& e) {
      out.reason = e.what();
    }
    return out;
  };

  std::vector<Outcome> outcomes(points.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) outcomes[i] = evaluate(points[i]);
  } else {
    std::vector<std::future<Outcome>> futures(points.size());
    std::size_t next = 0;
    while (next < points.size()) {
      const std::size_t batch = std::min<std::size_t>(jobs, points.size() - next);
      for (std::size_t j = 0; j < batch; ++j)
        futures[next + j] =
            std::async(std::launch::async, evaluate, points[next + j]);
      for (std::size_t j = 0; j < batch; ++j) outcomes[next + j] = futures[next + j].get();
      next += batch;
    }
  }

  SweepResult result;
  for (const auto& out : outcomes) {
    if (out.ok)
      result.rows.push_back(out.row);
    else
      result.skipped.push_back({detail::point_label(req.family, out.row), out.reason});
  }
  if (result.rows.empty()) {
    std::ostringstream os;
    os << "sweep: no valid parameter points;";
    for (const auto& s : result.skipped) os << " [" << s.point << ": " << s.reason << "]";
    throw std::runtime_error(os.str());
  }
  return result;
}

}  // namespace gpc
