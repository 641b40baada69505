// Command-line front-end: scenario simulation, parameter sweeps, kernel
// legitimacy validation and MUB self-checks. Exit codes: 0 success,
// 1 configuration error, 2 numerical/validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gpc/capacity.hpp"
#include "gpc/channel.hpp"
#include "gpc/engineering.hpp"
#include "gpc/io.hpp"
#include "gpc/mub.hpp"
#include "gpc/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

struct SimulateOptions {
  std::string scenario;
  std::optional<double> gamma, z, omega, r;
  int d = 2;
  int alpha_star = 0;
  double t_max = 0.0;
  std::size_t steps = 0;
  std::string out;
  std::string format = "csv";
  bool bits = false;
  double advantage_tol = gpc::kDefaultAdvantageTol;
  double cp_tol = gpc::kDefaultCpTol;
};

gpc::ScenarioSpec scenario_from_options(const SimulateOptions& opt) {
  const auto family = gpc::parse_family(opt.scenario);
  if (!family) throw std::invalid_argument("--scenario: unknown scenario '" + opt.scenario + "'");
  auto require = [](const std::optional<double>& v, const char* flag) {
    if (!v) throw std::invalid_argument(std::string(flag) + " is required for this scenario");
    return *v;
  };
  auto forbid = [](const std::optional<double>& v, const char* flag) {
    if (v) throw std::invalid_argument(std::string(flag) + " does not apply to this scenario");
  };
  switch (*family) {
    case gpc::ScenarioFamily::kConstantIsotropic:
      forbid(opt.z, "--z");
      forbid(opt.r, "--r");
      if (opt.d != 2)
        throw std::invalid_argument("--d: constant-isotropic is a qubit (d=2) scenario");
      return gpc::ConstantIsotropicParams{require(opt.gamma, "--gamma"),
                                          require(opt.omega, "--omega")};
    case gpc::ScenarioFamily::kExpDecay:
      forbid(opt.r, "--r");
      return gpc::ExpDecayParams{require(opt.gamma, "--gamma"), require(opt.z, "--z"),
                                 require(opt.omega, "--omega"), opt.d, opt.alpha_star};
    case gpc::ScenarioFamily::kBeyondSemigroup:
      forbid(opt.gamma, "--gamma");
      forbid(opt.z, "--z");
      return gpc::BeyondSemigroupParams{require(opt.r, "--r"), require(opt.omega, "--omega"),
                                        opt.d, opt.alpha_star};
    default:
      throw std::invalid_argument("--scenario: custom kernels are driven via 'validate'");
  }
}

int run_simulate(const SimulateOptions& opt) {
  const gpc::ScenarioSpec spec = scenario_from_options(opt);
  gpc::validate_scenario(spec);
  const gpc::UniformGrid grid(opt.t_max, opt.steps);
  const gpc::Trajectory traj = gpc::capacity_trajectory(spec, grid);
  const gpc::AdvantageReport adv = gpc::advantage_windows(traj, opt.advantage_tol);

  std::ofstream out(opt.out);
  if (!out) throw std::invalid_argument("--out: cannot open '" + opt.out + "' for writing");
  if (opt.format == "jsonl")
    gpc::write_trajectory_jsonl(out, traj, opt.bits);
  else
    gpc::write_trajectory_csv(out, traj, opt.bits);
  out.close();

  const double unit = opt.bits ? 1.0 / std::numbers::ln2 : 1.0;
  const char* unit_name = opt.bits ? "bits" : "nats";
  std::cout << "scenario: " << gpc::family_name(gpc::family_of(spec)) << " (d=" << traj.d
            << ")\n";
  const gpc::ScenarioCpSufficiency suff = gpc::cp_sufficient(spec);
  auto print_condition = [](const char* label, const gpc::CpSufficiencyReport& rep) {
    std::cout << label << ": t*=" << rep.t_star << "  lhs=" << rep.lhs
              << (rep.geq ? " >= " : " <= ") << "rhs=" << rep.rhs << "  -> "
              << (rep.holds ? "holds" : "NOT GUARANTEED") << "\n";
  };
  print_condition("cp_sufficient (combined map)", suff.combined);
  if (suff.noise) print_condition("cp_sufficient (noise map)", *suff.noise);
  if (adv.first_cp_violation)
    std::cout << "fujiwara-algoet violation: first at t=" << *adv.first_cp_violation << " s\n";
  else
    std::cout << "fujiwara-algoet violation: none on [0, " << grid.t_max << "]\n";
  std::cout << "advantage windows (>" << opt.advantage_tol << " " << unit_name << "):";
  if (adv.windows.empty()) std::cout << " none";
  for (const auto& [a, b] : adv.windows) std::cout << " [" << a << ", " << b << "]";
  std::cout << "\nmax advantage: " << adv.max_advantage * unit << " " << unit_name
            << " at t=" << adv.t_at_max << " s\n";
  std::cout << "wrote " << grid.size() << " rows to " << opt.out << "\n";
  return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& format, int jobs) {
  const gpc::SweepConfig cfg = gpc::parse_sweep_config_file(config_path);
  const gpc::SweepResult result = gpc::sweep(cfg.request, jobs);
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("--out: cannot open '" + out_path + "' for writing");
  if (format == "jsonl")
    gpc::write_sweep_jsonl(out, cfg.request, result);
  else
    gpc::write_sweep_csv(out, cfg.request, result);
  std::cout << "wrote " << result.rows.size() << " rows to " << out_path << "\n";
  if (!result.skipped.empty()) {
    std::cerr << "skipped " << result.skipped.size() << " point(s):\n";
    for (const auto& s : result.skipped)
      std::cerr << "  " << s.point << ": " << s.reason << "\n";
  }
  return kExitOk;
}

int run_validate(const std::string& ell_path, int d, double tol) {
  const gpc::EllTable table = gpc::read_ell_table_file(ell_path, d);
  const gpc::AdmissibilityReport rep = gpc::kernel_admissibility(table.ell, table.grid, d, tol);

  auto report_line = [](const char* label, const std::optional<double>& violation) {
    if (violation)
      std::cout << label << ": FAIL (first violation at t=" << *violation << " s)\n";
    else
      std::cout << label << ": pass\n";
  };
  report_line("condition L_alpha(t) >= 0", rep.nonneg_violation);
  report_line("condition d*L_alpha(t) <= sum_beta L_beta(t)", rep.dominance_violation);
  report_line("condition sum_beta L_beta(t) <= d^2/(d-1)", rep.sum_bound_violation);

  for (int a = 0; a <= d; ++a) {
    const gpc::MapKernelReport mk =
        gpc::kernel_nondecreasing_check(rep.lambdas[a], table.grid, 1e-9);
    std::cout << "lambda_" << a + 1 << ": invertible=" << (mk.is_invertible ? "yes" : "no")
              << " kernel_nondecreasing=" << (mk.is_kernel_nondecreasing ? "yes" : "no");
    if (!mk.zero_crossings.empty()) {
      std::cout << " zeros at";
      for (double t : mk.zero_crossings) std::cout << " " << t;
    }
    std::cout << "\n";
  }
  std::cout << "kernel admissibility: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? kExitOk : kExitValidation;
}

int run_mub_check(int d) {
  const gpc::MubFamily fam = gpc::build_mub_family(d);  // throws for non-prime d
  double ortho = 0.0, unbiased = 0.0, unitary = 0.0, trace_orth = 0.0;
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
  for (std::size_t a = 0; a < fam.bases.size(); ++a) {
    ortho = std::max(ortho,
                     ((fam.bases[a].adjoint() * fam.bases[a]) - eye).cwiseAbs().maxCoeff());
    for (std::size_t b = a + 1; b < fam.bases.size(); ++b) {
      const Eigen::MatrixXcd overlaps = fam.bases[a].adjoint() * fam.bases[b];
      unbiased =
          std::max(unbiased, (overlaps.cwiseAbs2().array() - 1.0 / d).abs().maxCoeff());
    }
  }
  for (const auto& row : fam.unitaries)
    for (const auto& u : row)
      unitary = std::max(unitary, ((u * u.adjoint()) - eye).cwiseAbs().maxCoeff());
  for (std::size_t a = 0; a < fam.unitaries.size(); ++a)
    for (int k = 1; k < d; ++k)
      for (std::size_t b = 0; b < fam.unitaries.size(); ++b)
        for (int l = 1; l < d; ++l) {
          const std::complex<double> tr =
              (fam.unitaries[a][k].adjoint() * fam.unitaries[b][l]).trace();
          const double expected = (a == b && k == l) ? double(d) : 0.0;
          trace_orth = std::max(trace_orth, std::abs(tr - expected));
        }

  // Eigenaction residual for a fixed, reproducible probability vector.
  gpc::ProbabilityVector p;
  p.d = d;
  p.probs.assign(d + 2, 0.0);
  double sum = 0.0;
  for (int a = 0; a <= d + 1; ++a) sum += (p.probs[a] = 1.0 + a);
  for (double& v : p.probs) v /= sum;
  const double eigenaction = gpc::verify_eigenaction(p, fam);

  std::printf("orthonormality max deviation : %.3e\n", ortho);
  std::printf("unbiasedness max deviation   : %.3e\n", unbiased);
  std::printf("unitarity max deviation      : %.3e\n", unitary);
  std::printf("trace orthogonality deviation: %.3e\n", trace_orth);
  std::printf("eigenaction residual         : %.3e\n", eigenaction);
  const double worst =
      std::max({ortho, unbiased, unitary, trace_orth, eigenaction});
  std::printf("mub-check d=%d: %s\n", d, worst < 1e-10 ? "PASS" : "FAIL");
  return worst < 1e-10 ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Pauli channel dynamics: capacity trajectories, parameter sweeps "
               "and kernel legitimacy checks"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Evaluate one scenario and write the capacity trajectory CSV");
  simulate->add_option("--scenario", sim.scenario,
                       "constant-isotropic | exp-decay | beyond-semigroup")->required();
  simulate->add_option("--gamma", sim.gamma, "semigroup rate (1/s)");
  simulate->add_option("--z", sim.z, "noise kernel decay rate (1/s)");
  simulate->add_option("--omega", sim.omega, "noise kernel frequency (1/s)");
  simulate->add_option("--r", sim.r, "time-local Markov rate scale (1/s)");
  simulate->add_option("--d", sim.d, "Hilbert space dimension (prime)");
  simulate->add_option("--alpha-star", sim.alpha_star,
                       "1-based index of the noise-free eigenvalue (default d+1)");
  simulate->add_option("--t-max", sim.t_max, "simulated time span (s)")->required();
  simulate->add_option("--steps", sim.steps, "number of grid steps (>= 2)")->required();
  simulate->add_option("--out", sim.out, "output file path")->required();
  simulate->add_option("--format", sim.format, "output format: csv (default) or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  simulate->add_flag("--bits", sim.bits, "report capacities in bits instead of nats");
  simulate->add_option("--advantage-tol", sim.advantage_tol, "advantage window tolerance");
  simulate->add_option("--cp-tol", sim.cp_tol, "complete-positivity margin tolerance");

  std::string sweep_config, sweep_out, sweep_format = "csv";
  int sweep_jobs = 1;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  sweep_cmd->add_option("--config", sweep_config, "key=value or .json config file")->required();
  sweep_cmd->add_option("--out", sweep_out, "output file path")->required();
  sweep_cmd->add_option("--format", sweep_format, "output format: csv (default) or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel worker count")
      ->check(CLI::PositiveNumber);

  std::string ell_path;
  int validate_d = 2;
  double validate_tol = gpc::kDefaultCpTol;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Check memory-kernel legitimacy for a tabulated ell table");
  validate_cmd->add_option("--ell", ell_path, "CSV table: t, ell_1..ell_{d+1}")->required();
  validate_cmd->add_option("--d", validate_d, "Hilbert space dimension")->required();
  validate_cmd->add_option("--tol", validate_tol, "margin tolerance");

  int mub_d = 2;
  CLI::App* mub_cmd = app.add_subcommand("mub-check", "Self-check the MUB construction");
  mub_cmd->add_option("--d", mub_d, "Hilbert space dimension (prime)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep_cmd->parsed()) return run_sweep(sweep_config, sweep_out, sweep_format, sweep_jobs);
    if (validate_cmd->parsed()) return run_validate(ell_path, validate_d, validate_tol);
    if (mub_cmd->parsed()) return run_mub_check(mub_d);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitConfig;
}
