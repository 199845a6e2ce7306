// Command-line front end: one subcommand per solver plus table regeneration.
// Exit codes: 0 success, 2 input error, 3 solver-declared divergence (the
// partial trace is still written).

#include "mm/discriminant.hpp"
#include "mm/grouped_exp.hpp"
#include "mm/imaging.hpp"
#include "mm/io.hpp"
#include "mm/mvt.hpp"
#include "mm/power_series.hpp"
#include "mm/random_graph.hpp"
#include "mm/tables.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;

struct SharedFlags {
  int max_iter = 500;
  double param_tol = 1e-8;
  double obj_tol = 0.0;
  std::string trace_out;
  bool step_double = false;

  mm::StoppingRule rule() const { return {max_iter, param_tol, obj_tol}; }
  mm::DriverOptions options() const { return {step_double}; }
};

void add_shared(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--max-iter", flags.max_iter, "iteration cap");
  cmd->add_option("--param-tol", flags.param_tol,
                  "stop when the sup-norm parameter change drops below this");
  cmd->add_option("--obj-tol", flags.obj_tol,
                  "stop when the objective change drops below this");
  cmd->add_option("--trace-out", flags.trace_out, "write the iteration trace CSV here");
  cmd->add_flag("--step-double", flags.step_double, "enable step-doubling acceleration");
}

void write_trace(const SharedFlags& flags, const mm::IterationTrace& trace) {
  if (flags.trace_out.empty()) return;
  std::ofstream f(flags.trace_out);
  if (!f) throw std::invalid_argument("cannot open " + flags.trace_out);
  trace.write_csv(f);
}

std::string g10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

int finish_run(const SharedFlags& flags, const mm::IterationTrace& trace,
               const mm::ConvergenceReport& report) {
  write_trace(flags, trace);
  if (report.status == mm::RunStatus::Diverged) {
    std::cerr << "diverged: " << report.message << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}

mm::VectorXd parse_list(const std::string& csv, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad " + what + " entry: " + cell);
    }
  }
  if (vals.empty()) throw std::invalid_argument(what + " is empty");
  return Eigen::Map<mm::VectorXd>(vals.data(), static_cast<int>(vals.size()));
}

void print_fit_report(const mm::FitReport& report) {
  std::cout << "iterations," << report.iterations << '\n'
            << "objective," << g10(report.objective) << '\n'
            << "train_error," << g10(report.train_error) << '\n'
            << "seconds," << g10(report.seconds) << '\n'
            << "monotone," << (report.monotone ? 1 : 0) << '\n';
}

int run_mvt(const std::string& data_path, double nu, const std::string& variant,
            const std::string& out, const SharedFlags& flags) {
  mm::MvtSample sample{mm::read_matrix_csv_file(data_path)};
  const auto var = variant == "ktv" ? mm::MvtVariant::Ktv : mm::MvtVariant::Em;
  mm::MvtProblem problem(sample, nu, var);
  auto [trace, report] =
      mm::run_mm(problem, problem.pack(mm::mvt_init(sample, nu)), flags.rule(),
                 flags.options());
  const int code = finish_run(flags, trace, report);

  const mm::MvtParams params = problem.unpack(report.theta_final);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::invalid_argument("cannot open " + out);
    os = &file;
  }
  *os << "parameter,value\n";
  for (int j = 0; j < params.mu.size(); ++j)
    *os << "mu_" << j << ',' << g10(params.mu[j]) << '\n';
  for (int i = 0; i < params.omega.rows(); ++i)
    for (int j = 0; j <= i; ++j)
      *os << "omega_" << i << '_' << j << ',' << g10(params.omega(i, j)) << '\n';
  *os << "nu," << g10(params.nu) << '\n'
      << "loglik," << g10(mm::mvt_loglik(sample, params)) << '\n'
      << "iterations," << report.iterations << '\n';
  return code;
}

int run_grouped(const std::string& thresholds, const std::string& counts,
                double lambda0, const std::string& algo, const SharedFlags& flags) {
  mm::GroupedExpData data{parse_list(thresholds, "thresholds"),
                          parse_list(counts, "counts")};
  const auto which = algo == "em" ? mm::GroupedExpAlgo::Em : mm::GroupedExpAlgo::Mm;
  mm::GroupedExpProblem problem(data, which);
  mm::VectorXd theta0(1);
  theta0[0] = lambda0;
  auto [trace, report] = mm::run_mm(problem, theta0, flags.rule(), flags.options());
  std::cout << "n,lambda,L\n";
  for (const auto& s : trace.steps)
    std::cout << s.n << ',' << mm::format5(s.theta[0]) << ',' << mm::format5(s.f)
              << '\n';
  return finish_run(flags, trace, report);
}

int run_power_series(const std::string& family, double xbar, int m, double theta0,
                     const SharedFlags& flags) {
  mm::PowerSeriesProblem problem =
      mm::make_power_series_problem(family, {xbar, m});
  mm::VectorXd start(1);
  start[0] = theta0;
  auto [trace, report] = mm::run_mm(problem, start, flags.rule(), flags.options());
  std::cout << "n,theta,L\n";
  for (const auto& s : trace.steps)
    std::cout << s.n << ',' << mm::format5(s.theta[0]) << ',' << mm::format5(s.f)
              << '\n';
  return finish_run(flags, trace, report);
}

int run_graph(const std::string& edges_path, int nodes, int simulate,
              std::optional<std::uint64_t> seed, const std::string& out,
              const SharedFlags& flags) {
  mm::Graph graph;
  if (simulate > 0) {
    if (!seed) throw std::invalid_argument("--seed is required with --simulate");
    mm::VectorXd p_true(simulate);
    for (int i = 0; i < simulate; ++i) p_true[i] = (i + 0.5) / simulate;
    graph = mm::graph_simulate(p_true, *seed);
  } else if (!edges_path.empty()) {
    graph = mm::read_edge_list_file(edges_path, nodes);
  } else {
    throw std::invalid_argument("provide --edges or --simulate");
  }
  mm::GraphProblem problem(std::move(graph));
  auto [trace, report] =
      mm::run_mm(problem, mm::graph_init(problem.graph()), flags.rule(),
                 flags.options());
  const int code = finish_run(flags, trace, report);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw std::invalid_argument("cannot open " + out);
    os = &file;
  }
  mm::write_propensity_csv(*os, problem.graph(), report.theta_final);
  return code;
}

int run_hinge(const std::string& data_path, double lambda, const std::string& mode,
              bool standardize, const SharedFlags& flags) {
  const auto data = mm::read_labeled_csv_file(data_path, standardize);
  const auto hinge_mode =
      mode == "coordinate" ? mm::HingeMode::Coordinate : mm::HingeMode::FullWls;
  auto [model, report] = mm::hinge_mm_fit(data, lambda, hinge_mode, flags.rule());
  print_fit_report(report);
  std::cout << "alpha," << g10(model.alpha) << '\n';
  for (int j = 0; j < model.beta.size(); ++j)
    std::cout << "beta_" << j << ',' << g10(model.beta[j]) << '\n';
  return kExitOk;
}

int run_vda(const std::string& data_path, double lambda, double eps,
            bool standardize, const SharedFlags& flags) {
  const auto data = mm::read_labeled_csv_file(data_path, standardize);
  auto [model, report] = mm::vda_fit(data, lambda, eps, flags.rule());
  print_fit_report(report);
  for (int i = 0; i < model.coeffs.rows(); ++i) {
    std::cout << "b_" << i << ',' << g10(model.intercept[i]) << '\n';
    for (int j = 0; j < model.coeffs.cols(); ++j)
      std::cout << "a_" << i << '_' << j << ',' << g10(model.coeffs(i, j)) << '\n';
  }
  return kExitOk;
}

int run_restore(const std::string& input, const std::string& mask_path,
                const std::string& output, const mm::TVConfig& config,
                const SharedFlags& flags) {
  const mm::ImageGrid y = mm::read_pgm(input);
  mm::PixelMask mask = mask_path.empty()
                           ? mm::PixelMask::full(y.height(), y.width())
                           : mm::read_mask_pgm(mask_path);
  if (mask.accept.rows() != y.height() || mask.accept.cols() != y.width())
    throw std::invalid_argument("mask and image dimensions differ");
  auto [restored, trace] = mm::restore(y, mask, config);
  mm::write_pgm(output, restored);
  write_trace(flags, trace);
  std::cout << "sweeps," << trace.size() - 1 << '\n'
            << "objective," << g10(trace.back().f) << '\n';
  return kExitOk;
}

int run_tables(const std::string& which, const std::string& out_dir,
               std::optional<std::uint64_t> seed, int graph_nodes,
               const SharedFlags& flags) {
  const auto emit = [&](const std::string& name, auto writer) {
    const std::string path = out_dir + "/" + name;
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open " + path);
    writer(f);
    std::cout << "wrote " << path << '\n';
  };
  const bool all = which == "all";
  if (all || which == "1") emit("table1.csv", mm::write_table1_csv);
  if (all || which == "2") emit("table2.csv", mm::write_table2_csv);
  if (all || which == "3") emit("table3.csv", mm::write_table3_csv);
  if (all || which == "4") {
    if (!seed)
      throw std::invalid_argument("--seed is required for the graph experiment");
    const auto ex = mm::run_graph_experiment(graph_nodes, *seed, flags.rule());
    emit("graph_experiment.csv", [&](std::ostream& os) {
      mm::write_graph_experiment_csv(os, ex);
    });
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MM optimization toolkit"};
  app.require_subcommand(1);

  SharedFlags flags;
  std::optional<std::uint64_t> seed;

  // mvt
  std::string mvt_data, mvt_variant = "em", mvt_out;
  double mvt_nu = 1.0;
  auto* mvt = app.add_subcommand("mvt", "multivariate-t location/scale fit");
  mvt->add_option("--data", mvt_data, "observation CSV, one row per case")->required();
  mvt->add_option("--nu", mvt_nu, "degrees of freedom (fixed)");
  mvt->add_option("--variant", mvt_variant, "em or ktv")
      ->check(CLI::IsMember({"em", "ktv"}));
  mvt->add_option("--out", mvt_out, "fitted-parameter CSV path");
  add_shared(mvt, flags);

  // grouped-exp
  std::string ge_thresholds, ge_counts, ge_algo = "mm";
  double ge_lambda0 = 1.0;
  auto* ge = app.add_subcommand("grouped-exp", "grouped exponential intensity fit");
  ge->add_option("--thresholds", ge_thresholds, "comma-separated interval endpoints")
      ->required();
  ge->add_option("--counts", ge_counts, "comma-separated counts (or proportions)")
      ->required();
  ge->add_option("--lambda0", ge_lambda0, "starting intensity");
  ge->add_option("--algo", ge_algo, "mm or em")->check(CLI::IsMember({"mm", "em"}));
  add_shared(ge, flags);

  // power-series
  std::string ps_family;
  double ps_xbar = 0.0, ps_theta0 = 0.0;
  int ps_m = 0;
  auto* ps = app.add_subcommand("power-series", "power-series MLE iteration");
  ps->add_option("--family", ps_family, "trunc-poisson, geometric or logarithmic")
      ->required()
      ->check(CLI::IsMember({"trunc-poisson", "geometric", "logarithmic"}));
  ps->add_option("--xbar", ps_xbar, "sample mean")->required();
  ps->add_option("--m", ps_m, "sample size")->required();
  ps->add_option("--theta0", ps_theta0, "starting value")->required();
  add_shared(ps, flags);

  // graph
  std::string gr_edges, gr_out;
  int gr_nodes = -1, gr_simulate = 0;
  auto* gr = app.add_subcommand("graph", "random-graph propensity fit");
  gr->add_option("--edges", gr_edges, "edge-list file, one 'i j' pair per line");
  gr->add_option("--nodes", gr_nodes, "node count (default: max index + 1)");
  gr->add_option("--simulate", gr_simulate,
                 "simulate this many nodes with p_i=(i-1/2)/m instead of reading edges");
  gr->add_option("--seed", seed, "RNG seed (required when simulating)");
  gr->add_option("--out", gr_out, "propensity CSV path");
  add_shared(gr, flags);

  // hinge
  std::string hg_data, hg_mode = "full-wls";
  double hg_lambda = 1e-2;
  bool hg_standardize = false;
  auto* hg = app.add_subcommand("hinge", "binary hinge-loss classifier");
  hg->add_option("--data", hg_data, "CSV, features then a -1/+1 label column")
      ->required();
  hg->add_option("--lambda", hg_lambda, "ridge penalty");
  hg->add_option("--mode", hg_mode, "full-wls or coordinate")
      ->check(CLI::IsMember({"full-wls", "coordinate"}));
  hg->add_flag("--standardize", hg_standardize, "z-score feature columns");
  add_shared(hg, flags);

  // vda
  std::string vd_data;
  double vd_lambda = 1e-2, vd_eps = -1.0;
  bool vd_standardize = false;
  auto* vd = app.add_subcommand("vda", "vertex discriminant analysis");
  vd->add_option("--data", vd_data, "CSV, features then a 1..k+1 label column")
      ->required();
  vd->add_option("--lambda", vd_lambda, "ridge penalty");
  vd->add_option("--eps", vd_eps,
                 "insensitivity radius (default: just below the overlap cutoff)");
  vd->add_flag("--standardize", vd_standardize, "z-score feature columns");
  add_shared(vd, flags);

  // restore
  std::string rs_input, rs_mask, rs_output;
  mm::TVConfig tv;
  auto* rs = app.add_subcommand("restore", "TV denoising / inpainting");
  rs->add_option("--input", rs_input, "noisy image (binary PGM)")->required();
  rs->add_option("--mask", rs_mask, "mask PGM, 0 = excluded pixel");
  rs->add_option("--output", rs_output, "restored PGM path")->required();
  rs->add_option("--lambda", tv.lambda, "roughness weight");
  rs->add_option("--eps", tv.eps, "TV smoothing constant");
  rs->add_option("--sweeps", tv.sweeps, "maximum checkerboard sweeps");
  add_shared(rs, flags);

  // tables
  std::string tb_which = "all", tb_out_dir = ".";
  int tb_graph_nodes = 500;
  auto* tb = app.add_subcommand("tables", "regenerate the reference tables");
  tb->add_option("--which", tb_which, "1, 2, 3, 4 (graph experiment) or all")
      ->check(CLI::IsMember({"1", "2", "3", "4", "all"}));
  tb->add_option("--out-dir", tb_out_dir, "output directory");
  tb->add_option("--seed", seed, "RNG seed for the graph experiment");
  tb->add_option("--graph-nodes", tb_graph_nodes, "graph experiment size");
  add_shared(tb, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*mvt) return run_mvt(mvt_data, mvt_nu, mvt_variant, mvt_out, flags);
    if (*ge) return run_grouped(ge_thresholds, ge_counts, ge_lambda0, ge_algo, flags);
    if (*ps) return run_power_series(ps_family, ps_xbar, ps_m, ps_theta0, flags);
    if (*gr) return run_graph(gr_edges, gr_nodes, gr_simulate, seed, gr_out, flags);
    if (*hg) return run_hinge(hg_data, hg_lambda, hg_mode, hg_standardize, flags);
    if (*vd) {
      if (vd_eps < 0.0) {
        // default just below the k-dependent overlap cutoff
        const auto data = mm::read_labeled_csv_file(vd_data, vd_standardize);
        const int k = data.validate_multicategory() - 1;
        vd_eps = 0.9999 * 0.5 * std::sqrt((2.0 * k + 2.0) / k);
      }
      return run_vda(vd_data, vd_lambda, vd_eps, vd_standardize, flags);
    }
    if (*rs) return run_restore(rs_input, rs_mask, rs_output, tv, flags);
    if (*tb) return run_tables(tb_which, tb_out_dir, seed, tb_graph_nodes, flags);
  } catch (const mm::DomainError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
