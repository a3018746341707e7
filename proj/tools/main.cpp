#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weavemc/errors.hpp"
#include "weavemc/harness.hpp"
#include "weavemc/tune.hpp"

namespace {

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
  return grid;
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw weavemc::config_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weave-Metropolis sampler benchmark"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");

  // run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run a seeded sampling experiment");
  run->set_help_flag("--help", "print help");
  std::string config_path;
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "key = value configuration file");
  run->add_option("--set", overrides, "override entries, key=value");

  // trace --------------------------------------------------------------
  auto* trace = app.add_subcommand("trace", "dump a weave trajectory as CSV");
  trace->set_help_flag("--help", "print help");
  std::string trace_target = "student_t(d=2,nu=3)";
  double trace_h = 0.1;
  int trace_steps = 40;
  std::uint64_t trace_seed = 1;
  std::string trace_out;
  trace->add_option("--target", trace_target, "target spec");
  trace->add_option("--h", trace_h, "circle angle per step");
  trace->add_option("--L", trace_steps, "number of weave steps");
  trace->add_option("--seed", trace_seed, "stream seed");
  trace->add_option("--out", trace_out, "output CSV (stdout when omitted)");

  // limit-check ----------------------------------------------------------
  auto* limit = app.add_subcommand("limit-check", "convergence table of the limit dynamics");
  limit->set_help_flag("--help", "print help");
  std::string limit_target = "student_t(d=2,nu=3)";
  std::string limit_grid = "0.2,0.1,0.05,0.025";
  double limit_T = 1.0, limit_dt = 1e-4;
  std::uint64_t limit_seed = 1;
  std::string limit_out;
  limit->add_option("--target", limit_target, "target spec");
  limit->add_option("--h-grid", limit_grid, "comma-separated step sizes");
  limit->add_option("--T", limit_T, "time horizon");
  limit->add_option("--dt", limit_dt, "integrator step");
  limit->add_option("--seed", limit_seed, "stream seed");
  limit->add_option("--out", limit_out, "output CSV (stdout when omitted)");

  // tune -----------------------------------------------------------------
  auto* tune = app.add_subcommand("tune", "tune a kernel to an acceptance-rate target");
  tune->set_help_flag("--help", "print help");
  std::string tune_target = "gaussian(d=10)";
  std::string tune_kernel = "rwm";
  double tune_ar = -1.0;
  int tune_leaps = 1;
  long tune_pretune = 100000;
  std::uint64_t tune_seed = 1;
  tune->add_option("--target", tune_target, "target spec");
  tune->add_option("--kernel", tune_kernel, "kernel name");
  tune->add_option("--ar", tune_ar, "target acceptance rate (default per kernel)");
  tune->add_option("--L", tune_leaps, "transforms per iteration");
  tune->add_option("--pretune-iters", tune_pretune, "adaptive pretune iterations");
  tune->add_option("--seed", tune_seed, "stream seed");

  // pretune ----------------------------------------------------------------
  auto* pretune = app.add_subcommand("pretune", "estimate location and scale adaptively");
  pretune->set_help_flag("--help", "print help");
  std::string pt_target = "gaussian(d=10)";
  long pt_iters = 100000;
  std::uint64_t pt_seed = 1;
  std::string pt_out;
  pretune->add_option("--target", pt_target, "target spec");
  pretune->add_option("--iters", pt_iters, "iterations");
  pretune->add_option("--seed", pt_seed, "stream seed");
  pretune->add_option("--out", pt_out, "output JSON (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      weavemc::ExperimentConfig config;
      if (!config_path.empty()) config = weavemc::parse_config_file(config_path);
      for (const auto& entry : overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
          throw weavemc::config_error("--set expects key=value, got '" + entry + "'");
        weavemc::apply_override(config, entry.substr(0, eq), entry.substr(eq + 1));
      }
      weavemc::ExperimentReport report = weavemc::run_experiment(config);
      if (config.out.empty()) {
        std::cout << report.csv();
      } else {
        weavemc::write_report(report);
      }
    } else if (trace->parsed()) {
      auto target = weavemc::build_target(trace_target, "", trace_seed);
      std::ostringstream buf;
      weavemc::run_trace(target, trace_h, trace_steps, trace_seed, buf);
      write_or_print(trace_out, buf.str());
    } else if (limit->parsed()) {
      auto target = weavemc::build_target(limit_target, "", limit_seed);
      std::ostringstream buf;
      weavemc::run_limit_check(target, parse_grid(limit_grid), limit_T, limit_dt, limit_seed,
                               buf);
      write_or_print(limit_out, buf.str());
    } else if (tune->parsed()) {
      auto target = weavemc::build_target(tune_target, "", tune_seed);
      weavemc::validate_kernel_target(tune_kernel, target);
      weavemc::Rng pre_rng(weavemc::seed_split(tune_seed, 7));
      weavemc::Preconditioner pre =
          weavemc::adaptive_pretune(*target.model, tune_pretune, pre_rng);
      weavemc::KernelSettings settings;
      auto kernel = weavemc::make_kernel(tune_kernel, *target.model, pre, settings);
      weavemc::Rng tune_rng(weavemc::seed_split(tune_seed, 8));
      const double ar =
          tune_ar > 0 ? tune_ar : weavemc::default_acceptance_target(tune_kernel);
      auto result =
          weavemc::tune_acceptance(*kernel, pre.sample_gaussian(tune_rng), ar, 0.05, tune_rng);
      std::cout << "kernel,param,achieved_ar,bracketed\n"
                << tune_kernel << ',' << weavemc::format_double(result.param) << ','
                << weavemc::format_double(result.achieved_ar) << ','
                << (result.bracketed ? 1 : 0) << '\n';
    } else if (pretune->parsed()) {
      auto target = weavemc::build_target(pt_target, "", pt_seed);
      weavemc::Rng rng(weavemc::seed_split(pt_seed, 7));
      weavemc::Preconditioner pre = weavemc::adaptive_pretune(*target.model, pt_iters, rng);
      nlohmann::json j;
      j["center"] = std::vector<double>(pre.center.data(), pre.center.data() + pre.dim());
      j["scale"] = nlohmann::json::array();
      for (Eigen::Index i = 0; i < pre.dim(); ++i) {
        std::vector<double> row(static_cast<size_t>(pre.dim()));
        for (Eigen::Index k = 0; k < pre.dim(); ++k) row[static_cast<size_t>(k)] = pre.scale(i, k);
        j["scale"].push_back(row);
      }
      write_or_print(pt_out, j.dump(2) + "\n");
    }
  } catch (const weavemc::config_error& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  } catch (const weavemc::numeric_error& err) {
    std::cerr << "numerical failure: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 0;
}
