#include <chrono>
#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "weavemc/errors.hpp"

#include "weavemc/dataset.hpp"
#include "weavemc/diagnostics.hpp"
#include "weavemc/dynamics.hpp"
#include "weavemc/harness.hpp"
#include "weavemc/kernels.hpp"
#include "weavemc/targets.hpp"
#include "weavemc/transforms.hpp"
#include "weavemc/tune.hpp"

namespace py = pybind11;
using namespace weavemc;

namespace {

// Drives one chain of `iters` steps from x0 and returns the post-burn-in
// record; the workhorse behind the python API.
ChainRecord run_chain(const Kernel& kernel, const Eigen::VectorXd& x0, long iters, long burnin,
                      std::uint64_t seed) {
  if (burnin < 0 || burnin >= iters) throw config_error("run_chain: need 0 <= burnin < iters");
  KernelState state = kernel.init_state(x0, seed);
  ChainRecord record;
  record.draws.resize(iters - burnin, kernel.model().dim());
  record.log_like_leb.resize(iters - burnin);
  record.accept_flags.assign(static_cast<size_t>(iters - burnin), 0);
  const auto start = std::chrono::steady_clock::now();
  for (long it = 0; it < iters; ++it) {
    StepOutcome out = kernel.step(state);
    if (it >= burnin) {
      record.draws.row(it - burnin) = state.x.transpose();
      record.log_like_leb[it - burnin] = out.log_like_leb;
      record.accept_flags[static_cast<size_t>(it - burnin)] = out.accepted ? 1 : 0;
    }
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

KernelSettings settings_from(std::optional<double> h, std::optional<double> s, int leaps,
                             double jitter) {
  KernelSettings settings;
  settings.h = h;
  settings.s = s;
  settings.leaps = leaps;
  settings.jitter = jitter;
  return settings;
}

}  // namespace

PYBIND11_MODULE(_weavemc, m) {
  m.doc() = "Weave-Metropolis samplers, benchmark targets and diagnostics";

  py::register_exception<config_error>(m, "ConfigError");
  py::register_exception<numeric_error>(m, "NumericError");

  py::class_<PhasePoint>(m, "PhasePoint")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("x"), py::arg("v"))
      .def_readonly("x", &PhasePoint::x)
      .def_readonly("v", &PhasePoint::v)
      .def("norm", &PhasePoint::norm);

  py::class_<Preconditioner>(m, "Preconditioner")
      .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("center"), py::arg("scale"))
      .def_static("identity", &Preconditioner::identity)
      .def_readonly("center", &Preconditioner::center)
      .def_readonly("scale", &Preconditioner::scale)
      .def_readonly("factor", &Preconditioner::factor)
      .def("mahalanobis_sq", &Preconditioner::mahalanobis_sq);

  py::class_<TargetModel, std::shared_ptr<TargetModel>>(m, "TargetModel")
      .def("dim", &TargetModel::dim)
      .def("potential", &TargetModel::potential)
      .def("gradient", &TargetModel::gradient)
      .def("hessian_vec", &TargetModel::hessian_vec)
      .def("log_density", &TargetModel::log_density);

  m.def(
      "gaussian_target",
      [](Eigen::VectorXd mean, Eigen::MatrixXd cov) -> std::shared_ptr<TargetModel> {
        const Eigen::Index d = mean.size();
        return gaussian_target(d, std::move(mean), std::move(cov));
      },
      py::arg("mean"), py::arg("cov"));
  m.def(
      "student_t_target",
      [](double nu, Eigen::VectorXd mean, Eigen::MatrixXd scale) -> std::shared_ptr<TargetModel> {
        const Eigen::Index d = mean.size();
        return student_t_target(d, nu, std::move(mean), std::move(scale));
      },
      py::arg("nu"), py::arg("mean"), py::arg("scale"));
  m.def(
      "logistic_target",
      [](Eigen::MatrixXd features, const std::vector<std::string>& labels)
          -> std::shared_ptr<TargetModel> {
        return logistic_target(build_dataset(std::move(features), labels));
      },
      py::arg("features"), py::arg("labels"));
  m.def(
      "sv_target",
      [](Eigen::VectorXd y) -> std::shared_ptr<TargetModel> { return sv_target(std::move(y)); },
      py::arg("observations"));
  m.def(
      "sde_target",
      [](Eigen::MatrixXd path, double dt, Eigen::MatrixXd scale_v)
          -> std::shared_ptr<TargetModel> {
        return sde_target(std::move(path), dt, std::move(scale_v));
      },
      py::arg("path"), py::arg("dt"), py::arg("scale_v"));

  m.def("sv_simulate", &sv_simulate, py::arg("T"), py::arg("phi"), py::arg("sigma"),
        py::arg("seed"));
  m.def("sde_simulate", &sde_simulate, py::arg("d"), py::arg("n_steps"), py::arg("horizon"),
        py::arg("alpha_true"), py::arg("scale_v"), py::arg("seed"));
  m.def("wishart_scale", &wishart_scale, py::arg("d"), py::arg("df"), py::arg("seed"));
  m.def("seed_split", &seed_split, py::arg("master_seed"), py::arg("index"));

  // Deterministic transforms.
  m.def("flip", &flip);
  m.def("circle", &circle, py::arg("z"), py::arg("h"), py::arg("center"));
  m.def(
      "bounce",
      [](const PhasePoint& z, const Eigen::VectorXd& xi, const Eigen::VectorXd& center,
         const Eigen::MatrixXd& scale) { return bounce(z, xi, center, scale); },
      py::arg("z"), py::arg("xi"), py::arg("center"), py::arg("scale"));
  m.def(
      "weave",
      [](const PhasePoint& z, double h, int steps, const Preconditioner& pre,
         const TargetModel& model) {
        GradientFn grad = [&model](const Eigen::VectorXd& x) { return model.gradient(x); };
        return weave(z, h, steps, pre, grad);
      },
      py::arg("z"), py::arg("h"), py::arg("steps"), py::arg("pre"), py::arg("model"),
      "Iterated weave transform driven by the model's Lebesgue gradient");

  py::class_<ChainRecord>(m, "ChainRecord")
      .def_readonly("draws", &ChainRecord::draws)
      .def_readonly("log_like_leb", &ChainRecord::log_like_leb)
      .def_readonly("accept_flags", &ChainRecord::accept_flags)
      .def_readwrite("wall_seconds", &ChainRecord::wall_seconds);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("method", &RunSummary::method)
      .def_readonly("essl", &RunSummary::essl)
      .def_readonly("ess_min", &RunSummary::ess_min)
      .def_readonly("msjd", &RunSummary::msjd)
      .def_readonly("essl_per_s", &RunSummary::essl_per_s)
      .def_readonly("ess_min_per_s", &RunSummary::ess_min_per_s)
      .def_readonly("msjd_per_s", &RunSummary::msjd_per_s)
      .def_readonly("time_s", &RunSummary::time_s)
      .def_readonly("ar", &RunSummary::ar);

  m.def("ess", &ess, py::arg("series"));
  m.def("ess_min", &ess_min, py::arg("record"));
  m.def("essl", &essl, py::arg("record"));
  m.def("msjd", &msjd, py::arg("record"));
  m.def("mcse_mean", &mcse_mean, py::arg("series"));
  m.def("summarize", &summarize, py::arg("record"), py::arg("method"));
  m.def("summary_csv_row", &to_csv_row, py::arg("summary"));
  m.def("summary_csv_header", &run_summary_csv_header);

  py::class_<Kernel, std::shared_ptr<Kernel>>(m, "Kernel")
      .def_property_readonly("name", [](const Kernel& k) { return std::string(k.name()); })
      .def("tuned_param", &Kernel::tuned_param)
      .def("set_tuned_param", &Kernel::set_tuned_param);

  m.def(
      "make_kernel",
      [](const std::string& name, std::shared_ptr<TargetModel> model, const Preconditioner& pre,
         std::optional<double> h, std::optional<double> s, int leaps, double jitter) {
        auto kernel = make_kernel(name, *model, pre, settings_from(h, s, leaps, jitter));
        // keep the target alive alongside the kernel
        return std::shared_ptr<Kernel>(kernel.release(),
                                       [model](Kernel* k) mutable { delete k; });
      },
      py::arg("name"), py::arg("model"), py::arg("pre"), py::arg("h") = std::nullopt,
      py::arg("s") = std::nullopt, py::arg("leaps") = 1, py::arg("jitter") = 0.0);

  m.def("run_chain", &run_chain, py::arg("kernel"), py::arg("x0"), py::arg("iters"),
        py::arg("burnin"), py::arg("seed"),
        "Run one chain and return the post-burn-in record");

  m.def(
      "adaptive_pretune",
      [](std::shared_ptr<TargetModel> model, long iters, std::uint64_t seed) {
        Rng rng(seed);
        return adaptive_pretune(*model, iters, rng);
      },
      py::arg("model"), py::arg("iters"), py::arg("seed"));

  m.def(
      "tune_acceptance",
      [](Kernel& kernel, const Eigen::VectorXd& x0, double target_ar, double tol,
         std::uint64_t seed, int probe_iters) {
        Rng rng(seed);
        TuneResult r = tune_acceptance(kernel, x0, target_ar, tol, rng, probe_iters);
        return py::make_tuple(r.param, r.achieved_ar, r.bracketed);
      },
      py::arg("kernel"), py::arg("x0"), py::arg("target_ar"), py::arg("tol") = 0.05,
      py::arg("seed") = 1, py::arg("probe_iters") = 10000);

  m.def(
      "energy_drift",
      [](std::shared_ptr<TargetModel> model, const PhasePoint& z, double h) {
        return energy_drift(*model, z, h);
      },
      py::arg("model"), py::arg("z"), py::arg("h"));
  m.def(
      "compare_limit",
      [](std::shared_ptr<TargetModel> model, const PhasePoint& z0, double h, double T,
         double dt) {
        OdeRunReport r = compare_limit(*model, z0, h, T, dt);
        return py::make_tuple(r.sup_error, r.u_drift_max, r.tangency_max);
      },
      py::arg("model"), py::arg("z0"), py::arg("h"), py::arg("T"), py::arg("dt") = 1e-4,
      "Returns (sup_error, u_drift_max, tangency_max)");

  m.attr("__version__") = "0.1.0";
}
