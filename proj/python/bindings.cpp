#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nilflow/kam.hpp"
#include "nilflow/run.hpp"
#include "nilflow/spectrum.hpp"

namespace py = pybind11;
using namespace nilflow;

namespace {

ActionParams params(std::vector<double> alpha, std::vector<double> beta, double mu) {
  return {std::move(alpha), std::move(beta), mu, {}, {}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "nilflow core bindings";

  py::register_exception<Error>(m, "NilflowError", PyExc_RuntimeError);

  m.def(
      "execute",
      [](const std::string& subcommand, const std::vector<std::pair<std::string, std::string>>& keys) {
        const auto report = execute(parse_config("", subcommand, keys));
        return py::make_tuple(report.exit_code, report.csv_header, report.csv_rows, report.summary);
      },
      py::arg("subcommand"), py::arg("keys"),
      "Run a subcommand from key/value overrides. Returns (exit_code, header, rows, summary_json).");

  m.def("subcommands", &subcommand_names);

  m.def(
      "fit_witness",
      [](const std::vector<double>& a, double gamma, int K) {
        const auto w = fit_witness(a, gamma, K);
        py::dict d;
        d["C"] = w.C;
        d["gamma"] = w.gamma;
        d["K"] = w.K;
        d["argmin"] = w.argmin;
        d["divisor"] = w.divisor;
        d["valid"] = w.valid();
        return d;
      },
      py::arg("a"), py::arg("gamma") = 1.0, py::arg("K") = 100);

  m.def(
      "rep_spectrum",
      [](std::vector<double> alpha, std::vector<double> beta, int n, int M, double mu) {
        const auto s = rep_spectrum(params(std::move(alpha), std::move(beta), mu), n, M);
        return py::make_tuple(s.eigenvalues, s.trusted);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("M"), py::arg("mu") = 0.0,
      "Eigenvalues of the truncated leafwise Laplacian in representation n, and the trusted count.");

  m.def(
      "joint_kernel_dim",
      [](std::vector<double> alpha, std::vector<double> beta, int N, int M, int K, double tol) {
        return joint_kernel_dim(params(std::move(alpha), std::move(beta), 0.0), N, M, K, tol);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("N") = 20, py::arg("M") = 64, py::arg("K") = 20,
      py::arg("tol") = 1e-6);

  m.def(
      "kam",
      [](const std::vector<double>& omega, double eps, int K, double floor) {
        KamOptions opt;
        opt.K = K;
        opt.floor = floor;
        const auto out = kam_iterate(omega, sine_perturbation(static_cast<int>(omega.size()), eps), opt);
        py::dict d;
        d["converged"] = out.status == KamStatus::Converged;
        d["residuals"] = out.state.residual_r0;
        d["lambda_bar"] = out.state.lambda_bar;
        d["slope"] = out.quadratic_slope;
        d["conjugacy_error"] = out.conjugacy_error;
        return d;
      },
      py::arg("omega"), py::arg("eps") = 1e-3, py::arg("K") = 64, py::arg("floor") = 1e-12);
}
