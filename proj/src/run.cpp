#include "nilflow/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nilflow/corpus.hpp"
#include "nilflow/kam.hpp"
#include "nilflow/parallel.hpp"
#include "nilflow/spectrum.hpp"

namespace nilflow {

namespace {

using json = nlohmann::json;

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string num(int x) { return std::to_string(x); }

std::string join(const std::vector<int>& v, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

/// NaN and infinities become null.
json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

Rational parse_rational(const std::string& token) {
  if (const auto slash = token.find('/'); slash != std::string::npos) {
    const Rational den = parse_rational(token.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::TypeError, "zero denominator in '" + token + "'");
    return parse_rational(token.substr(0, slash)) / den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (i < token.size() && (token[i] == '+' || token[i] == '-')) negative = token[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool any = false;
  bool point = false;
  for (; i < token.size(); ++i) {
    const char c = token[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (point) ++scale;
      any = true;
    } else if (c == '.' && !point) {
      point = true;
    } else {
      break;
    }
  }
  long exponent = 0;
  if (i < token.size() && (token[i] == 'e' || token[i] == 'E')) {
    std::size_t used = 0;
    try {
      exponent = std::stol(token.substr(i + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) any = false;
    i += 1 + used;
  }
  if (!any || i != token.size()) throw Error(ErrorCode::TypeError, "not an exact number: '" + token + "'");
  exponent -= scale;
  Rational value(digits);
  const boost::multiprecision::cpp_int ten_power = boost::multiprecision::pow(
      boost::multiprecision::cpp_int(10), static_cast<unsigned>(std::abs(exponent)));
  value = exponent >= 0 ? value * Rational(ten_power) : value / Rational(ten_power);
  return negative ? -value : value;
}

ActionParams action_params(const ExperimentConfig& c) {
  ActionParams p;
  p.alpha = c.get_reals("alpha");
  p.beta = c.get_reals("beta");
  p.mu = c.get_real("mu");
  return p;
}

int as_int(const ExperimentConfig& c, const std::string& key) {
  const long long v = c.get_int(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::InvalidArgument, key + " out of range");
  }
  return static_cast<int>(v);
}

int positive(const ExperimentConfig& c, const std::string& key) {
  const int v = as_int(c, key);
  if (v < 1) throw Error(ErrorCode::InvalidArgument, key + " must be positive");
  return v;
}

json base_summary(const ExperimentConfig& c) { return json{{"subcommand", c.subcommand}}; }

void finish(RunReport& r, json summary, bool positive_verdict) {
  r.exit_code = positive_verdict ? kExitOk : kExitNegative;
  summary["status"] = positive_verdict ? "ok" : "negative";
  r.summary = summary.dump();
}

RunReport run_witness(const ExperimentConfig& c) {
  const auto alpha = c.get_reals("alpha");
  const double gamma = c.get_real("gamma");
  const int K = positive(c, "K");
  const auto& kind = c.get_text("kind");
  DiophantineWitness w;
  if (kind == "linear-form") {
    w = fit_witness(alpha, gamma, K);
  } else if (kind == "simultaneous") {
    w = simultaneous_witness({alpha}, gamma, K);
  } else {
    throw Error(ErrorCode::InvalidArgument, "kind must be linear-form or simultaneous");
  }
  RunReport r;
  r.csv_header = {"kind", "C", "gamma", "K", "argmin", "divisor"};
  r.csv_rows.push_back({to_string(w.kind), num(w.C), num(w.gamma), num(w.K), join(w.argmin), num(w.divisor)});
  json s = base_summary(c);
  s.update({{"kind", to_string(w.kind)}, {"C", real(w.C)}, {"gamma", w.gamma}, {"K", w.K},
            {"argmin", w.argmin}, {"divisor", real(w.divisor)}, {"valid", w.valid()}});
  finish(r, s, w.valid());
  return r;
}

RunReport run_solve_coboundary(const ExperimentConfig& c) {
  const ActionParams params = action_params(c);
  const Truncation t{positive(c, "K"), positive(c, "N"), positive(c, "M")};
  const int samples = positive(c, "samples");
  SolverOptions opt;
  opt.tol = c.get_real("tol");
  opt.r = c.get_real("r");
  const Witnesses w = fit_witnesses(params);
  Rng rng(static_cast<std::uint64_t>(c.get_int("seed")));
  std::vector<NilFunction> inputs;
  for (int i = 0; i < samples; ++i) inputs.push_back(random_nil_function(rng, t, c.get_real("decay"), true));
  std::vector<double> error(samples), ratio(samples);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const auto res = delta0_star(params, delta0(params, inputs[i]), w, opt);
    error[i] = max_abs_difference(res.h, inputs[i]) / max_abs(inputs[i]);
    ratio[i] = res.tame_ratio;
  });
  RunReport r;
  r.csv_header = {"sample", "relative_error", "tame_ratio"};
  double worst = 0.0, worst_ratio = 0.0;
  for (int i = 0; i < samples; ++i) {
    r.csv_rows.push_back({num(i), num(error[i]), num(ratio[i])});
    worst = std::max(worst, error[i]);
    worst_ratio = std::max(worst_ratio, ratio[i]);
  }
  json s = base_summary(c);
  s.update({{"samples", samples}, {"max_relative_error", worst}, {"max_tame_ratio", worst_ratio},
            {"sigma", w.sigma}, {"tolerance", 1e-10}});
  finish(r, s, worst <= 1e-10);
  return r;
}

RunReport run_split(const ExperimentConfig& c) {
  const ActionParams params = action_params(c);
  const Truncation fine{positive(c, "K"), positive(c, "N"), positive(c, "M")};
  const Truncation coarse{std::max(1, fine.K / 2), std::max(1, fine.N / 2), std::max(1, fine.M / 2)};
  const int samples = positive(c, "samples");
  const auto& method = c.get_text("method");
  if (method != "direct" && method != "laplacian") {
    throw Error(ErrorCode::InvalidArgument, "method must be direct or laplacian");
  }
  SolverOptions opt;
  opt.tol = c.get_real("tol");
  opt.r = c.get_real("r");
  const Witnesses w = fit_witnesses(params);
  Rng rng(static_cast<std::uint64_t>(c.get_int("seed")));
  std::vector<Cochain1> inputs;
  for (int i = 0; i < samples; ++i) inputs.push_back(random_cochain(rng, fine, c.get_real("decay")));

  struct Row {
    double error, ratio_H, ratio_err;
  };
  std::vector<Row> rows(2 * static_cast<std::size_t>(samples));
  parallel_for(rows.size(), [&](std::size_t k) {
    const bool is_fine = k % 2 == 1;
    const Cochain1 omega = is_fine ? inputs[k / 2] : restrict_to(inputs[k / 2], coarse);
    const auto split = method == "direct" ? delta1_star_split(params, omega, w, opt)
                                          : laplacian_split(params, omega, w, opt);
    rows[k] = {reconstruction_error(params, omega, split) / std::max(max_abs(omega.f), max_abs(omega.g)),
               split.ratio_H, split.ratio_err};
  });
  RunReport r;
  r.csv_header = {"sample", "truncation", "K", "N", "M", "reconstruction_error", "ratio_H", "ratio_err"};
  double err = 0.0, h[2] = {0, 0}, e[2] = {0, 0};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int f = static_cast<int>(k % 2);
    const Truncation& t = f ? fine : coarse;
    r.csv_rows.push_back({num(static_cast<int>(k / 2)), f ? "fine" : "coarse", num(t.K), num(t.N), num(t.M),
                          num(rows[k].error), num(rows[k].ratio_H), num(rows[k].ratio_err)});
    err = std::max(err, rows[k].error);
    h[f] = std::max(h[f], rows[k].ratio_H);
    e[f] = std::max(e[f], rows[k].ratio_err);
  }
  const double drift_H = std::abs(h[1] - h[0]) / h[1];
  const double drift_err = e[1] > 0.0 ? std::abs(e[1] - e[0]) / e[1] : 0.0;
  const bool ok = err <= 1e-10 && drift_H < 0.1 && drift_err < 0.1;
  json s = base_summary(c);
  s.update({{"method", method}, {"samples", samples}, {"max_reconstruction_error", err},
            {"ratio_H_coarse", h[0]}, {"ratio_H_fine", h[1]}, {"ratio_err_coarse", e[0]},
            {"ratio_err_fine", e[1]}, {"drift_H", drift_H}, {"drift_err", drift_err}, {"plateau", ok}});
  finish(r, s, ok);
  return r;
}

RunReport run_spectrum(const ExperimentConfig& c) {
  const auto spec = rep_spectrum(action_params(c), as_int(c, "n"), as_int(c, "M"));
  RunReport r;
  r.csv_header = {"index", "eigenvalue", "trusted"};
  for (int i = 0; i < spec.M; ++i) {
    r.csv_rows.push_back({num(i), num(spec.eigenvalues[i]), i < spec.trusted ? "1" : "0"});
  }
  json s = base_summary(c);
  s.update({{"n", spec.n}, {"M", spec.M}, {"trusted", spec.trusted},
            {"min_trusted_modulus", std::abs(spec.eigenvalues.front())},
            {"max_trusted_modulus", std::abs(spec.eigenvalues[spec.trusted - 1])}});
  finish(r, s, true);
  return r;
}

RunReport run_gh_report(const ExperimentConfig& c) {
  const ActionParams params = action_params(c);
  const int K = positive(c, "K");
  const Witnesses w = fit_witnesses(params, K, c.get_real("gamma"));
  const auto rep = gh_certificate(params, positive(c, "N"), as_int(c, "M"), K, w);
  RunReport r;
  r.csv_header = {"n", "min_M", "min_2M", "near_kernel"};
  for (const auto& row : rep.reps) {
    r.csv_rows.push_back({num(row.n), num(row.min_M), num(row.min_2M), row.near_kernel ? "1" : "0"});
  }
  json s = base_summary(c);
  s.update({{"N", rep.N}, {"M", rep.M}, {"K", rep.K}, {"toral_min", rep.toral_min},
            {"toral_argmin", rep.toral_argmin}, {"toral_lower_bound", rep.toral_lower_bound},
            {"toral_resonance", rep.toral_resonance}, {"fit_c", real(rep.fit_c)},
            {"fit_exponent", real(rep.fit_exponent)}, {"monotone", rep.monotone},
            {"degenerate_beta", rep.degenerate_beta}, {"certified", rep.certified}, {"reason", rep.reason}});
  finish(r, s, rep.certified);
  return r;
}

RunReport run_kernel_dim(const ExperimentConfig& c) {
  const int N = positive(c, "N"), M = positive(c, "M"), K = positive(c, "K");
  const double tol = c.get_real("tol");
  const int count = joint_kernel_dim(action_params(c), N, M, K, tol);
  RunReport r;
  r.csv_header = {"N", "M", "K", "tol", "kernel_dim"};
  r.csv_rows.push_back({num(N), num(M), num(K), num(tol), num(count)});
  json s = base_summary(c);
  s.update({{"N", N}, {"M", M}, {"K", K}, {"tol", tol}, {"kernel_dim", count}, {"uniquely_ergodic", count == 1}});
  finish(r, s, count == 1);
  return r;
}

RunReport run_constant_cohomology(const ExperimentConfig& c) {
  const auto& path = c.get_text("algebra");
  const TwoStepAlgebra algebra = path.empty() ? TwoStepAlgebra::heisenberg() : TwoStepAlgebra::load(path);
  ExactActionParams params;
  for (const auto& t : c.get_tokens("alpha")) params.alpha.push_back(parse_rational(t));
  for (const auto& t : c.get_tokens("beta")) params.beta.push_back(parse_rational(t));
  const auto mu = c.get_tokens("mu");
  if (mu.size() != 1) throw Error(ErrorCode::TypeError, "mu must be a single number");
  params.mu = parse_rational(mu[0]);
  if (params.q() != algebra.q() || params.p() != algebra.p()) {
    throw Error(ErrorCode::DimensionMismatch, "alpha needs q entries and beta p entries");
  }
  const auto h = const_cohomology_basis<Rational>(algebra, params);
  RunReport r;
  r.csv_header = {"representative"};
  for (const char* block : {"a1", "b1", "a2", "b2"}) {
    const int n = (block[0] == 'a') ? algebra.q() : algebra.p();
    for (int i = 1; i <= n; ++i) r.csv_header.push_back(std::string(block) + "_" + std::to_string(i));
  }
  for (std::size_t k = 0; k < h.representatives.size(); ++k) {
    std::vector<std::string> row{num(static_cast<int>(k))};
    for (const auto& x : h.representatives[k].flatten()) row.push_back(x.str());
    r.csv_rows.push_back(std::move(row));
  }
  const int expected = algebra.p() + algebra.q() + 1;
  json s = base_summary(c);
  s.update({{"q", algebra.q()}, {"p", algebra.p()}, {"dimension", h.dimension}, {"kernel_dim", h.kernel_dim},
            {"image_rank", h.image_rank}, {"p_plus_q_plus_1", expected}});
  finish(r, s, true);
  return r;
}

RunReport run_kam(const ExperimentConfig& c) {
  const auto omega = c.get_reals("omega");
  KamOptions opt;
  opt.K = positive(c, "K");
  opt.max_iter = positive(c, "max_iter");
  opt.floor = c.get_real("floor");
  opt.verify_grid = positive(c, "verify_grid");
  opt.witness_K = positive(c, "witness_K");
  const auto out = kam_iterate(omega, sine_perturbation(static_cast<int>(omega.size()), c.get_real("eps")), opt);
  RunReport r;
  r.csv_header = {"iteration", "residual_r0", "residual_r2"};
  for (std::size_t i = 0; i < out.state.residual_r0.size(); ++i) {
    r.csv_rows.push_back({num(static_cast<int>(i)), num(out.state.residual_r0[i]), num(out.state.residual_r2[i])});
  }
  json s = base_summary(c);
  s.update({{"kam_status", to_string(out.status)}, {"reason", out.reason},
            {"iterations", static_cast<int>(out.state.residual_r0.size()) - 1},
            {"final_residual", out.state.residual_r0.back()}, {"lambda_bar", out.state.lambda_bar},
            {"conjugacy_error", real(out.conjugacy_error)}, {"verify_grid", out.verify_grid},
            {"verified", out.verified}, {"quadratic_slope", real(out.quadratic_slope)},
            {"slope_pairs", out.slope_pairs}, {"witness_C", out.witness.C}, {"witness_gamma", out.witness.gamma}});
  finish(r, s, out.status == KamStatus::Converged);
  return r;
}

RunReport run_rigidity_step(const ExperimentConfig& c) {
  const auto algebra = TwoStepAlgebra::heisenberg();
  const ActionParams params = action_params(c);
  const double mu = params.mu;
  const Witnesses w = fit_witnesses(params);
  NewtonOptions opt;
  opt.threshold = c.get_real("threshold");
  opt.r = c.get_real("r");
  opt.cutoff = c.get_real("cutoff");

  RunReport r;
  r.csv_header = {"sample", "eps", "input_norm", "residual_norm", "ratio", "mu1", "a1", "a2", "b1", "exact"};
  auto row = [&](int sample, double eps, const NewtonResult& res) {
    std::vector<std::string> out{num(sample), num(eps), num(res.input_norm), num(res.residual_norm),
                                 num(res.residual_norm / (res.input_norm * res.input_norm)),
                                 num(res.coords.mu1)};
    for (double x : res.coords.lambda) out.push_back(num(x));
    out.push_back(res.exact ? "1" : "0");
    r.csv_rows.push_back(std::move(out));
  };
  json s = base_summary(c);
  s["mu"] = mu;

  const auto& file = c.get_text("perturbation_file");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + file);
    std::stringstream text;
    text << in.rdbuf();
    const auto res = newton_step(algebra, params, mu, parse_vf_cochain(text.str(), algebra.dim()), w, opt);
    row(0, std::numeric_limits<double>::quiet_NaN(), res);
    s.update({{"coords", {{"mu1", res.coords.mu1}, {"lambda", res.coords.lambda}}},
              {"input_norm", res.input_norm}, {"residual_norm", res.residual_norm},
              {"ratio", real(res.residual_norm / (res.input_norm * res.input_norm))}, {"exact", res.exact}});
    finish(r, s, true);
    return r;
  }

  const auto eps = c.get_reals("eps");
  const int samples = positive(c, "samples");
  Rng rng(static_cast<std::uint64_t>(c.get_int("seed")));
  std::vector<RigiditySample> corpus;
  for (int i = 0; i < samples; ++i) {
    corpus.push_back(random_rigidity_sample(rng, algebra, params, mu, positive(c, "band")));
  }
  std::vector<NewtonResult> results(corpus.size() * eps.size());
  parallel_for(results.size(), [&](std::size_t k) {
    const auto& sample = corpus[k / eps.size()];
    const auto omega = rigidity_perturbation(algebra, params, mu, sample, eps[k % eps.size()]);
    results[k] = newton_step(algebra, params, mu, omega, w, opt);
  });
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < samples; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t e = 0; e < eps.size(); ++e) {
      const auto& res = results[i * eps.size() + e];
      row(i, eps[e], res);
      const double x = std::log(res.input_norm);
      const double y = std::log(res.residual_norm);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(eps.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  const bool measured = eps.size() >= 2;
  const bool quadratic = measured && lo >= 1.7 && hi <= 2.3;
  s.update({{"samples", samples}, {"eps", eps}, {"slope_min", real(measured ? lo : NAN)},
            {"slope_max", real(measured ? hi : NAN)}, {"quadratic", quadratic}});
  finish(r, s, !measured || quadratic);
  return r;
}

RunReport run_cg_decay(const ExperimentConfig& c) {
  const int N = positive(c, "N");
  const Truncation t{positive(c, "K"), 2 * N, positive(c, "M")};
  Rng rng(static_cast<std::uint64_t>(c.get_int("seed")));
  std::vector<NilFunction> corpus;
  const int samples = positive(c, "samples");
  for (int i = 0; i < samples; ++i) corpus.push_back(random_nil_function(rng, t, c.get_real("decay"), false));
  const auto rep = cg_decay_report(corpus, c.get_real("s"), c.get_real("k"), N);
  RunReport r;
  r.csv_header = {"N", "ratio", "partial_sum"};
  r.csv_rows.push_back({num(rep.N_coarse), num(rep.ratio_coarse), num(rep.partial_sum_coarse)});
  r.csv_rows.push_back({num(rep.N_fine), num(rep.ratio_fine), num(rep.partial_sum_fine)});
  json s = base_summary(c);
  s.update({{"s", rep.s}, {"k", rep.k}, {"N_coarse", rep.N_coarse}, {"N_fine", rep.N_fine},
            {"ratio_coarse", rep.ratio_coarse}, {"ratio_fine", rep.ratio_fine},
            {"toral_only", rep.toral_only}, {"plateau", rep.plateau}});
  finish(r, s, rep.plateau);
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

RunReport execute(const ExperimentConfig& config) {
  const auto& sub = config.subcommand;
  if (sub == "witness") return run_witness(config);
  if (sub == "solve-coboundary") return run_solve_coboundary(config);
  if (sub == "split") return run_split(config);
  if (sub == "spectrum") return run_spectrum(config);
  if (sub == "gh-report") return run_gh_report(config);
  if (sub == "kernel-dim") return run_kernel_dim(config);
  if (sub == "constant-cohomology") return run_constant_cohomology(config);
  if (sub == "kam") return run_kam(config);
  if (sub == "rigidity-step") return run_rigidity_step(config);
  if (sub == "cg-decay") return run_cg_decay(config);
  throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + sub + "'");
}

std::string to_csv(const RunReport& report) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << '\n';
  };
  line(report.csv_header);
  for (const auto& row : report.csv_rows) line(row);
  return os.str();
}

std::string error_json(const std::exception& e) {
  json j{{"status", "error"}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["code"] = to_string(err->code());
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) j["line"] = pe->line();
  } else {
    j["code"] = "Internal";
  }
  return j.dump();
}

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunReport report = execute(config);
    const auto& dir = config.get_text("output_dir");
    if (dir.empty()) {
      out << to_csv(report);
    } else {
      std::filesystem::create_directories(dir);
      const auto base = std::filesystem::path(dir) / config.subcommand;
      std::ofstream csv(base.string() + ".csv");
      std::ofstream jsonl(base.string() + ".jsonl");
      if (!csv || !jsonl) throw Error(ErrorCode::Io, "cannot write to " + dir);
      csv << to_csv(report);
      jsonl << report.summary << '\n';
    }
    out << report.summary << '\n';
    return report.exit_code;
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return kExitError;
  }
}

}  // namespace nilflow
