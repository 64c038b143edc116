#pragma once

// Command-line front end. run() returns the process exit code:
//   0 success, 1 failed verification or computation, 2 usage error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ios>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mercer/mercer.hpp"

namespace mercer::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  return os;
}

inline void finish_output(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw std::ios_base::failure("failed writing '" + path + "'");
}

inline KernelParams parse_params(const std::vector<std::string>& items) {
  KernelParams params;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError("--param expects key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq), text = item.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size()) throw UsageError("--param " + key + ": '" + text + "' is not a number");
    params[key] = value;
  }
  return params;
}

inline void check_tol(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw UsageError("--tol must lie in (0, 1)");
}

/// MERCER_THREADS, when set to a positive integer, wins over --threads.
inline void apply_threads(unsigned flag) {
  const unsigned env = parse_thread_count(std::getenv("MERCER_THREADS"));
  set_thread_count(env > 0 ? env : flag);
}

struct Computed {
  Skeleton skeleton;
  SVE sve;
};

inline Computed compute(const KernelSpec& K, const GecpOptions& opt) {
  Computed c;
  c.skeleton = gecp_approximate(K, opt);
  c.sve = sve_from_skeleton(c.skeleton, K.name);
  return c;
}

using Json = nlohmann::ordered_json;

inline Json check_json(const std::string& suite, const std::string& name, bool passed, double margin,
                       const std::string& verdict) {
  return Json{{"suite", suite}, {"name", name}, {"passed", passed}, {"margin", margin}, {"verdict", verdict}};
}

inline Json report_json(const std::string& suite, const ConvergenceReport& r) {
  auto j = check_json(suite, r.name, r.passed, r.margin, r.verdict);
  j["kind"] = to_string(r.kind);
  return j;
}

inline void suite_lemmas(Json& checks) {
  const auto rep = lemma_suite();
  for (const auto& c : rep.checks) {
    auto j = check_json("lemmas", c.name, c.passed, c.worst_margin, "worst case at n = " + std::to_string(c.worst_n));
    j["cases"] = c.cases;
    checks.push_back(std::move(j));
  }
}

inline void suite_kabs(Json& checks) {
  checks.push_back(report_json("kabs", kabs_signed_convergence(10000)));
  checks.push_back(report_json("kabs", kabs_harmonic_growth({100, 1000, 10000})));
  checks.push_back(report_json("kabs", kabs_absolute_divergence({100, 1000, 10000, 100000})));
  checks.push_back(report_json("kabs", kabs_pointwise()));
  checks.push_back(report_json("kabs", g_closedform_check({0.5, 0.7, 0.9, 1.0}, 10000)));
}

inline void suite_kuni(Json& checks) { checks.push_back(report_json("kuni", kuni_uniform_witness(50))); }

inline void suite_fejer(Json& checks) {
  checks.push_back(report_json("fejer", fejer_coefficient_check()));
  checks.push_back(report_json("fejer", fejer_growth()));
}

/// Orthonormality of the computed SVEs and agreement with the 400-point
/// dense reference, plus the reference's own 200 vs 400 consistency.
inline void suite_oracle(Json& checks) {
  struct Case {
    const char* name;
    double tol;
    std::size_t max_degree;
  };
  const Case cases[] = {{"exp_xy", 1e-13, 8192}, {"tanh", 1e-13, 8192},
                        {"pyramid", 1e-10, 2048}, {"modulated_pyramid", 1e-10, 2048}};
  for (const auto& c : cases) {
    const auto K = make_builtin(c.name);
    GecpOptions opt;
    opt.tol = c.tol;
    opt.max_degree = c.max_degree;
    const auto e = compute(K, opt).sve;

    const double ortho = std::max(orthonormality_error(e.U), orthonormality_error(e.V));
    checks.push_back(check_json("oracle", std::string("orthonormality ") + c.name, ortho <= 1e-10, 1e-10 - ortho,
                                "max |Gram - I| = " + fmt(ortho)));

    const auto ref = dense_svd_oracle(K, 400);
    double worst = 0.0;
    std::size_t worst_n = 0, compared = 0;
    const std::size_t n = std::min(ref.size(), e.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (ref[i] < 1e-8 * ref[0]) break;
      const double rel = std::abs(e.sigma[i] - ref[i]) / ref[i];
      ++compared;
      if (rel > worst) {
        worst = rel;
        worst_n = i + 1;
      }
    }
    checks.push_back(check_json("oracle", std::string("oracle agreement ") + c.name, worst <= 1e-6, 1e-6 - worst,
                                "worst relative error " + fmt(worst) + " at n = " + std::to_string(worst_n) +
                                    " over " + std::to_string(compared) + " values"));
  }

  const auto K = make_builtin("exp_xy");
  const auto a = dense_svd_oracle(K, 200), b = dense_svd_oracle(K, 400);
  double diff = 0.0;
  for (std::size_t i = 0; i < 10; ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  checks.push_back(check_json("oracle", "oracle self-consistency exp_xy", diff <= 1e-10, 1e-10 - diff,
                              "max |sigma_200 - sigma_400| over the first 10 values = " + fmt(diff)));
}

inline std::pair<long long, long long> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--k-range expects a:b");
  try {
    std::size_t ua = 0, ub = 0;
    const std::string sa = text.substr(0, colon), sb = text.substr(colon + 1);
    const long long a = std::stoll(sa, &ua), b = std::stoll(sb, &ub);
    if (ua != sa.size() || ub != sb.size()) throw UsageError("");
    if (a < 1 || b < a) throw UsageError("--k-range needs 1 <= a <= b");
    return {a, b};
  } catch (const UsageError& e) {
    if (*e.what() != '\0') throw;
  } catch (const std::exception&) {
  }
  throw UsageError("--k-range expects integers a:b, got '" + text + "'");
}

inline std::string optional_field(const std::function<double()>& f) {
  try {
    return fmt(f());
  } catch (const OutOfValidity&) {
    return {};
  }
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Mercer expansions of continuous kernels"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads for kernel sampling (MERCER_THREADS overrides)")
      ->check(CLI::Range(1u, 1024u));

  // sve
  auto* sve_cmd = app.add_subcommand("sve", "compute and save the expansion of a gallery kernel");
  std::string kernel;
  std::vector<std::string> param_items;
  GecpOptions gopt;
  std::string sve_out;
  sve_cmd->add_option("--kernel", kernel, "gallery kernel name")->required();
  sve_cmd->add_option("--param", param_items, "kernel parameter key=value (repeatable)");
  sve_cmd->add_option("--tol", gopt.tol, "relative tolerance");
  sve_cmd->add_option("--max-rank", gopt.max_rank, "rank limit")->check(CLI::PositiveNumber);
  sve_cmd->add_option("--grid-cap", gopt.grid_cap, "pivot grid cap exponent")->check(CLI::Range(4u, 14u));
  sve_cmd->add_option("--max-degree", gopt.max_degree, "slice degree limit")->check(CLI::PositiveNumber);
  sve_cmd->add_option("--out", sve_out, "output JSON path")->required();

  // figure2
  auto* f2_cmd = app.add_subcommand("figure2", "pivots and L2 errors by rank for tanh(100xy + 1)");
  std::vector<std::string> f2_out;
  double f2_tol = 1e-13;
  std::size_t f2_quad = 2049;
  f2_cmd->add_option("--out", f2_out, "pivots.csv errs.csv")->expected(2)->required();
  f2_cmd->add_option("--tol", f2_tol, "relative tolerance");
  f2_cmd->add_option("--quad", f2_quad, "points per axis for the L2 errors and the dense reference")
      ->check(CLI::Range(2ul, 8193ul));

  // figure1
  auto* f1_cmd = app.add_subcommand("figure1", "SVE tails against Legendre-slice and analytic bounds");
  std::string f1_kernel;
  std::string f1_out;
  Figure1Options f1opt;
  double f1_tol = 1e-10;
  f1_cmd->add_option("--kernel", f1_kernel, "pyramid or modulated_pyramid")
      ->required()
      ->check(CLI::IsMember({"pyramid", "modulated_pyramid"}));
  f1_cmd->add_option("--max-k", f1opt.k_max, "largest k")->check(CLI::Range(2ul, 100000ul));
  f1_cmd->add_option("--y-grid", f1opt.y_grid, "Chebyshev points in y for the slice maximum")
      ->check(CLI::Range(2ul, 100000ul));
  f1_cmd->add_option("--tol", f1_tol, "skeleton tolerance");
  f1_cmd->add_option("--out", f1_out, "output CSV path")->required();

  // decay
  auto* decay_cmd = app.add_subcommand("decay", "analytic decay bounds for given (V, r)");
  double V = 0.0;
  int r = 0;
  std::string k_range;
  std::string decay_out;
  decay_cmd->add_option("--V", V, "variation bound")->required();
  decay_cmd->add_option("--r", r, "smoothness order")->required();
  decay_cmd->add_option("--k-range", k_range, "a:b")->required();
  decay_cmd->add_option("--out", decay_out, "output CSV path")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites; prints a JSON report");
  std::string suite;
  std::string verify_out;
  verify_cmd->add_option("--suite", suite, "lemmas|kabs|kuni|fejer|oracle|all")
      ->required()
      ->check(CLI::IsMember({"lemmas", "kabs", "kuni", "fejer", "oracle", "all"}));
  verify_cmd->add_option("--out", verify_out, "also write the report to this path");

  // gallery
  auto* gallery_cmd = app.add_subcommand("gallery", "describe the built-in kernels");
  bool list = false;
  gallery_cmd->add_flag("--list", list, "list names, domains and metadata")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  detail::apply_threads(threads);

  try {
    if (sve_cmd->parsed()) {
      detail::check_tol(gopt.tol);
      const auto K = make_builtin(kernel, detail::parse_params(param_items));
      const auto c = detail::compute(K, gopt);
      save_sve(c.sve, sve_out);
      out << "rank " << c.sve.size() << '\n'
          << "skeleton_rank " << c.skeleton.rank() << '\n'
          << "sigma_1 " << detail::fmt(c.sve.size() > 0 ? c.sve.sigma[0] : 0.0) << '\n'
          << "achieved_residual " << detail::fmt(c.skeleton.achieved_error) << '\n'
          << "scale " << detail::fmt(c.skeleton.scale) << '\n'
          << "converged " << (c.skeleton.converged ? "true" : "false") << '\n';
      return kOk;
    }

    if (f2_cmd->parsed()) {
      detail::check_tol(f2_tol);
      const auto K = make_builtin("tanh");
      GecpOptions opt;
      opt.tol = f2_tol;
      const auto s = gecp_approximate(K, opt);
      const auto errs = l2_error_by_rank(K, s, f2_quad);
      const auto ref = dense_svd_oracle(K, f2_quad);

      auto pivots = detail::open_output(f2_out[0]);
      pivots << "step,x,y,pivot_value,residual_before,residual_after\n";
      for (std::size_t j = 0; j < s.rank(); ++j) {
        pivots << j + 1 << ',' << detail::fmt(s.pivots[j].first) << ',' << detail::fmt(s.pivots[j].second) << ','
               << detail::fmt(s.pivot_values[j]) << ',' << detail::fmt(s.grid_residuals[j]) << ','
               << detail::fmt(s.grid_residuals[j + 1]) << '\n';
      }
      detail::finish_output(pivots, f2_out[0]);

      std::vector<double> tails(ref.size() + 1, 0.0);
      for (std::size_t i = ref.size(); i-- > 0;) tails[i] = std::sqrt(tails[i + 1] * tails[i + 1] + ref[i] * ref[i]);
      auto errors = detail::open_output(f2_out[1]);
      errors << "r,l2_error,oracle_tail,ratio\n";
      for (std::size_t k = 0; k < errs.size(); ++k) {
        const double tail = k < tails.size() ? tails[k] : 0.0;
        errors << k << ',' << detail::fmt(errs[k]) << ',' << detail::fmt(tail) << ','
               << (tail > 0.0 ? detail::fmt(errs[k] / tail) : std::string()) << '\n';
      }
      detail::finish_output(errors, f2_out[1]);
      out << "rank " << s.rank() << '\n' << "converged " << (s.converged ? "true" : "false") << '\n';
      return kOk;
    }

    if (f1_cmd->parsed()) {
      detail::check_tol(f1_tol);
      const auto K = make_builtin(f1_kernel);
      GecpOptions opt;
      opt.tol = f1_tol;
      opt.max_degree = 2048;
      const auto c = detail::compute(K, opt);
      const auto table = figure1_data(K, c.sve, f1opt);
      auto os = detail::open_output(f1_out);
      os << "k,sve_tail,legendre_bound,analytic_bound\n";
      for (const auto& row : table.rows) {
        os << row.k << ',' << detail::fmt(row.sve_tail) << ',' << detail::fmt(row.legendre_bound) << ','
           << (row.analytic_bound ? detail::fmt(*row.analytic_bound) : std::string()) << '\n';
      }
      detail::finish_output(os, f1_out);
      out << "rank " << c.sve.size() << '\n'
          << "y_grid " << table.y_grid << " chebyshev points\n"
          << "chain_holds " << (table.chain_holds ? "true" : "false") << '\n';
      return kOk;
    }

    if (decay_cmd->parsed()) {
      const auto [a, b] = detail::parse_range(k_range);
      const DecayParams p(V, r);
      auto os = detail::open_output(decay_out);
      os << "k,legendre_truncation_bound,singular_value_bound,sve_tail_bound\n";
      for (long long k = a; k <= b; ++k) {
        os << k << ',' << detail::optional_field([&] { return legendre_truncation_bound(p, k); }) << ','
           << detail::optional_field([&] { return singular_value_bound(p, k); }) << ','
           << detail::optional_field([&] { return sve_tail_bound(p, k); }) << '\n';
      }
      detail::finish_output(os, decay_out);
      return kOk;
    }

    if (verify_cmd->parsed()) {
      detail::Json checks = detail::Json::array();
      const bool all = suite == "all";
      if (all || suite == "lemmas") detail::suite_lemmas(checks);
      if (all || suite == "kabs") detail::suite_kabs(checks);
      if (all || suite == "kuni") detail::suite_kuni(checks);
      if (all || suite == "fejer") detail::suite_fejer(checks);
      if (all || suite == "oracle") detail::suite_oracle(checks);
      bool passed = true;
      for (const auto& c : checks) passed = passed && c["passed"].get<bool>();
      const detail::Json report{{"suite", suite}, {"passed", passed}, {"checks", checks}};
      const std::string text = report.dump(2) + "\n";
      out << text;
      if (!verify_out.empty()) {
        auto os = detail::open_output(verify_out);
        os << text;
        detail::finish_output(os, verify_out);
      }
      return passed ? kOk : kFailed;
    }

    if (gallery_cmd->parsed()) {
      out << "name,x_domain,y_domain,symmetric,analytic,r,V,params,description\n";
      for (const auto& entry : gallery_entries()) {
        const auto K = make_builtin(entry.name);
        std::string params;
        for (const auto& p : entry.params) params += (params.empty() ? "" : " ") + p;
        out << K.name << ",[" << detail::fmt(K.x_domain.lo()) << " " << detail::fmt(K.x_domain.hi()) << "],["
            << detail::fmt(K.y_domain.lo()) << " "
            << detail::fmt(K.y_domain.hi()) << "]," << (K.symmetric ? "yes" : "no") << ',' << (K.analytic ? "yes" : "no") << ','
            << (K.smoothness_r ? std::to_string(*K.smoothness_r) : std::string()) << ','
            << (K.variation_V ? detail::fmt(*K.variation_V) : std::string()) << ',' << params << ",\""
            << K.description << "\"\n";
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}

}  // namespace mercer::cli
