// jacobi-spectral: levels / expand / apply / verify front end.
//
// Exit codes: 0 ok, 1 failed checks, 2 usage or invalid input, 3 operator domain error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "jacobi_spectral.hpp"

namespace js = jacobi_spectral;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;
constexpr int kDomain = 3;

// Raised for input problems that map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string alpha = "0,0.5";
  std::string beta = "0.25,0";
  int max_degree = 8;
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--alpha", c.alpha, "comma-separated alpha_i (decimals or p/q)")->capture_default_str();
  sub->add_option("--beta", c.beta, "comma-separated beta_i (decimals or p/q)")->capture_default_str();
  sub->add_option("--max-degree", c.max_degree, "total-degree truncation N")->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for random inputs")->capture_default_str();
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> split_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s)) out.push_back(js::ExactReal::parse(item).value);
  return out;
}

js::Params parse_params(const Common& c) {
  try {
    return js::Params::parse(split(c.alpha), split(c.beta));
  } catch (const js::Error& ex) {
    throw UsageError(std::string("invalid parameters: ") + ex.what());
  }
}

js::TablePtr parse_table(const Common& c) {
  if (c.max_degree < 0) throw UsageError("--max-degree must be >= 0");
  return js::make_table(parse_params(c), c.max_degree);
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::fputs(contents.c_str(), stdout);
  } else {
    js::write_file_atomic(path, contents);
  }
}

// ---------------------------------------------------------------- levels

int cmd_levels(const Common& c) {
  const auto table = parse_table(c);
  emit(c.out, js::levels_json(*table));
  std::fprintf(stderr, "levels: %zu  basis: %zu  complete_below: %s  complete levels: %zu\n", table->size(),
               table->basis_size(), js::format_real(table->complete_below()).c_str(), table->complete_level_count());
  return kOk;
}

// ---------------------------------------------------------------- expand

struct ExpandArgs {
  std::string input;
  std::optional<int> degree;
  bool mean_zero = false;
};

std::vector<int> parse_kappa(const std::string& s, std::size_t d) {
  std::vector<int> k;
  for (const auto& item : split(s)) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      k.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad multi-index entry '" + item + "'");
    }
  }
  if (k.size() != d) throw UsageError("multi-index '" + s + "' does not have " + std::to_string(d) + " entries");
  return k;
}

int cmd_expand(const Common& c, const ExpandArgs& a) {
  auto table = parse_table(c);
  const std::size_t d = table->dim();
  std::optional<js::Polynomial> poly;
  std::optional<js::Expansion> e;
  js::Metadata meta{{"input", a.input}};

  try {
    if (a.input == "random") {
      const int degree = a.degree.value_or(c.max_degree);
      e = js::random_expansion(table, degree, c.seed, a.mean_zero);
      meta["degree"] = std::to_string(degree);
      meta["seed"] = std::to_string(c.seed);
      meta["mean_zero"] = a.mean_zero ? "true" : "false";
    } else if (a.input.rfind("basis:", 0) == 0) {
      e = js::Expansion::basis_function(table, js::MultiIndex(parse_kappa(a.input.substr(6), d)));
    } else if (a.input.rfind("monomial:", 0) == 0) {
      const auto k = parse_kappa(a.input.substr(9), d);
      js::Polynomial p = js::Polynomial::constant(d, 1.0);
      for (std::size_t i = 0; i < d; ++i)
        for (int j = 0; j < k[i]; ++j) p = p * js::Polynomial::variable(d, i);
      poly = p;
    } else if (a.input == "product") {
      js::Polynomial p = js::Polynomial::constant(d, 1.0);
      for (std::size_t i = 0; i < d; ++i) p = p * js::Polynomial::variable(d, i);
      poly = p;
    } else {
      poly = js::parse_polynomial(a.input, d);
    }
  } catch (const js::Error& ex) {
    throw UsageError(ex.what());
  }
  if (poly) e = js::expand_polynomial(*poly, table);

  // Round-trip residual at 100 seeded points (zero by construction for coefficient inputs).
  double residual = 0.0;
  if (poly) {
    js::SeededUniform rng(c.seed);
    std::vector<double> x(d);
    for (int i = 0; i < 100; ++i) {
      for (auto& xi : x) xi = rng.uniform(-1.0, 1.0);
      residual = std::max(residual, std::abs(js::synthesize(*e, x) - (*poly)(x)));
    }
  }
  emit(c.out, js::expansion_json(*e, meta));
  std::fprintf(stderr, "parseval_norm: %s  roundtrip_residual: %.3e\n", js::format_real(js::parseval_norm(*e)).c_str(),
               residual);
  return kOk;
}

// ---------------------------------------------------------------- apply

struct ApplyArgs {
  std::string op;
  std::string in;
  std::optional<double> t, gamma, delta;
  std::optional<int> k;
  std::optional<std::size_t> cutoff, truncation;
  std::string coeffs, head, values, spec;
};

const std::vector<std::string>& apply_ops() {
  static const std::vector<std::string> ops = {"generator", "heat",           "poisson",          "gen-poisson",
                                               "frac-int",  "frac-der",       "bessel",           "meyer-potential",
                                               "meyer-multiplier", "qt",      "multiplier-table"};
  return ops;
}

template <class T>
T need(const std::optional<T>& v, const char* flag, const std::string& op) {
  if (!v) throw UsageError("operator '" + op + "' requires " + flag);
  return *v;
}

int cmd_apply(const Common& c, const ApplyArgs& a) {
  bool known = false;
  for (const auto& op : apply_ops()) known = known || op == a.op;
  if (!known) throw UsageError("unknown operator '" + a.op + "'");

  js::LoadedExpansion loaded = [&] {
    try {
      return js::expansion_from_json(js::read_file(a.in));
    } catch (const js::Error& ex) {
      throw UsageError(ex.what());
    }
  }();
  const js::Expansion& f = loaded.expansion;
  js::Metadata meta{{"op", a.op}};
  auto record = [&](const char* key, double v) { meta[key] = js::format_real(v); };

  // Gather operator parameters first; anything missing or malformed is a usage error.
  std::optional<js::MultiplierSpec> spec;
  if (a.op == "meyer-multiplier") {
    js::MeyerSeriesMultiplier ms;
    if (a.coeffs.empty()) throw UsageError("operator 'meyer-multiplier' requires --coeffs");
    try {
      ms.coefficients = split_reals(a.coeffs);
      if (!a.head.empty()) ms.head = split_reals(a.head);
    } catch (const js::Error& ex) {
      throw UsageError(ex.what());
    }
    ms.gamma = need(a.gamma, "--gamma", a.op);
    ms.cutoff = need(a.cutoff, "--cutoff", a.op);
    if (a.truncation) ms.truncation = *a.truncation;
    spec = ms;
  } else if (a.op == "multiplier-table") {
    try {
      if (!a.spec.empty()) {
        spec = js::multiplier_from_json(nlohmann::json::parse(js::read_file(a.spec)));
      } else if (!a.values.empty()) {
        spec = js::TabulatedMultiplier{split_reals(a.values)};
      } else {
        throw UsageError("operator 'multiplier-table' requires --values or --spec");
      }
    } catch (const js::Error& ex) {
      throw UsageError(ex.what());
    } catch (const nlohmann::json::exception& ex) {
      throw UsageError(ex.what());
    }
  }

  std::optional<js::Expansion> g;
  try {
    if (a.op == "generator") {
      g = js::apply_generator(f);
    } else if (a.op == "heat") {
      record("t", need(a.t, "--t", a.op));
      g = js::heat_semigroup(f, *a.t);
    } else if (a.op == "poisson") {
      record("t", need(a.t, "--t", a.op));
      g = js::poisson_semigroup(f, *a.t);
    } else if (a.op == "gen-poisson") {
      record("t", need(a.t, "--t", a.op));
      record("delta", need(a.delta, "--delta", a.op));
      g = js::generalized_poisson(f, *a.t, *a.delta);
    } else if (a.op == "frac-int") {
      record("gamma", need(a.gamma, "--gamma", a.op));
      g = js::fractional_integral(f, *a.gamma);
    } else if (a.op == "frac-der") {
      record("gamma", need(a.gamma, "--gamma", a.op));
      g = js::fractional_derivative(f, *a.gamma);
    } else if (a.op == "bessel") {
      record("gamma", need(a.gamma, "--gamma", a.op));
      g = js::bessel_potential(f, *a.gamma);
    } else if (a.op == "meyer-potential") {
      const int k = need(a.k, "--k", a.op);
      const double gamma = need(a.gamma, "--gamma", a.op);
      const std::size_t cutoff = need(a.cutoff, "--cutoff", a.op);
      meta["k"] = std::to_string(k);
      record("gamma", gamma);
      meta["cutoff"] = std::to_string(cutoff);
      g = js::meyer_potential(f, k, gamma, cutoff);
    } else if (a.op == "qt") {
      record("t", need(a.t, "--t", a.op));
      g = js::qt_operator(f, *a.t);
    } else {
      meta["spec"] = js::multiplier_json(*spec);
      g = js::apply_multiplier(f, *spec);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const js::Error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kDomain;
  }
  emit(c.out, js::expansion_json(*g, meta));
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string suite = "all";
  double tol_scale = 1.0;
  double t_max_factor = 40.0;
  bool timing = false;
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  js::VerifyConfig cfg;
  cfg.params = parse_params(c);
  if (c.max_degree < 1) throw UsageError("verify needs --max-degree >= 1");
  cfg.max_degree = c.max_degree;
  cfg.seed = c.seed;
  cfg.tol_scale = a.tol_scale;
  cfg.time.t_max_factor = a.t_max_factor;
  cfg.timing = a.timing;
  if (!cfg.params.semigroup_admissible()) throw UsageError("verify needs alpha_i, beta_i > -1/2");
  if (!cfg.time.certified()) {
    std::fprintf(stderr, "warning: t_max_factor %g < 10; tail truncation is not certified\n", a.t_max_factor);
  }

  std::vector<js::CheckRow> rows;
  try {
    rows = js::run_verify(a.suite, cfg);
  } catch (const js::Error& ex) {
    throw UsageError(ex.what());
  }
  emit(c.out, js::verify_csv(rows, a.timing));
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.pass) continue;
    ++failed;
    std::fprintf(stderr, "FAIL %s (max_error %.3e, tolerance %.3e)%s%s\n", r.check_id.c_str(), r.max_error,
                 r.tolerance, r.note.empty() ? "" : ": ", r.note.c_str());
  }
  std::fprintf(stderr, "%zu checks, %zu failed\n", rows.size(), failed);
  return failed == 0 ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral calculus for d-dimensional Jacobi expansions"};
  app.require_subcommand(1);

  Common common;

  auto* levels = app.add_subcommand("levels", "build the level table and write it as JSON");
  add_common(levels, common);

  ExpandArgs expand;
  auto* expand_cmd = app.add_subcommand("expand", "expand a function in the normalized Jacobi basis");
  add_common(expand_cmd, common);
  expand_cmd
      ->add_option("input", expand.input,
                   "polynomial in x0..x{d-1}, 'random', 'product', 'monomial:k1,..' or 'basis:k1,..'")
      ->required();
  expand_cmd->add_option("--degree", expand.degree, "degree of the random input");
  expand_cmd->add_flag("--mean-zero", expand.mean_zero, "zero the level-0 coefficient of the random input");

  ApplyArgs apply;
  auto* apply_cmd = app.add_subcommand("apply", "apply a spectral operator to an expansion file");
  add_common(apply_cmd, common);
  apply_cmd->add_option("op", apply.op, "operator name")->required();
  apply_cmd->add_option("--in", apply.in, "input expansion JSON")->required();
  apply_cmd->add_option("--t", apply.t, "time");
  apply_cmd->add_option("--gamma", apply.gamma, "order gamma");
  apply_cmd->add_option("--delta", apply.delta, "stable index delta in (0,1]");
  apply_cmd->add_option("--k", apply.k, "power k of the Meyer potential");
  apply_cmd->add_option("--cutoff", apply.cutoff, "first level n_0 of the Meyer operators");
  apply_cmd->add_option("--truncation", apply.truncation, "series truncation M");
  apply_cmd->add_option("--coeffs", apply.coeffs, "comma-separated Taylor coefficients a_0,a_1,...");
  apply_cmd->add_option("--head", apply.head, "comma-separated Phi(0..n_0-1)");
  apply_cmd->add_option("--values", apply.values, "comma-separated Phi(n) per level");
  apply_cmd->add_option("--spec", apply.spec, "multiplier spec JSON file");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite and write a CSV report");
  add_common(verify_cmd, common);
  verify_cmd->add_option("--suite", verify.suite, "basis, spectrum, operators, oracles or all")->capture_default_str();
  verify_cmd->add_option("--tol-scale", verify.tol_scale, "multiply every tolerance")->capture_default_str();
  verify_cmd->add_option("--t-max-factor", verify.t_max_factor, "time-integral truncation factor")
      ->capture_default_str();
  verify_cmd->add_flag("--timing", verify.timing, "fill the seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  try {
    if (*levels) return cmd_levels(common);
    if (*expand_cmd) return cmd_expand(common, expand);
    if (*apply_cmd) return cmd_apply(common, apply);
    return cmd_verify(common, verify);
  } catch (const UsageError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kUsage;
  } catch (const js::Error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kUsage;
  }
}
