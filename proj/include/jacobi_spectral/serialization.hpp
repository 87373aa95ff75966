#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>

#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"
#include "jacobi_spectral/operators.hpp"
#include "jacobi_spectral/quadrature.hpp"
#include "jacobi_spectral/spectrum.hpp"

namespace jacobi_spectral {

// 17 significant digits: parses back to the same double.
inline std::string format_real(double v) {
  if (!std::isfinite(v)) throw ArgumentError("cannot serialize a non-finite value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

template <class Seq, class Fmt>
std::string json_array(const Seq& seq, Fmt fmt) {
  std::string out = "[";
  bool first = true;
  for (const auto& v : seq) {
    if (!first) out += ", ";
    first = false;
    out += fmt(v);
  }
  return out + "]";
}

inline std::string rational_string(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::string kappa_json(const MultiIndex& kappa) {
  return json_array(kappa.entries(), [](int k) { return std::to_string(k); });
}

}  // namespace detail

// {"alpha": [...], "beta": [...]} plus exact rational strings when known.
inline std::string params_json(const Params& params) {
  const auto& pairs = params.pairs();
  std::string out = "{\"alpha\": " + detail::json_array(pairs, [](const ParamPair& p) { return format_real(p.alpha()); });
  out += ", \"beta\": " + detail::json_array(pairs, [](const ParamPair& p) { return format_real(p.beta()); });
  if (params.is_exact()) {
    out += ", \"alpha_exact\": " + detail::json_array(pairs, [](const ParamPair& p) {
             return detail::json_string(detail::rational_string(*p.alpha_exact()));
           });
    out += ", \"beta_exact\": " + detail::json_array(pairs, [](const ParamPair& p) {
             return detail::json_string(detail::rational_string(*p.beta_exact()));
           });
  }
  return out + "}";
}

inline Params params_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("alpha_exact") && j.contains("beta_exact")) {
      return Params::parse(j.at("alpha_exact").get<std::vector<std::string>>(),
                           j.at("beta_exact").get<std::vector<std::string>>());
    }
    return Params(j.at("alpha").get<std::vector<double>>(), j.at("beta").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("malformed params: ") + ex.what());
  }
}

inline std::string levels_json(const LevelTable& table) {
  std::ostringstream out;
  out << "{\n  \"params\": " << params_json(table.params()) << ",\n";
  out << "  \"max_degree\": " << table.max_degree() << ",\n";
  out << "  \"complete_below\": " << format_real(table.complete_below()) << ",\n";
  out << "  \"levels\": [";
  for (std::size_t n = 0; n < table.size(); ++n) {
    const auto& level = table.level(n);
    out << (n ? ",\n" : "\n") << "    {\"r\": " << format_real(level.r)
        << ", \"cohort\": " << detail::json_array(level.cohort, detail::kappa_json) << "}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

// Key/value pairs recorded alongside an expansion (operator name, parameters).
using Metadata = std::map<std::string, std::string>;

// Nonzero coefficients in basis order.
inline std::string expansion_json(const Expansion& e, const Metadata& metadata = {}) {
  std::ostringstream out;
  out << "{\n  \"params\": " << params_json(e.params()) << ",\n";
  out << "  \"max_degree\": " << e.table().max_degree() << ",\n";
  if (!metadata.empty()) {
    out << "  \"metadata\": {";
    bool first = true;
    for (const auto& [k, v] : metadata) {
      out << (first ? "" : ", ") << detail::json_string(k) << ": " << detail::json_string(v);
      first = false;
    }
    out << "},\n";
  }
  out << "  \"coeffs\": [";
  bool first = true;
  for (std::size_t b = 0; b < e.table().basis_size(); ++b) {
    const double v = e.coefficients()[static_cast<Eigen::Index>(b)];
    if (v == 0.0) continue;
    out << (first ? "\n" : ",\n") << "    {\"kappa\": " << detail::kappa_json(e.table().basis(b))
        << ", \"value\": " << format_real(v) << "}";
    first = false;
  }
  out << (first ? "]\n}\n" : "\n  ]\n}\n");
  return out.str();
}

struct LoadedExpansion {
  Expansion expansion;
  Metadata metadata;
};

inline LoadedExpansion expansion_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("invalid expansion JSON: ") + ex.what());
  }
  try {
    const Params params = params_from_json(j.at("params"));
    const int N = j.at("max_degree").get<int>();
    auto table = make_table(params, N);
    std::vector<std::pair<MultiIndex, double>> terms;
    for (const auto& c : j.at("coeffs")) {
      terms.emplace_back(MultiIndex(c.at("kappa").get<std::vector<int>>()), c.at("value").get<double>());
    }
    Metadata metadata;
    if (j.contains("metadata")) metadata = j.at("metadata").get<Metadata>();
    return {Expansion::from_terms(std::move(table), terms), std::move(metadata)};
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("malformed expansion JSON: ") + ex.what());
  }
}

inline std::string multiplier_json(const MultiplierSpec& spec) {
  std::ostringstream out;
  out << "{\"kind\": " << detail::json_string(multiplier_kind(spec));
  if (const auto* tab = std::get_if<TabulatedMultiplier>(&spec)) {
    out << ", \"values\": " << detail::json_array(tab->values, format_real);
  } else if (const auto* cf = std::get_if<ClosedFormMultiplier>(&spec)) {
    out << ", \"name\": " << detail::json_string(cf->name) << ", \"params\": {";
    bool first = true;
    for (const auto& [k, v] : cf->params) {
      out << (first ? "" : ", ") << detail::json_string(k) << ": " << format_real(v);
      first = false;
    }
    out << "}";
  } else {
    const auto& ms = std::get<MeyerSeriesMultiplier>(spec);
    out << ", \"coefficients\": " << detail::json_array(ms.coefficients, format_real)
        << ", \"gamma\": " << format_real(ms.gamma) << ", \"cutoff\": " << ms.cutoff
        << ", \"head\": " << detail::json_array(ms.head, format_real) << ", \"truncation\": " << ms.truncation;
  }
  out << "}";
  return out.str();
}

inline MultiplierSpec multiplier_from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "tabulated") return TabulatedMultiplier{j.at("values").get<std::vector<double>>()};
    if (kind == "closed_form") {
      ClosedFormMultiplier cf{j.at("name").get<std::string>(), {}};
      if (j.contains("params")) cf.params = j.at("params").get<std::map<std::string, double>>();
      return cf;
    }
    if (kind == "meyer_series") {
      MeyerSeriesMultiplier ms;
      ms.coefficients = j.at("coefficients").get<std::vector<double>>();
      ms.gamma = j.at("gamma").get<double>();
      ms.cutoff = j.at("cutoff").get<std::size_t>();
      ms.head = j.at("head").get<std::vector<double>>();
      if (j.contains("truncation")) ms.truncation = j.at("truncation").get<std::size_t>();
      return ms;
    }
    throw SpecError("unknown multiplier kind '" + kind + "'");
  } catch (const nlohmann::json::exception& ex) {
    throw SpecError(std::string("malformed multiplier JSON: ") + ex.what());
  }
}

inline std::string quadrature_json(const QuadratureRule& rule) {
  std::ostringstream out;
  out << "{\n  \"params\": " << params_json(rule.params()) << ",\n";
  out << "  \"nodes_per_dim\": " << detail::json_array(rule.nodes_per_dim(), [](int m) { return std::to_string(m); })
      << ",\n";
  std::vector<std::string> nodes, weights;
  for (std::size_t i = 0; i < rule.dim(); ++i) {
    nodes.push_back(detail::json_array(rule.rule(i).nodes, format_real));
    weights.push_back(detail::json_array(rule.rule(i).weights, format_real));
  }
  auto ident = [](const std::string& s) { return s; };
  out << "  \"nodes\": " << detail::json_array(nodes, ident) << ",\n";
  out << "  \"weights\": " << detail::json_array(weights, ident) << "\n}\n";
  return out.str();
}

// Rebuilds the rule from params and node counts, then checks the stored nodes
// and weights agree with it.
inline QuadratureRule quadrature_from_json(const std::string& text, double tolerance = 1e-14) {
  try {
    const auto j = nlohmann::json::parse(text);
    QuadratureRule rule(params_from_json(j.at("params")), j.at("nodes_per_dim").get<std::vector<int>>());
    const auto nodes = j.at("nodes").get<std::vector<std::vector<double>>>();
    const auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    if (nodes.size() != rule.dim() || weights.size() != rule.dim()) throw ShapeError("quadrature JSON: wrong dimension");
    for (std::size_t i = 0; i < rule.dim(); ++i) {
      const auto& r = rule.rule(i);
      if (nodes[i].size() != r.nodes.size() || weights[i].size() != r.weights.size()) {
        throw ShapeError("quadrature JSON: node count mismatch in dimension " + std::to_string(i));
      }
      for (std::size_t k = 0; k < r.nodes.size(); ++k) {
        if (std::abs(nodes[i][k] - r.nodes[k]) > tolerance || std::abs(weights[i][k] - r.weights[k]) > tolerance) {
          throw ConfigError("quadrature JSON: stored nodes/weights disagree with the rebuilt rule");
        }
      }
    }
    return rule;
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("malformed quadrature JSON: ") + ex.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temporary, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw ArgumentError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ArgumentError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace jacobi_spectral
