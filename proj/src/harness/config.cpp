#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "zo/harness.hpp"

namespace zo {

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!object.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      const std::string where = prefix.empty() ? key : prefix + "." + key;
      throw ConfigError(where, "unknown key");
    }
  }
}

double number(const json& object, const std::string& key, const std::string& where) {
  const auto& v = object.at(key);
  if (!v.is_number()) throw ConfigError(where + key, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
  return v.get<long>();
}

Vector vector_of(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where, fmt::format("entry {} is not a number", i));
    out[static_cast<Index>(i)] = v[i].get<double>();
  }
  return out;
}

// Array of length d, or a scalar broadcast to d entries.
Vector vector_or_scalar(const json& v, Index d, const std::string& where) {
  if (v.is_number()) return Vector::Constant(d, v.get<double>());
  Vector out = vector_of(v, where);
  if (out.size() != d) throw ConfigError(where, fmt::format("expected {} entries, got {}", d, out.size()));
  return out;
}

Matrix matrix_of(const json& v, const std::string& where) {
  if (v.is_string()) {
    // A path to a JSON file holding the array of rows.
    const std::filesystem::path path = v.get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError(where, fmt::format("cannot open '{}'", path.string()));
    json rows;
    try {
      in >> rows;
    } catch (const json::parse_error& e) {
      throw ConfigError(where, fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return matrix_of(rows, where);
  }
  if (!v.is_array() || v.empty() || !v[0].is_array()) throw ConfigError(where, "expected an array of rows");
  const auto rows = static_cast<Index>(v.size());
  const auto cols = static_cast<Index>(v[0].size());
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Vector row = vector_of(v[static_cast<std::size_t>(i)], where);
    if (row.size() != cols) throw ConfigError(where, "rows have different lengths");
    out.row(i) = row.transpose();
  }
  return out;
}

Index dimension_of(const json& p, const std::string& where) {
  const long d = integer(p.at("dimension"), where + "dimension");
  if (d < 1) throw ConfigError(where + "dimension", "must be >= 1");
  return static_cast<Index>(d);
}

// Quadratic curvature from A, diag or diag_range (linearly spaced diagonal).
Matrix curvature(const json& p, const std::string& where) {
  const int given = static_cast<int>(p.contains("A")) + static_cast<int>(p.contains("diag")) +
                    static_cast<int>(p.contains("diag_range"));
  if (given != 1) throw ConfigError(where + "A", "give exactly one of A, diag, diag_range");
  if (p.contains("A")) return matrix_of(p.at("A"), where + "A");
  if (p.contains("diag")) return vector_of(p.at("diag"), where + "diag").asDiagonal();
  const Index d = dimension_of(p, where);
  const Vector range = vector_of(p.at("diag_range"), where + "diag_range");
  if (range.size() != 2) throw ConfigError(where + "diag_range", "expected [lo, hi]");
  return Vector::LinSpaced(d, range[0], range[1]).asDiagonal();
}

ProblemSpec build_problem_at(const json& p, const std::string& where) {
  if (!p.is_object() || !p.contains("family")) throw ConfigError(where + "family", "missing");
  const std::string family = p.at("family").get<std::string>();
  const double noise = p.contains("noise_std") ? number(p, "noise_std", where) : 0.0;
  const double box = p.contains("box_radius") ? number(p, "box_radius", where) : 1.0;
  if (noise < 0) throw ConfigError(where + "noise_std", "must be >= 0");

  if (family == "quadratic") {
    check_keys(p, where.empty() ? "problem" : where.substr(0, where.size() - 1),
               {"family", "dimension", "noise_std", "box_radius", "A", "diag", "diag_range", "c", "minimizer",
                "offset"});
    const Matrix A = curvature(p, where);
    const Index d = A.rows();
    if (p.contains("dimension") && dimension_of(p, where) != d)
      throw ConfigError(where + "dimension", "does not match the curvature");
    if (p.contains("c") && p.contains("minimizer")) throw ConfigError(where + "c", "give c or minimizer, not both");
    if (p.contains("minimizer"))
      return ProblemSpec::quadratic_with_minimizer(A, vector_or_scalar(p.at("minimizer"), d, where + "minimizer"),
                                                   noise, box);
    const Vector c = p.contains("c") ? vector_or_scalar(p.at("c"), d, where + "c") : Vector::Zero(d);
    const double offset = p.contains("offset") ? number(p, "offset", where) : 0.0;
    return ProblemSpec::quadratic(A, c, offset, noise, box);
  }
  if (family == "linear") {
    check_keys(p, where.empty() ? "problem" : where.substr(0, where.size() - 1),
               {"family", "dimension", "noise_std", "c"});
    if (!p.contains("c")) throw ConfigError(where + "c", "missing");
    const Vector c = p.at("c").is_number() ? vector_or_scalar(p.at("c"), dimension_of(p, where), where + "c")
                                           : vector_of(p.at("c"), where + "c");
    return ProblemSpec::linear(c, noise);
  }
  if (family == "least_squares") {
    check_keys(p, where.empty() ? "problem" : where.substr(0, where.size() - 1),
               {"family", "noise_std", "box_radius", "A", "b"});
    if (!p.contains("A") || !p.contains("b")) throw ConfigError(where + "A", "least_squares needs A and b");
    return ProblemSpec::least_squares(matrix_of(p.at("A"), where + "A"), vector_of(p.at("b"), where + "b"), noise,
                                      box);
  }
  if (family == "strict_saddle_2d") {
    check_keys(p, where.empty() ? "problem" : where.substr(0, where.size() - 1),
               {"family", "noise_std", "box_radius"});
    return ProblemSpec::strict_saddle_2d(noise, p.contains("box_radius") ? box : 2.0);
  }
  if (family == "sparse_support") {
    check_keys(p, where.empty() ? "problem" : where.substr(0, where.size() - 1),
               {"family", "dimension", "noise_std", "support", "support_count", "inner"});
    const Index d = dimension_of(p, where);
    std::vector<Index> support;
    if (p.contains("support") == p.contains("support_count"))
      throw ConfigError(where + "support", "give exactly one of support, support_count");
    if (p.contains("support")) {
      for (const auto& v : p.at("support")) support.push_back(static_cast<Index>(integer(v, where + "support")));
    } else {
      const long s = integer(p.at("support_count"), where + "support_count");
      if (s < 1 || s > d) throw ConfigError(where + "support_count", "must lie in [1, dimension]");
      // Spread evenly so the support is not a prefix of the coordinates.
      for (long i = 0; i < s; ++i) support.push_back(static_cast<Index>(i * (d / s) + (d / s) / 2));
    }
    if (!p.contains("inner")) throw ConfigError(where + "inner", "missing");
    const ProblemSpec inner = build_problem_at(p.at("inner"), where + "inner.");
    try {
      return ProblemSpec::sparse_support(d, support, inner, noise);
    } catch (const ContractViolation& e) {
      throw ConfigError(where + "support", e.what());
    }
  }
  throw ConfigError(where + "family", fmt::format("unknown problem family '{}'", family));
}

std::set<std::string> schedule_keys(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::zscg:
    case Algorithm::zscg_convex: return {"mode", "nu", "m", "B_Lsigma", "sigma"};
    case Algorithm::zscg_accelerated: return {"mode", "nu", "m0", "B_Lsigma", "sigma", "D_X0", "L", "icg_max_iters"};
    case Algorithm::zsgd_inexact: return {"mode", "nu", "m", "gamma", "mu", "L", "icg_max_iters"};
    case Algorithm::zsgd:
    case Algorithm::zsgd_truncated: return {"mode", "nu", "gamma", "gamma0", "s_hat", "C_hat", "D0", "sigma", "L"};
    case Algorithm::zscrn: return {"mode", "nu", "m", "b", "alpha", "eps", "B", "sigma", "L", "L_H", "gap0", "subsolver"};
  }
  return {};
}

std::vector<std::string> practical_keys(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::zscg:
    case Algorithm::zscg_convex:
    case Algorithm::zsgd_inexact: return {"nu", "m"};
    case Algorithm::zscg_accelerated: return {"nu", "m0"};
    case Algorithm::zsgd:
    case Algorithm::zsgd_truncated: return {"nu"};
    case Algorithm::zscrn: return {"nu", "m", "b", "alpha"};
  }
  return {};
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::zscg: return "zscg";
    case Algorithm::zscg_convex: return "zscg_convex";
    case Algorithm::zscg_accelerated: return "zscg_accelerated";
    case Algorithm::zsgd_inexact: return "zsgd_inexact";
    case Algorithm::zsgd: return "zsgd";
    case Algorithm::zsgd_truncated: return "zsgd_truncated";
    case Algorithm::zscrn: return "zscrn";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::zscg, Algorithm::zscg_convex, Algorithm::zscg_accelerated, Algorithm::zsgd_inexact,
                      Algorithm::zsgd, Algorithm::zsgd_truncated, Algorithm::zscrn})
    if (to_string(a) == name) return a;
  throw ConfigError("algorithm", fmt::format("unknown algorithm '{}'", name));
}

bool needs_constraint(Algorithm algorithm) {
  return algorithm == Algorithm::zscg || algorithm == Algorithm::zscg_convex ||
         algorithm == Algorithm::zscg_accelerated || algorithm == Algorithm::zsgd_inexact;
}

std::vector<std::string> summary_criteria(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::zscg:
    case Algorithm::zscg_convex:
    case Algorithm::zscg_accelerated: return {"fw_gap", "gp_norm", "f_gap"};
    case Algorithm::zsgd_inexact: return {"gp_norm", "gp_norm_sq", "fw_gap", "f_gap"};
    case Algorithm::zsgd:
    case Algorithm::zsgd_truncated: return {"grad_l1_sq", "f_gap", "avg_f_gap", "nnz"};
    case Algorithm::zscrn: return {"grad_norm", "lambda_min", "f_gap"};
  }
  return {};
}

ProblemSpec build_problem(const nlohmann::json& json) { return build_problem_at(json, "problem."); }

ConstraintSet<double> build_constraint(const nlohmann::json& c, Index d) {
  check_keys(c, "constraint", {"kind", "radius", "lower", "upper"});
  if (!c.contains("kind")) throw ConfigError("constraint.kind", "missing");
  const std::string kind = c.at("kind").get<std::string>();
  try {
    if (kind == "box") {
      if (!c.contains("lower") || !c.contains("upper"))
        throw ConfigError("constraint.lower", "box needs lower and upper");
      return ConstraintSet<double>::box(vector_or_scalar(c.at("lower"), d, "constraint.lower"),
                                        vector_or_scalar(c.at("upper"), d, "constraint.upper"));
    }
    if (!c.contains("radius")) throw ConfigError("constraint.radius", "missing");
    const double r = number(c, "radius", "constraint.");
    if (kind == "l1_ball") return ConstraintSet<double>::l1_ball(r);
    if (kind == "l2_ball") return ConstraintSet<double>::l2_ball(r);
    if (kind == "simplex") return ConstraintSet<double>::simplex(r);
  } catch (const ContractViolation& e) {
    throw ConfigError("constraint", e.what());
  }
  throw ConfigError("constraint.kind", fmt::format("unknown set '{}'", kind));
}

static ExperimentConfig parse_normalized(const nlohmann::json& j);

ExperimentConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "", {"schema_version", "algorithm", "problem", "constraint", "set", "schedule", "schedule_mode",
                     "seeds", "seed", "N", "x0", "verify", "output", "eps"});
  // Short forms: "set" for "constraint", "seed" for a one-element "seeds",
  // "schedule_mode" for "schedule.mode", and a scalar N.
  json normalized = j;
  const auto alias = [&](const char* short_key, const char* key) {
    if (!normalized.contains(short_key)) return;
    if (normalized.contains(key)) throw ConfigError(short_key, fmt::format("given together with '{}'", key));
    normalized[key] = normalized[short_key];
    normalized.erase(short_key);
  };
  alias("set", "constraint");
  alias("seed", "seeds");
  if (normalized.contains("seeds") && !normalized.at("seeds").is_array())
    normalized["seeds"] = json::array({normalized.at("seeds")});
  if (normalized.contains("N") && !normalized.at("N").is_array()) normalized["N"] = json::array({normalized.at("N")});
  if (normalized.contains("schedule_mode")) {
    json& schedule = normalized["schedule"];
    if (schedule.is_null()) schedule = json::object();
    if (!schedule.is_object()) throw ConfigError("schedule", "expected an object");
    if (schedule.contains("mode")) throw ConfigError("schedule_mode", "given together with 'schedule.mode'");
    schedule["mode"] = normalized.at("schedule_mode");
    normalized.erase("schedule_mode");
  }
  return parse_normalized(normalized);
}

static ExperimentConfig parse_normalized(const json& j) {
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  if (integer(j.at("schema_version"), "schema_version") != kConfigSchemaVersion)
    throw ConfigError("schema_version", fmt::format("unsupported version, expected {}", kConfigSchemaVersion));
  for (const char* key : {"algorithm", "problem", "seeds", "N"})
    if (!j.contains(key)) throw ConfigError(key, "missing");

  ExperimentConfig cfg;
  if (!j.at("algorithm").is_string()) throw ConfigError("algorithm", "expected a string");
  cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  cfg.problem = j.at("problem");
  const ProblemSpec problem = build_problem(cfg.problem);
  const Index d = problem.dimension();

  if (j.contains("constraint")) {
    cfg.constraint = j.at("constraint");
    build_constraint(*cfg.constraint, d);
  }
  if (needs_constraint(cfg.algorithm) && !cfg.constraint)
    throw ConfigError("constraint", fmt::format("{} needs a constraint set", to_string(cfg.algorithm)));
  if (!needs_constraint(cfg.algorithm) && cfg.constraint)
    throw ConfigError("constraint", fmt::format("{} is unconstrained", to_string(cfg.algorithm)));

  cfg.schedule = j.contains("schedule") ? j.at("schedule") : json::object();
  check_keys(cfg.schedule, "schedule", schedule_keys(cfg.algorithm));
  if (cfg.schedule.contains("mode")) {
    const auto& mode = cfg.schedule.at("mode");
    if (!mode.is_string() || (mode != "paper" && mode != "practical"))
      throw ConfigError("schedule.mode", "expected \"paper\" or \"practical\"");
  }
  if (cfg.schedule.contains("mode") && cfg.schedule.at("mode") == "practical") {
    for (const std::string& key : practical_keys(cfg.algorithm))
      if (!cfg.schedule.contains(key)) throw ConfigError("schedule." + key, "required in practical mode");
    if ((cfg.algorithm == Algorithm::zsgd || cfg.algorithm == Algorithm::zsgd_truncated) &&
        cfg.schedule.contains("gamma") == cfg.schedule.contains("gamma0"))
      throw ConfigError("schedule.gamma", "practical mode needs exactly one of gamma, gamma0");
  }
  if (cfg.schedule.contains("subsolver")) check_keys(cfg.schedule.at("subsolver"), "schedule.subsolver", {"tol", "max_iters"});

  const auto& seeds = j.at("seeds");
  if (!seeds.is_array() || seeds.empty()) throw ConfigError("seeds", "expected a nonempty array");
  for (const auto& s : seeds) {
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long>() >= 0))
      throw ConfigError("seeds", "seeds must be nonnegative integers");
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  const auto& grid = j.at("N");
  if (!grid.is_array() || grid.empty()) throw ConfigError("N", "expected a nonempty array");
  for (const auto& n : grid) {
    const long v = integer(n, "N");
    if (v < 1) throw ConfigError("N", "entries must be >= 1");
    if (!cfg.N.empty() && v <= cfg.N.back()) throw ConfigError("N", "grid must be strictly ascending");
    cfg.N.push_back(v);
  }
  if (j.contains("x0")) cfg.x0 = vector_or_scalar(j.at("x0"), d, "x0");
  if (j.contains("verify")) {
    if (!j.at("verify").is_boolean()) throw ConfigError("verify", "expected true or false");
    cfg.verify = j.at("verify").get<bool>();
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("output", "expected a path string");
    cfg.output = j.at("output").get<std::string>();
  }
  if (j.contains("eps")) {
    cfg.eps = number(j, "eps", "");
    if (*cfg.eps <= 0) throw ConfigError("eps", "must be positive");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

}  // namespace zo
