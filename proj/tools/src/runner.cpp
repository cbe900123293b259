#include "kamforge_tools/runner.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "kamforge/diophantine.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/io.hpp"
#include "kamforge/lie.hpp"
#include "kamforge/normalform.hpp"

#ifndef KAMFORGE_VERSION
#define KAMFORGE_VERSION "0.0.0"
#endif

namespace kamforge::tools {

namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::SchemaError, msg); }

const json& need(const json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  return j.at(key);
}

int need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) schema(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

int opt_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  return need_int(j, key);
}

double opt_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) schema(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::uint64_t opt_u64(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned() && !(j.at(key).is_number_integer() && j.at(key).get<long long>() >= 0)) {
    schema(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return j.at(key).get<std::uint64_t>();
}

ScalarContext context_of(const json& s) {
  if (!s.contains("context")) return ScalarContext::rational();
  if (!s.at("context").is_string()) schema("context must be a string");
  return io::parse_context(s.at("context").get<std::string>());
}

Rational rational_of(const json& j, const char* key, const Rational& fallback) {
  if (!j.contains(key)) return fallback;
  const Scalar x = io::scalar_from_json(ScalarContext::rational(), j.at(key));
  return *x.as_rational();
}

FrequencyVector omega_of(const json& s) {
  const json& w = need(s, "omega");
  if (!w.is_array() || w.empty()) schema("omega must be a nonempty array of scalar literals");
  const ScalarContext ctx = context_of(s);
  FrequencyVector omega;
  for (const auto& x : w) omega.entries.push_back(io::scalar_from_json(ctx, x));
  return omega;
}

std::vector<int> int_list(const json& s, const char* key) {
  const json& v = need(s, key);
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number_integer()) schema(std::string("entries of '") + key + "' must be integers");
      out.push_back(x.get<int>());
    }
  } else {
    schema(std::string("field '") + key + "' must be an integer or an array of integers");
  }
  if (out.empty()) schema(std::string("field '") + key + "' is empty");
  return out;
}

// ---------------------------------------------------------------------------

struct Outcome {
  json results;
  json diagnostics = json::object();
};

Outcome run_normal_form(const json& s, bool kolmogorov) {
  const int n = need_int(s, "n");
  const ScalarContext ctx = context_of(s);
  const TruncationSpec trunc = io::trunc_from_json(n, need(s, "trunc"));
  const PoissonSeries h = io::terms_from_json(ctx, trunc, BracketMode::torus, need(s, "hamiltonian"), false);
  const PoissonSeries Q = io::terms_from_json(ctx, trunc, BracketMode::torus, need(s, "perturbation"), true);
  const IntegrableHamiltonian H = IntegrableHamiltonian::from_series(h);
  const NormalFormResult r = kolmogorov ? kolmogorov_normal_form(H, Q) : formal_normal_form(H, Q);

  Outcome out;
  out.results = io::to_json(r);
  out.results["oracle_match"] = compose_flows(r.generators, r.input) == r.normal;
  if (kolmogorov) {
    bool ok = true;
    for (const auto& [key, c] : r.remainder.terms()) ok = ok && key.p_degree() >= 2 && key.k >= 1;
    out.results["decomposition_ok"] = ok;
  } else {
    bool q_free = true;
    for (const auto& [key, c] : r.normal.terms()) q_free = q_free && key.q_free();
    out.results["q_free"] = q_free;
  }
  std::optional<DenominatorRecord> smallest;
  for (const auto& d : r.diagnostics) {
    if (d.smallest && (!smallest || (d.smallest->value - smallest->value).sign() < 0)) smallest = d.smallest;
  }
  out.diagnostics["dropped_terms"] = r.dropped_terms;
  out.diagnostics["smallest_denominator"] =
      smallest ? json{{"value", io::to_json(certify(smallest->value))}, {"vector", smallest->vector}} : json(nullptr);
  return out;
}

Outcome run_resonances(const json& s) {
  const FrequencyVector omega = omega_of(s);
  const int N = need_int(s, "N");
  Outcome out;
  out.results["resonances"] = resonances(omega.entries, N);
  return out;
}

Outcome run_diophantine(const json& s) {
  const FrequencyVector omega = omega_of(s);
  const Rational nu = rational_of(s, "nu", Rational(1));
  json estimates = json::array();
  for (int N : int_list(s, "N")) estimates.push_back(io::to_json(kolmogorov_constant(omega, nu, N)));
  Outcome out;
  out.results["estimates"] = estimates;
  return out;
}

Outcome run_liouville(const json& s) {
  std::vector<int> ks = s.contains("ks") ? int_list(s, "ks") : (s.contains("k") ? int_list(s, "k") : std::vector<int>{1, 2, 3});
  const Rational nu = rational_of(s, "nu", Rational(1));
  const int m = opt_int(s, "m", 4);
  std::vector<LiouvilleWitness> ws;
  json arr = json::array();
  for (int k : ks) {
    ws.push_back(liouville_witness(k, nu, m));
    arr.push_back(io::to_json(ws.back()));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < ws.size(); ++i) decreasing = decreasing && compare_products(ws[i], ws[i - 1], nu) < 0;
  Outcome out;
  out.results["witnesses"] = arr;
  out.results["products_strictly_decreasing"] = decreasing;
  return out;
}

Outcome run_hadamard(const json& s) {
  const FrequencyVector omega = omega_of(s);
  const int N = need_int(s, "N");
  const double rate = opt_double(s, "decay", 2.0);
  const FourierTable h = small_denominator_series(omega, N);
  const FourierTable f = exponential_table(omega.n(), N, rate);
  const FourierTable hf = hadamard_apply(h, f);
  Outcome out;
  const DecayFit fit = decay_fit(hf);
  out.results["fit_h"] = io::to_json(decay_fit(h));
  out.results["fit_f"] = io::to_json(decay_fit(f));
  out.results["fit_product"] = io::to_json(fit);
  out.results["product_decays"] = fit.slope < 0;
  if (s.value("emit_tables", false)) out.results["product"] = io::to_json(hf);
  out.diagnostics["support"] = hf.coefficients.size();
  return out;
}

Outcome run_measure(const json& s) {
  MeasureParams p;
  p.n = opt_int(s, "n", 2);
  p.R = opt_double(s, "R", 1.0);
  p.nu = rational_of(s, "nu", Rational(1));
  p.N = opt_int(s, "N", 50);
  p.samples = opt_u64(s, "samples", 100000);
  p.seed = opt_u64(s, "seed", 0);
  p.partitions = static_cast<unsigned>(opt_u64(s, "partitions", 1));
  std::vector<Rational> Cs;
  if (s.contains("Cs")) {
    if (!s.at("Cs").is_array() || s.at("Cs").empty()) schema("Cs must be a nonempty array");
    for (const auto& c : s.at("Cs")) Cs.push_back(*io::scalar_from_json(ScalarContext::rational(), c).as_rational());
  } else {
    Cs.push_back(rational_of(s, "C", Rational(1, 10)));
  }
  json rows = json::array();
  std::vector<std::pair<double, double>> ratios;
  std::vector<std::pair<double, double>> fractions;
  for (const auto& C : Cs) {
    p.C = C;
    const MeasureEstimate m = measure_estimate(p);
    const double c = C.get_d();
    json row = io::to_json(m);
    row["C"] = C.get_str();
    if (c > 0) {
      row["ratio"] = m.fraction_bad / c;
      row["ratio_stderr"] = m.stderr_ / c;
      ratios.emplace_back(m.fraction_bad / c, m.stderr_ / c);
    }
    fractions.emplace_back(c, m.fraction_bad);
    rows.push_back(row);
  }
  bool consistent = true;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    for (std::size_t k = i + 1; k < ratios.size(); ++k) {
      const double se = std::sqrt(ratios[i].second * ratios[i].second + ratios[k].second * ratios[k].second);
      consistent = consistent && std::fabs(ratios[i].first - ratios[k].first) <= 3 * se;
    }
  }
  std::sort(fractions.begin(), fractions.end());
  bool monotone = true;
  for (std::size_t i = 1; i < fractions.size(); ++i) monotone = monotone && fractions[i].second >= fractions[i - 1].second;
  Outcome out;
  out.results["estimates"] = rows;
  out.results["ratios_consistent_3se"] = consistent;
  out.results["monotone_in_C"] = monotone;
  out.diagnostics["partitions"] = std::max(1u, p.partitions);
  return out;
}

LieOptions lie_options(const json& s) {
  LieOptions o;
  o.max_iter = opt_int(s, "max_iter", 50);
  o.tol = opt_double(s, "tol", 1e-13);
  if (s.contains("basin")) o.basin = opt_double(s, "basin", 0.0);
  o.seed = opt_u64(s, "seed", 0);
  return o;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) schema("vector must be a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) schema("vector entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Outcome run_lie_homogeneous(const json& s) {
  const std::string action_name = s.value("action", "standard");
  const LieOptions opts = lie_options(s);
  Outcome out;
  std::unique_ptr<LinearAction> action;
  Vector a;
  Vector b;
  if (action_name == "standard") {
    a = vector_from_json(need(s, "a"));
    b = vector_from_json(need(s, "b"));
    action = std::make_unique<StandardAction>(a.size());
  } else if (action_name == "adjoint") {
    const Matrix A = io::matrix_from_json(need(s, "a"));
    const Matrix B = io::matrix_from_json(need(s, "b"));
    if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != A.cols()) schema("a and b must be equal square matrices");
    a = vec(A);
    b = vec(B);
    action = std::make_unique<AdjointAction>(A.rows());
  } else {
    schema("unknown action '" + action_name + "'");
  }
  if (a.size() != b.size()) schema("a and b differ in size");
  const HomogeneousResult r = lie_iterate_homogeneous(*action, a, b, least_squares_right_inverse(*action, a), opts);
  json gens = json::array();
  for (const auto& g : r.generators) gens.push_back(io::to_json(g));
  out.results["generators"] = gens;
  out.results["group_element"] = io::to_json(r.group_element);
  out.results["final_point"] = vector_to_json(r.final_point);
  out.results["residual_norm"] = r.residual.norm();
  out.results["trace"] = io::to_json(r.trace);
  out.diagnostics["action"] = action->name();
  return out;
}

Outcome run_lie_parametric(const json& s) {
  const Matrix a = io::matrix_from_json(need(s, "a"));
  const Matrix b = io::matrix_from_json(need(s, "b"));
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols()) schema("a and b must be equal square matrices");
  const LieOptions opts = lie_options(s);
  const SubspaceBasis F = transversal_from_commutant(a, opts.seed);
  const ParametricResult r = lie_iterate_parametric(a, b, F, opts);
  Outcome out;
  json gens = json::array();
  for (const auto& g : r.generators) gens.push_back(io::to_json(g));
  out.results["generators"] = gens;
  out.results["alpha_total"] = io::to_json(r.alpha_total);
  out.results["normal_form"] = io::to_json(Matrix(a + r.alpha_total));
  out.results["residual_norm"] = r.residual.norm();
  out.results["trace"] = io::to_json(r.trace);
  out.diagnostics["transversal_dim"] = F.dim();
  return out;
}

Outcome run_selftest_kind(const json& s) {
  SelftestOptions o;
  o.seed = opt_u64(s, "seed", 0);
  o.flip_bracket_sign = s.value("flip_bracket_sign", false);
  Outcome out;
  out.results = selftest(o);
  return out;
}

const std::map<std::string, std::function<Outcome(const json&)>>& handlers() {
  static const std::map<std::string, std::function<Outcome(const json&)>> table{
      {"formal-nf", [](const json& s) { return run_normal_form(s, false); }},
      {"kolmogorov-nf", [](const json& s) { return run_normal_form(s, true); }},
      {"resonances", run_resonances},
      {"diophantine", run_diophantine},
      {"liouville", run_liouville},
      {"hadamard", run_hadamard},
      {"measure", run_measure},
      {"lie-homogeneous", run_lie_homogeneous},
      {"lie-parametric", run_lie_parametric},
      {"selftest", run_selftest_kind},
  };
  return table;
}

json error_json(ErrorCode code, const std::string& message) {
  return json{{"code", std::string(to_string(code))}, {"message", message}};
}

}  // namespace

std::string version() { return KAMFORGE_VERSION; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunOutcome run_scenario(const json& scenario, const RunOptions& opts) {
  RunOutcome outcome;
  json& report = outcome.report;
  report["version"] = version();
  report["scenario"] = scenario;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!scenario.is_object()) schema("scenario must be a JSON object");
    const json& kind = need(scenario, "kind");
    if (!kind.is_string()) schema("kind must be a string");
    const auto it = handlers().find(kind.get<std::string>());
    if (it == handlers().end()) schema("unknown scenario kind '" + kind.get<std::string>() + "'");
    Outcome out = it->second(scenario);
    report["status"] = "ok";
    report["results"] = std::move(out.results);
    report["diagnostics"] = std::move(out.diagnostics);
  } catch (const ResonantDenominator& e) {
    report["status"] = "error";
    report["error"] = error_json(e.code(), e.what());
    report["error"]["lattice_vector"] = e.lattice_vector();
    report["error"]["order"] = e.order();
    outcome.exit_code = 1;
  } catch (const Error& e) {
    report["status"] = "error";
    report["error"] = error_json(e.code(), e.what());
    outcome.exit_code = e.code() == ErrorCode::SchemaError ? 2 : 1;
  } catch (const json::exception& e) {
    report["status"] = "error";
    report["error"] = error_json(ErrorCode::SchemaError, e.what());
    outcome.exit_code = 2;
  }
  if (opts.timings) {
    report["timings"] = json{
        {"wall_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
  }
  return outcome;
}

RunOutcome run_scenario_file(const std::string& path, const RunOptions& opts) {
  std::ifstream in(path);
  if (!in) {
    RunOutcome o;
    o.report = json{{"version", version()},
                    {"status", "error"},
                    {"error", error_json(ErrorCode::SchemaError, "cannot read scenario file '" + path + "'")}};
    o.exit_code = 2;
    return o;
  }
  json scenario;
  try {
    scenario = json::parse(in);
  } catch (const json::parse_error& e) {
    RunOutcome o;
    o.report = json{{"version", version()},
                    {"status", "error"},
                    {"error", error_json(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what())}};
    o.exit_code = 2;
    return o;
  }
  return run_scenario(scenario, opts);
}

}  // namespace kamforge::tools
