#include "kamforge/io.hpp"

#include <cmath>

#include "kamforge/errors.hpp"

namespace kamforge::io {

namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorCode::SchemaError, msg); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) schema(std::string("missing field '") + key + "'");
  return j.at(key);
}

int need_int(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number_integer()) schema(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

json lattice_json(const Exponents& e, int n) {
  json a = json::array();
  for (int i = 0; i < n; ++i) a.push_back(e[i]);
  return a;
}

Exponents read_exponents(const json& j, int n, bool nonnegative) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    schema("exponent vector must be an array of length " + std::to_string(n));
  }
  Exponents e{};
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_number_integer()) schema("exponents must be integers");
    e[i] = j[i].get<int>();
    if (nonnegative && e[i] < 0) schema("p exponents must be nonnegative");
  }
  return e;
}

json optional_denominator(const std::optional<DenominatorRecord>& d) {
  if (!d) return nullptr;
  return json{{"value", to_json(certify(d->value))}, {"vector", d->vector}};
}

}  // namespace

std::string big_to_string(const BigInt& x) { return x.get_str(); }

ScalarContext parse_context(const std::string& text) {
  if (text == "rational") return ScalarContext::rational();
  if (text == "float64") return ScalarContext::float64();
  if (text.rfind("quadratic(", 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(10, text.size() - 11);
    char* end = nullptr;
    const long d = std::strtol(inner.c_str(), &end, 10);
    if (inner.empty() || *end != '\0') schema("malformed context '" + text + "'");
    return ScalarContext::quadratic(d);
  }
  schema("unknown scalar context '" + text + "'");
}

std::string context_name(const ScalarContext& ctx) { return ctx.describe(); }

json to_json(const Scalar& x) { return x.literal(); }

Scalar scalar_from_json(const ScalarContext& ctx, const json& j) {
  if (j.is_string()) return Scalar::parse(ctx, j.get<std::string>());
  if (j.is_number_integer()) return Scalar::from_int(ctx, j.get<long>());
  if (j.is_number_float()) {
    if (ctx.kind == ScalarKind::float64) return Scalar(j.get<double>());
    return Scalar::parse(ctx, j.dump());
  }
  schema("scalar must be a string literal or a number");
}

json to_json(const CertifiedDecimal& c) { return json{{"value", c.value}, {"error", c.error}}; }

json to_json(const TruncationSpec& t) { return json{{"Dp", t.Dp}, {"Dt", t.Dt}, {"Nq", t.Nq}}; }

TruncationSpec trunc_from_json(int n, const json& j) {
  TruncationSpec t{n, need_int(j, "Dp"), need_int(j, "Dt"), need_int(j, "Nq")};
  if (n < 1 || n > kMaxDim) schema("n must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (t.Dp < 0 || t.Dt < 0 || t.Nq < 0) schema("truncation bounds must be nonnegative");
  return t;
}

json to_json(const PoissonSeries& f) {
  json terms = json::array();
  for (const auto& [key, c] : f.terms()) {
    terms.push_back(json::array({lattice_json(key.I, f.n()), lattice_json(key.J, f.n()), key.k, c.literal()}));
  }
  return json{{"n", f.n()},
              {"context", context_name(f.context())},
              {"trunc", to_json(f.trunc())},
              {"mode", std::string(to_string(f.mode()))},
              {"terms", terms}};
}

namespace {

BracketMode parse_mode(const json& j) {
  if (!j.is_string()) schema("mode must be a string");
  const auto s = j.get<std::string>();
  if (s == "torus") return BracketMode::torus;
  if (s == "symplectic") return BracketMode::symplectic;
  schema("unknown bracket mode '" + s + "'");
}

}  // namespace

PoissonSeries series_from_json(const json& j) {
  const int n = need_int(j, "n");
  const json& ctx_j = need(j, "context");
  if (!ctx_j.is_string()) schema("context must be a string");
  const ScalarContext ctx = parse_context(ctx_j.get<std::string>());
  const TruncationSpec trunc = trunc_from_json(n, need(j, "trunc"));
  const BracketMode mode = j.contains("mode") ? parse_mode(j.at("mode")) : BracketMode::torus;
  return terms_from_json(ctx, trunc, mode, need(j, "terms"), true);
}

PoissonSeries terms_from_json(const ScalarContext& ctx, const TruncationSpec& trunc, BracketMode mode, const json& rows,
                              bool with_q) {
  if (!rows.is_array()) schema("term list must be an array");
  PoissonSeries f(ctx, trunc, mode);
  for (const auto& row : rows) {
    TermKey key;
    if (with_q) {
      if (!row.is_array() || row.size() != 4) schema("series term must be [[I], [J], k, coefficient]");
      key.I = read_exponents(row[0], trunc.n, false);
      key.J = read_exponents(row[1], trunc.n, true);
      if (!row[2].is_number_integer() || row[2].get<int>() < 0) schema("t-degree must be a nonnegative integer");
      key.k = row[2].get<int>();
      if (!trunc.admits(key)) fail(ErrorCode::TruncationExceeded, "input term lies outside the truncation window");
      f.add_term(key, scalar_from_json(ctx, row[3]));
    } else {
      if (!row.is_array() || row.size() != 2) schema("hamiltonian term must be [[J], coefficient]");
      key.J = read_exponents(row[0], trunc.n, true);
      if (!trunc.admits(key)) fail(ErrorCode::TruncationExceeded, "input term lies outside the truncation window");
      f.add_term(key, scalar_from_json(ctx, row[1]));
    }
  }
  return f;
}

json to_json(const Generator& g) {
  if (const auto* h = std::get_if<HamiltonianGenerator>(&g)) return json{{"kind", "hamiltonian"}, {"S", to_json(h->S)}};
  const auto& tr = std::get<TranslationGenerator>(g);
  json d = json::array();
  for (const auto& x : tr.d) d.push_back(x.literal());
  return json{{"kind", "translation"}, {"order", tr.order}, {"d", d}};
}

json to_json(const NormalFormResult& r) {
  json gens = json::array();
  for (const auto& g : r.generators) gens.push_back(to_json(g));
  json diags = json::array();
  for (const auto& d : r.diagnostics) {
    diags.push_back(json{{"order", d.order},
                         {"eliminated", d.eliminated},
                         {"smallest_denominator", optional_denominator(d.smallest)},
                         {"dropped", d.dropped}});
  }
  json casimir = json::array();
  for (int k = 1; k <= r.normal.trunc().Dt; ++k) {
    TermKey key;
    key.k = k;
    casimir.push_back(r.casimir.coeff(key).literal());
  }
  return json{{"kind", r.kind == NormalFormKind::formal ? "formal" : "kolmogorov"},
              {"generators", gens},
              {"normal", to_json(r.normal)},
              {"casimir", to_json(r.casimir)},
              {"casimir_coefficients", casimir},
              {"remainder", to_json(r.remainder)},
              {"dropped_terms", r.dropped_terms},
              {"diagnostics", diags}};
}

json to_json(const NormalSpaceClass& c) {
  json nu = json::array();
  for (const auto& x : c.nu) nu.push_back(x.literal());
  return json{{"nu", nu},
              {"certificate",
               json{{"g", to_json(c.g)}, {"ideal_part", to_json(c.ideal_part)}, {"constant", c.constant.literal()}}}};
}

json to_json(const DiophantineEstimate& e) {
  return json{{"C_est", to_json(e.C_est)},
              {"nu", e.nu.get_str()},
              {"N", e.N},
              {"worst", e.worst},
              {"exact", e.exact},
              {"norm", "euclidean"}};
}

json to_json(const LiouvilleWitness& w) {
  json beta = json::array();
  for (const auto& b : w.beta) beta.push_back(big_to_string(b));
  return json{{"k", w.k},
              {"m", w.m},
              {"beta", beta},
              {"pairing_bound", to_json(w.pairing_bound)},
              {"tail_bound", to_json(certify(w.tail_bound))},
              {"product", to_json(w.product)}};
}

json to_json(const FourierTable& t) {
  json rows = json::array();
  for (const auto& [I, c] : t.coefficients) rows.push_back(json::array({I, c.value, c.error}));
  return json{{"source", t.source}, {"coefficients", rows}};
}

json to_json(const DecayFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"points", f.points}};
}

json to_json(const MeasureEstimate& m) {
  return json{{"fraction_bad", m.fraction_bad},
              {"stderr", m.stderr_},
              {"bad", m.bad},
              {"samples", m.samples},
              {"partitions", m.partitions},
              {"min_abs_margin", m.min_abs_margin},
              {"exact_retests", m.exact_retests}};
}

json to_json(const IterationTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back(json{{"b_norm", s.b_norm},
                         {"xi_norm", s.xi_norm},
                         {"alpha_norm", s.alpha_norm}});
  }
  return json{{"steps", steps},
              {"final_error", t.final_error},
              {"order", t.order ? json(*t.order) : json(nullptr)},
              {"measured_C", t.measured_C ? json(*t.measured_C) : json(nullptr)},
              {"termination", t.termination},
              {"basin", t.basin}};
}

json to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) schema("matrix must be a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) schema("matrix rows must be nonempty arrays");
  Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) schema("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) schema("matrix entries must be numbers");
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return M;
}

}  // namespace kamforge::io
