#pragma once

// JSON forms of library values. Object keys come out sorted, so dumps are byte-stable.

#include <nlohmann/json.hpp>

#include "kamforge/diophantine.hpp"
#include "kamforge/lie.hpp"
#include "kamforge/normalform.hpp"
#include "kamforge/series.hpp"

namespace kamforge::io {

using json = nlohmann::json;

/// "rational", "float64" or "quadratic(d)".
ScalarContext parse_context(const std::string& text);
std::string context_name(const ScalarContext& ctx);

json to_json(const Scalar& x);
Scalar scalar_from_json(const ScalarContext& ctx, const json& j);
json to_json(const CertifiedDecimal& c);

json to_json(const TruncationSpec& t);
TruncationSpec trunc_from_json(int n, const json& j);

json to_json(const PoissonSeries& f);
PoissonSeries series_from_json(const json& j);

/// [[I...], [J...], k, "coef"] rows against a known window; `with_q` false reads [[J...], "coef"].
PoissonSeries terms_from_json(const ScalarContext& ctx, const TruncationSpec& trunc, BracketMode mode, const json& rows,
                              bool with_q);

json to_json(const Generator& g);
json to_json(const NormalFormResult& r);
json to_json(const NormalSpaceClass& c);
json to_json(const DiophantineEstimate& e);
json to_json(const LiouvilleWitness& w);
json to_json(const FourierTable& t);
json to_json(const DecayFit& f);
json to_json(const MeasureEstimate& m);
json to_json(const IterationTrace& t);
json to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

std::string big_to_string(const BigInt& x);

}  // namespace kamforge::io
