#pragma once

#include <string>

#include "kamforge/io.hpp"

namespace kamforge::testing_support {

/// Terms as [[I], [J], k, "coef"] rows.
inline PoissonSeries S(const std::string& ctx, TruncationSpec t, const std::string& rows,
                       BracketMode mode = BracketMode::torus) {
  return io::terms_from_json(io::parse_context(ctx), t, mode, nlohmann::json::parse(rows), true);
}

inline TermKey K(std::initializer_list<int> I, std::initializer_list<int> J, int k = 0) {
  TermKey key;
  int i = 0;
  for (int x : I) key.I[i++] = x;
  i = 0;
  for (int x : J) key.J[i++] = x;
  key.k = k;
  return key;
}

inline Scalar Q2(const Rational& a, const Rational& b) {
  return Scalar::from_quadratic(ScalarContext::quadratic(2), a, b);
}

}  // namespace kamforge::testing_support
