#include <functional>
#include <random>
#include <sstream>

#include "kamforge/errors.hpp"
#include "kamforge/lie.hpp"
#include "kamforge/normalform.hpp"
#include "kamforge/sampling.hpp"
#include "kamforge_tools/runner.hpp"

namespace kamforge::tools {

namespace {

using Bracket = std::function<PoissonSeries(const PoissonSeries&, const PoissonSeries&)>;

struct Property {
  std::string name;
  bool pass = true;
  int trials = 0;
  std::string detail;

  void check(bool ok, const std::string& why) {
    ++trials;
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }

  json to_json() const { return json{{"name", name}, {"pass", pass}, {"trials", trials}, {"detail", detail}}; }
};

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

std::string lattice_str(const LatticeVector& I) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < I.size(); ++i) os << (i ? "," : "") << I[i];
  os << ")";
  return os.str();
}

TermKey key_of(int n, const Exponents& I, const Exponents& J, int k) {
  TermKey key;
  for (int i = 0; i < n; ++i) {
    key.I[i] = I[i];
    key.J[i] = J[i];
  }
  key.k = k;
  return key;
}

constexpr int kAxiomTrials = 200;
constexpr int kFlowTrials = 50;

void axioms(std::vector<Property>& out, BracketMode mode, const Bracket& br, std::uint64_t seed) {
  const std::string tag = std::string(to_string(mode));
  const TruncationSpec trunc{2, 4, 3, 4};
  const ScalarContext ctx = ScalarContext::rational();
  SeriesShape shape;
  auto rng = stream(seed, mode == BracketMode::torus ? 1 : 2);
  Property anti{"antisymmetry/" + tag};
  Property leib{"leibniz/" + tag};
  Property jac{"jacobi/" + tag};
  for (int i = 0; i < kAxiomTrials; ++i) {
    const PoissonSeries f = random_series(ctx, trunc, mode, shape, rng);
    const PoissonSeries g = random_series(ctx, trunc, mode, shape, rng);
    const PoissonSeries h = random_series(ctx, trunc, mode, shape, rng);
    anti.check((br(f, g) + br(g, f)).is_zero(), "{f,g} + {g,f} nonzero at trial " + std::to_string(i));
    leib.check(br(f, g * h) == br(f, g) * h + g * br(f, h), "Leibniz discrepancy at trial " + std::to_string(i));
    const PoissonSeries cyc = br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g));
    jac.check(cyc.is_zero(), "Jacobi cyclic sum has " + std::to_string(cyc.size()) + " terms at trial " +
                                 std::to_string(i));
  }
  out.push_back(anti);
  out.push_back(leib);
  out.push_back(jac);
}

void eigen_relation(std::vector<Property>& out, const Bracket& br, std::uint64_t seed) {
  const ScalarContext ctx = ScalarContext::quadratic(2);
  const TruncationSpec trunc{2, 2, 0, 20};
  PoissonSeries h(ctx, trunc);
  h.add_term(key_of(2, {}, {1, 0}, 0), Scalar::one(ctx));
  h.add_term(key_of(2, {}, {0, 1}, 0), Scalar::from_quadratic(ctx, 0, 1));
  h.add_term(key_of(2, {}, {0, 2}, 0), Scalar::from_rational(ctx, Rational(1, 2)));
  const IntegrableHamiltonian H = IntegrableHamiltonian::from_series(h);
  auto rng = stream(seed, 3);
  Property p{"eigen-relation"};
  for (int i = 0; i < 100; ++i) {
    const LatticeVector I = random_lattice(2, 20, rng);
    const TermKey qI = key_of(2, {I[0], I[1]}, {}, 0);
    const PoissonSeries mono = PoissonSeries::monomial(ctx, trunc, BracketMode::torus, qI, Scalar::one(ctx));
    const PoissonSeries lhs = br(h, mono).filter([](const TermKey& key) { return key.p_degree() == 0; });
    const Scalar w = H.pairing(qI.I);
    const PoissonSeries expected = PoissonSeries::monomial(ctx, trunc, BracketMode::torus, qI, w);
    std::string why;
    if (!(lhs == expected)) {
      const Scalar got = lhs.coeff(qI);
      why = "I=" + lattice_str(I) + ": expected " + w.literal() + ", got " + got.literal();
      if (!w.is_zero() && got == -w) why += " (sign reversed)";
    }
    p.check(why.empty(), why);
  }
  out.push_back(p);
}

void flows(std::vector<Property>& out, const Bracket& br, std::uint64_t seed) {
  const ScalarContext ctx = ScalarContext::rational();
  const TruncationSpec trunc{2, 8, 3, 8};
  SeriesShape shape;
  SeriesShape gen_shape;
  gen_shape.min_t = 1;
  auto rng = stream(seed, 4);
  Property ham_mult{"flow-multiplicative/hamiltonian"};
  Property ham_morph{"flow-morphism/hamiltonian"};
  Property tr_mult{"flow-multiplicative/translation"};
  Property tr_morph{"flow-morphism/translation"};
  std::uniform_int_distribution<int> order_dist(1, 2);
  for (int i = 0; i < kFlowTrials; ++i) {
    PoissonSeries S = random_series(ctx, trunc, BracketMode::torus, gen_shape, rng);
    if (S.is_zero()) S = PoissonSeries::monomial(ctx, trunc, BracketMode::torus, key_of(2, {1, 0}, {}, 1), Scalar::one(ctx));
    const PoissonSeries f = random_series(ctx, trunc, BracketMode::torus, shape, rng);
    const PoissonSeries g = random_series(ctx, trunc, BracketMode::torus, shape, rng);
    const std::string at = " at trial " + std::to_string(i);

    const Generator hg = HamiltonianGenerator{S};
    ham_mult.check(flow_apply(hg, f * g) == flow_apply(hg, f) * flow_apply(hg, g), "product not preserved" + at);
    ham_morph.check(flow_apply(hg, br(f, g)) == br(flow_apply(hg, f), flow_apply(hg, g)), "bracket not preserved" + at);

    TranslationGenerator tg{order_dist(rng), {random_scalar(ctx, rng), random_scalar(ctx, rng)}};
    const Generator tgen = tg;
    tr_mult.check(flow_apply(tgen, f * g) == flow_apply(tgen, f) * flow_apply(tgen, g), "product not preserved" + at);
    tr_morph.check(flow_apply(tgen, br(f, g)) == br(flow_apply(tgen, f), flow_apply(tgen, g)),
                   "bracket not preserved" + at);
  }
  out.push_back(ham_mult);
  out.push_back(ham_morph);
  out.push_back(tr_mult);
  out.push_back(tr_morph);
}

void oracles(std::vector<Property>& out, std::uint64_t seed) {
  Property formal{"oracle/formal-normal-form"};
  Property kolm{"oracle/kolmogorov-normal-form"};
  const ScalarContext rat = ScalarContext::rational();
  try {
    // H = p, Q = p^2 + pq + pq^-1
    const TruncationSpec t1{1, 3, 3, 4};
    PoissonSeries h(rat, t1);
    h.add_term(key_of(1, {}, {1}, 0), Scalar::one(rat));
    PoissonSeries Q(rat, t1);
    Q.add_term(key_of(1, {}, {2}, 0), Scalar::one(rat));
    Q.add_term(key_of(1, {1}, {1}, 0), Scalar::one(rat));
    Q.add_term(key_of(1, {-1}, {1}, 0), Scalar::one(rat));
    const NormalFormResult r = formal_normal_form(IntegrableHamiltonian::from_series(h), Q);
    bool q_free = true;
    for (const auto& [key, c] : r.normal.terms()) q_free = q_free && key.q_free();
    formal.check(q_free, "q-dependent term left in the normal form");
    formal.check(compose_flows(r.generators, r.input) == r.normal, "composed flows disagree with the normal form");
  } catch (const Error& e) {
    formal.check(false, e.what());
  }
  try {
    const ScalarContext q2 = ScalarContext::quadratic(2);
    const TruncationSpec t2{2, 2, 3, 2};
    PoissonSeries h(q2, t2);
    h.add_term(key_of(2, {}, {1, 0}, 0), Scalar::one(q2));
    h.add_term(key_of(2, {}, {0, 1}, 0), Scalar::from_quadratic(q2, 0, 1));
    const IntegrableHamiltonian H = IntegrableHamiltonian::from_series(h);
    auto rng = stream(seed, 5);
    SeriesShape shape;
    shape.max_p_degree = 1;
    shape.max_t = 0;
    shape.max_terms = 3;
    for (int i = 0; i < 3; ++i) {
      const PoissonSeries Q = random_series(q2, t2, BracketMode::torus, shape, rng);
      const NormalFormResult r = formal_normal_form(H, Q);
      bool q_free = true;
      for (const auto& [key, c] : r.normal.terms()) q_free = q_free && key.q_free();
      formal.check(q_free && compose_flows(r.generators, r.input) == r.normal,
                   "random perturbation " + std::to_string(i) + " not normalized");
    }
  } catch (const Error& e) {
    formal.check(false, e.what());
  }
  try {
    // omega = 3, alpha = 1/2, Q = p
    const TruncationSpec t{1, 3, 3, 2};
    PoissonSeries h(rat, t);
    h.add_term(key_of(1, {}, {1}, 0), Scalar::from_int(rat, 3));
    h.add_term(key_of(1, {}, {2}, 0), Scalar::from_rational(rat, Rational(1, 2)));
    PoissonSeries Q(rat, t);
    Q.add_term(key_of(1, {}, {1}, 0), Scalar::one(rat));
    const NormalFormResult r = kolmogorov_normal_form(IntegrableHamiltonian::from_series(h), Q);
    kolm.check(compose_flows(r.generators, r.input) == r.normal, "composed flows disagree with the normal form");
    const bool c1 = r.casimir.coeff(key_of(1, {}, {}, 1)) == Scalar::from_int(rat, -3);
    const bool c2 = r.casimir.coeff(key_of(1, {}, {}, 2)) == Scalar::from_rational(rat, Rational(-1, 2));
    kolm.check(c1 && c2, "c(t) differs from -3t - t^2/2");
    kolm.check(r.remainder.is_zero(), "nonzero remainder");
  } catch (const Error& e) {
    kolm.check(false, e.what());
  }
  out.push_back(formal);
  out.push_back(kolm);
}

void commutants(std::vector<Property>& out, std::uint64_t seed) {
  Property p{"commutant-orthogonality"};
  auto rng = stream(seed, 6);
  std::normal_distribution<double> gauss;
  const std::vector<Matrix> samples = [] {
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 1, 1, 2;
    Matrix j = Matrix::Zero(3, 3);
    j << 2, 1, 0, 0, 2, 0, 0, 0, 5;
    Matrix z = Matrix::Zero(2, 2);
    return std::vector<Matrix>{d, j, z};
  }();
  for (const Matrix& A : samples) {
    const SubspaceBasis F = transversal_from_commutant(A, rng());
    for (int i = 0; i < 10; ++i) {
      Matrix X(A.rows(), A.cols());
      for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index c = 0; c < X.cols(); ++c) X(r, c) = gauss(rng);
      const double res = orthogonality_residual(A, F, X);
      p.check(res <= 1e-10, "residual " + std::to_string(res));
    }
  }
  out.push_back(p);
}

void normal_spaces(std::vector<Property>& out) {
  Property p{"normal-space-certificates"};
  try {
    const ScalarContext q2 = ScalarContext::quadratic(2);
    const TruncationSpec t{2, 3, 0, 3};
    PoissonSeries h(q2, t);
    h.add_term(key_of(2, {}, {1, 0}, 0), Scalar::one(q2));
    h.add_term(key_of(2, {}, {0, 1}, 0), Scalar::from_quadratic(q2, 0, 1));
    const IntegrableHamiltonian H = IntegrableHamiltonian::from_series(h);
    for (int i = 0; i < 2; ++i) {
      Exponents J{};
      J[i] = 1;
      const PoissonSeries f = PoissonSeries::monomial(q2, t, BracketMode::torus, key_of(2, {}, J, 0), Scalar::one(q2));
      const NormalSpaceClass cls = normal_space_class(H, f);
      const bool unit = cls.nu[i] == Scalar::one(q2) && cls.nu[1 - i].is_zero();
      p.check(unit && reassemble(cls) == f, "class of p_" + std::to_string(i + 1));
    }
    const PoissonSeries f =
        PoissonSeries::monomial(q2, t, BracketMode::torus, key_of(2, {1, -1}, {}, 0), Scalar::one(q2));
    const NormalSpaceClass cls = normal_space_class(H, f);
    bool zero = true;
    for (const auto& x : cls.nu) zero = zero && x.is_zero();
    p.check(zero && reassemble(cls) == f, "class of q1/q2");

    const ScalarContext rat = ScalarContext::rational();
    const TruncationSpec ts{1, 4, 0, 4};
    PoissonSeries g(rat, ts, BracketMode::symplectic);
    g.add_term(key_of(1, {1}, {1}, 0), Scalar::one(rat));
    g.add_term(key_of(1, {2}, {2}, 0), Scalar::one(rat));
    const NormalSpaceClass hyp = hyperbolic_normal_space_class(g);
    p.check(hyp.nu.size() == 1 && hyp.nu[0] == Scalar::one(rat) && reassemble(hyp) == g, "class of pq + p^2q^2");
  } catch (const Error& e) {
    p.check(false, e.what());
  }
  out.push_back(p);
}

}  // namespace

json selftest(const SelftestOptions& opts) {
  const Bracket br = opts.flip_bracket_sign ? Bracket(poisson_bracket_flipped) : Bracket(poisson_bracket);
  std::vector<Property> props;
  axioms(props, BracketMode::torus, br, opts.seed);
  axioms(props, BracketMode::symplectic, br, opts.seed);
  eigen_relation(props, br, opts.seed);
  flows(props, br, opts.seed);
  oracles(props, opts.seed);
  commutants(props, opts.seed);
  normal_spaces(props);

  json list = json::array();
  int passed = 0;
  for (const auto& p : props) {
    list.push_back(p.to_json());
    passed += p.pass ? 1 : 0;
  }
  const int failed = static_cast<int>(props.size()) - passed;
  return json{{"seed", opts.seed},
              {"mutation", opts.flip_bracket_sign ? "bracket-sign-flipped" : "none"},
              {"properties", list},
              {"passed", passed},
              {"failed", failed},
              {"all_pass", failed == 0}};
}

}  // namespace kamforge::tools
