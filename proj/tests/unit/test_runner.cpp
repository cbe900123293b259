#include <gtest/gtest.h>

#include "kamforge_tools/runner.hpp"

using namespace kamforge::tools;
using nlohmann::json;

namespace {

json run(const char* text) { return run_scenario(json::parse(text)).report; }

}  // namespace

TEST(Runner, KolmogorovCasimirCoefficients) {
  const auto r = run(R"({"kind":"kolmogorov-nf","n":1,"trunc":{"Dp":3,"Dt":2,"Nq":2},
                         "hamiltonian":[[[1],"3"],[[2],"1/2"]],"perturbation":[[[0],[1],0,"1"]]})");
  ASSERT_EQ(r["status"], "ok");
  EXPECT_EQ(r["results"]["casimir_coefficients"], json::parse(R"(["-3","-1/2"])"));
  EXPECT_EQ(r["results"]["oracle_match"], true);
  EXPECT_EQ(r["results"]["generators"][0]["kind"], "translation");
  EXPECT_EQ(r["results"]["generators"][0]["d"], json::parse(R"(["-1"])"));
}

TEST(Runner, Resonances) {
  const auto r = run(R"({"kind":"resonances","omega":["1","-2"],"N":3})");
  EXPECT_EQ(r["results"]["resonances"], json::parse("[[2,1]]"));
}

TEST(Runner, ResonantDenominatorIsAReport) {
  const auto out = run_scenario(json::parse(R"({"kind":"formal-nf","n":2,"trunc":{"Dp":2,"Dt":2,"Nq":4},
      "hamiltonian":[[[1,0],"1"],[[0,1],"-2"]],"perturbation":[[[2,1],[0,0],0,"1"]]})"));
  EXPECT_EQ(out.exit_code, 1);
  EXPECT_EQ(out.report["status"], "error");
  EXPECT_EQ(out.report["error"]["code"], "ResonantDenominator");
  EXPECT_EQ(out.report["error"]["lattice_vector"], json::parse("[2,1]"));
}

TEST(Runner, SchemaErrors) {
  for (const char* s : {R"({"n":1})", R"({"kind":"nonsense"})", R"({"kind":"resonances","omega":"1"})",
                        R"({"kind":"kolmogorov-nf","n":"one"})", R"([1,2])",
                        R"({"kind":"liouville","ks":["a"]})"}) {
    const auto out = run_scenario(json::parse(s));
    EXPECT_EQ(out.exit_code, 2) << s;
    EXPECT_EQ(out.report["error"]["code"], "SchemaError") << s;
  }
  EXPECT_EQ(run_scenario_file("/nonexistent/scenario.json").exit_code, 2);
}

TEST(Runner, TimingsOnlyOnRequest) {
  const json s = json::parse(R"({"kind":"resonances","omega":["1","1"],"N":1})");
  EXPECT_FALSE(run_scenario(s).report.contains("timings"));
  RunOptions o;
  o.timings = true;
  EXPECT_TRUE(run_scenario(s, o).report.contains("timings"));
}

TEST(Runner, ReportsAreByteStable) {
  const json s = json::parse(R"({"kind":"liouville"})");
  EXPECT_EQ(dump(run_scenario(s).report), dump(run_scenario(s).report));
}

TEST(Selftest, AllPassAndDeterministic) {
  SelftestOptions o;
  o.seed = 7;
  const json a = selftest(o);
  EXPECT_EQ(a["all_pass"], true) << a.dump(2);
  EXPECT_EQ(dump(a), dump(selftest(o)));
}

TEST(Selftest, MutationBreaksEigenRelationOnly) {
  SelftestOptions o;
  o.seed = 7;
  o.flip_bracket_sign = true;
  const json r = selftest(o);
  bool jacobi = false, eigen = true;
  std::string detail;
  for (const auto& p : r["properties"]) {
    if (p["name"] == "jacobi/torus") jacobi = p["pass"];
    if (p["name"] == "eigen-relation") {
      eigen = p["pass"];
      detail = p["detail"];
    }
  }
  EXPECT_TRUE(jacobi);
  EXPECT_FALSE(eigen);
  EXPECT_NE(detail.find("sign reversed"), std::string::npos);
}
