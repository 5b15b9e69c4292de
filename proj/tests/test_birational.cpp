#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "torelli/birational.hpp"
#include "torelli/errors.hpp"

using namespace torelli;

namespace {

const char* kToy = R"({
  "parameters": ["a", "b", "c"],
  "varieties": [
    {"name": "A3", "anchor": "affine space", "vars": ["x1", "x2", "x3"], "action": {"x1": "omega*x1"}},
    {"name": "L", "anchor": "line", "vars": ["s"]}
  ],
  "maps": [
    {"name": "id", "anchor": "identity", "domain": [{"variety": "A3"}], "codomain": "A3",
     "components": [["x1", "x1"], ["x2", "x2"], ["x3", "x3"]]},
    {"name": "const", "anchor": "constant", "domain": [{"variety": "A3"}], "codomain": "L",
     "components": [["s", "a + 2"]]},
    {"name": "wrong", "anchor": "not equivariant", "domain": [{"variety": "A3"}], "codomain": "A3",
     "components": [["x1", "x1^2"], ["x2", "x2"], ["x3", "x3"]]}
  ],
  "equivariance": [
    {"map": "id", "anchor": "identity", "domain": [1], "codomain": 1},
    {"map": "wrong", "anchor": "squares the multiplier", "domain": [1], "codomain": 1}
  ],
  "compositions": []
})";

CheckOptions quick() {
  CheckOptions o;
  o.triples = 5;
  o.samples = 20;
  return o;
}

}  // namespace

TEST_CASE("expressions") {
  Expression e = Expression::parse("1 + 2*x^3 - y/2");
  e.bind({{"x", 0}, {"y", 1}});
  CHECK(std::abs(e.eval({cd(2, 0), cd(4, 0)}) - cd(15, 0)) < 1e-15);
  Expression u = Expression::parse("omega^3 + i^2 + (1 - x)^-1");
  u.bind({{"x", 0}});
  CHECK(std::abs(u.eval({cd(3, 0)}) - cd(-0.5, 0)) < 1e-15);
  CHECK_THROWS_AS(Expression::parse("1 + * 2"), InputError);
  CHECK_THROWS_AS(Expression::parse("(x"), InputError);

  Expression r = Expression::parse("p");
  r.bind({{"q", 0}}, {{"p", "q"}});
  CHECK(r.eval({cd(7, 0)}) == cd(7, 0));
}

TEST_CASE("sampling on the appendix varieties") {
  const Manifest m = builtin_manifest();
  const Params p = random_parameters(m, 5);
  REQUIRE(p.size() == 3);

  const SampleSet curve = sample_on_variety(m, "C", p, 7, 100);
  CHECK(curve.max_residual < 1e-12);
  REQUIRE(curve.points.size() == 100);
  for (const auto& pt : curve.points) {
    const cd x = pt[0], y = pt[1];
    const cd rhs = x * (x - 1.0) * (x - p[0]) * (x - p[1]) * (x - p[2]);
    CHECK(std::abs(y * y * y - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }

  const SampleSet fermat = sample_on_variety(m, "F0", p, 8, 100);
  CHECK(fermat.max_residual < 1e-12);
  for (const auto& pt : fermat.points) {
    const cd s = 1.0 + pt[0] * pt[0] * pt[0] + pt[1] * pt[1] * pt[1];
    CHECK(std::abs(s) < 1e-12 * std::max(1.0, std::norm(pt[0]) * std::abs(pt[0])));
  }

  CHECK(sample_on_variety(m, "Y", p, 9, 100).max_residual < 1e-12);

  // Deterministic in the seed.
  const SampleSet again = sample_on_variety(m, "C", p, 7, 100);
  CHECK(again.points == curve.points);
}

TEST_CASE("maps, actions and composites of the appendix") {
  const Manifest m = builtin_manifest();
  for (const char* name : {"C x F0 -> W", "X1 -> X2", "S -> S1", "S1 -> S2", "C1 x F1 -> S2"}) {
    const CheckReport r = verify_map(m, name, quick());
    CHECK_MESSAGE(r.passed, name);
    CHECK(r.max_residual < 1e-9);
  }
  for (const auto& e : m.equivariance)
    if (e.map == "C x F0 -> W" || e.map == "C1 x F1 -> S2") CHECK(verify_equivariance(m, e, quick()).passed);
  for (const auto& c : m.compositions) CHECK(verify_composition(m, c, quick()).passed);
  CHECK_THROWS_AS(verify_map(m, "no such map", quick()), InputError);
}

TEST_CASE("Jacobian ranks") {
  const Manifest m = builtin_manifest();
  const Params p = random_parameters(m, 11);
  const SampleSet pts = sample_on_variety(m, "X1", p, 12, 20);
  CHECK(variety_dimension(m, "X2") == 3);
  for (const auto& pt : pts.points) CHECK(jacobian_rank(m, "X1 -> X2", p, pt) == 3);

  const Manifest toy = parse_manifest(kToy);
  const Params tp = random_parameters(toy, 1);
  const Point at{cd(0.3, 0.1), cd(-1.2, 0.4), cd(0.7, -0.9)};
  CHECK(jacobian_rank(toy, "id", tp, at) == 3);
  CHECK(jacobian_rank(toy, "const", tp, at) == 0);
}

TEST_CASE("failures are reported with the substitution") {
  const Manifest toy = parse_manifest(kToy);
  const CheckReport ok = verify_equivariance(toy, toy.equivariance[0], quick());
  CHECK(ok.passed);
  CHECK(ok.max_residual == 0.0);
  const CheckReport bad = verify_equivariance(toy, toy.equivariance[1], quick());
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.dump.empty());
  CHECK(bad.max_residual > 1e-3);

  CHECK_THROWS_AS(parse_manifest("{\"parameters\": 3}"), InputError);
  CHECK_THROWS_AS(parse_manifest("not json"), InputError);
}

TEST_CASE("whole manifest at reduced size") {
  const ManifestReport rep = run_manifest(builtin_manifest(), quick());
  CHECK(rep.all_passed());
  int maps = 0, actions = 0, ranks = 0;
  for (const auto& r : rep.rows) {
    maps += r.kind == "map";
    actions += r.kind == "equivariance";
    ranks += r.kind == "rank";
  }
  CHECK(maps == 14);
  CHECK(actions == 18);
  CHECK(ranks == 14);
}
