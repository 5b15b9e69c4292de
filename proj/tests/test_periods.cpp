#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "torelli/errors.hpp"
#include "torelli/periods.hpp"

using namespace torelli;

namespace {

const EisensteinInt w = EisensteinInt::omega();

Configuration roots_of_unity() {
  std::array<cd, 6> z;
  for (int k = 0; k < 6; ++k) z[k] = std::polar(1.0, 2 * oracle::pi * k / 6);
  return Configuration::finite(z);
}

Configuration jittered_base() {
  Configuration c = default_base_configuration();
  c.z[2] += cd(0, 0.1);
  c.z[4] -= cd(0, 0.2);
  return c;
}

Configuration random_real(std::mt19937& rng) {
  std::uniform_real_distribution<double> gap(0.4, 1.6);
  std::array<cd, 6> z;
  double x = -2.0;
  for (auto& p : z) p = x += gap(rng);
  return Configuration::finite(z);
}

std::vector<cd> sorted(const Configuration& c) {
  std::vector<cd> p;
  for (int k : pinned_order(c)) p.push_back(c.z[k]);
  return p;
}

double projective_gap(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
  const cd s = b.dot(a) / b.squaredNorm();
  return (a - s * b).norm() / a.norm();
}

}  // namespace

TEST_CASE("slit periods against an independent quadrature") {
  const Configuration c = roots_of_unity();
  oracle::ContourPeriods ref(sorted(c), {});
  for (int j = 1; j <= 5; ++j) {
    const SlitValue v = lauricella_period(c, j);
    CHECK(std::abs(v.value - ref.slit(j)) < 1e-10);
    CHECK(v.error <= 1e-10);
  }
}

TEST_CASE("homogeneity under real scaling") {
  const Configuration c = roots_of_unity();
  for (double alpha : {0.25, 3.0, 17.5}) {
    Configuration s = c;
    for (auto& z : s.z) z *= alpha;
    for (int j = 1; j <= 5; ++j) {
      const cd a = lauricella_period(c, j).value, b = lauricella_period(s, j).value;
      CHECK(std::abs(b * alpha - a) < 1e-10 * std::abs(a));
    }
  }
}

TEST_CASE("halving the target moves each period by less than the reported error") {
  const Configuration c = jittered_base();
  for (int j = 1; j <= 5; ++j) {
    const SlitValue coarse = lauricella_period(c, j, 1e-6);
    const SlitValue fine = lauricella_period(c, j, 5e-7);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.error + fine.error + 1e-15);
  }
}

TEST_CASE("vanishing period of a colliding pair") {
  Configuration c = default_base_configuration();
  std::vector<double> lx, ly;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    c.z[1] = c.z[0] + eps;
    lx.push_back(std::log(eps));
    ly.push_back(std::log(std::abs(lauricella_period(c, 1).value)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  const double slope = sxy / sxx;
  CHECK(slope > 0.31);
  CHECK(slope < 0.36);

  c.z[1] = c.z[0];
  CHECK_THROWS(lauricella_period(c, 1));
}

TEST_CASE("five-period relation and affine invariance") {
  std::mt19937 rng(23);
  for (int n = 0; n < 10; ++n) {
    const Configuration c = random_real(rng);
    const PeriodVector v = period_vector(c);
    REQUIRE(v.fifth.has_value());
    CHECK(v.relation_residual < 1e-8);
    const cd wc = w.to_complex();
    const cd predicted = wc * v.values[0] - v.values[1] + wc * v.values[3];
    CHECK(std::abs(*v.fifth - predicted) < 1e-8 * v.values.cwiseAbs().maxCoeff());

    std::uniform_real_distribution<double> a(0.2, 5.0), b(-4.0, 4.0);
    const double alpha = a(rng), beta = b(rng);
    Configuration moved = c;
    for (auto& z : moved.z) z = alpha * z + beta;
    CHECK(projective_gap(v.values, period_vector(moved).values) < 1e-8);
  }
}

TEST_CASE("continuation along trivial and single-letter words") {
  const auto& cert = fixture::certificate();
  const Configuration base = default_base_configuration();

  const MonodromyMatrix empty = continue_periods(base, {});
  CHECK(empty.exact.is_identity());
  CHECK(empty.float_residual < 1e-10);

  const MonodromyMatrix back = continue_periods(base, {2, -2});
  CHECK(back.exact.is_identity());

  const HermitianForm& h = cert.form();
  for (int i : {1, 3}) {
    const MonodromyMatrix m = continue_periods(base, {i});
    CHECK(m.exact == fixture::generator(i));
    const ReflectionData rd = reflection_data(m.exact, h);
    CHECK(rd.multiplier == -w);
    CHECK(h.eval(rd.root, rd.root) == EisensteinInt(1));

    const MonodromyMatrix sq = continue_periods(base, {i, i});
    CHECK(sq.exact == fixture::generator(i).pow(2));
    CHECK(reflection_data(sq.exact, h).multiplier == w * w);
  }

  // The transition of a word is the left-to-right product of its letters.
  CHECK(continue_periods(base, {1, 2}).exact == fixture::generator(1) * fixture::generator(2));
  CHECK(continue_periods(base, {2, -3}).exact == fixture::generator(2) * fixture::generator(3).inverse());
}

TEST_CASE("reflection data round trip") {
  const HermitianForm h = HermitianForm::standard();
  const ShortRoot e1 = make_short_root(h, unit_vector(0));
  const ReflectionData rd = reflection_data(reflection_matrix(h, e1, -w), h);
  CHECK(rd.multiplier == -w);
  bool unit_multiple = false;
  for (const auto& u : units()) unit_multiple = unit_multiple || u * rd.root == unit_vector(0);
  CHECK(unit_multiple);
  CHECK_THROWS(reflection_data(EisensteinMatrix::identity(), h));
  CHECK_THROWS(reflection_data(EisensteinMatrix::scalar(w), h));
}

TEST_CASE("derived generators and invariant form") {
  const auto& cert = fixture::certificate();
  const HermitianForm& h = cert.form();
  CHECK(cert.gram.solution_dimension == 1);
  CHECK(signature(h) == std::make_pair(3, 1));
  CHECK(is_unimodular(h));
  for (int i = 1; i <= 5; ++i) {
    const MonodromyMatrix& m = cert.generators[i - 1];
    CHECK(m.float_residual < 1e-6);
    CHECK(is_isometry(h, m.exact));
    CHECK(cert.reflections[i - 1].multiplier == -w);
    CHECK(h.eval(cert.reflections[i - 1].root, cert.reflections[i - 1].root) == EisensteinInt(1));
    CHECK(reflection_data(m.exact.pow(2), h).multiplier == w * w);
  }
  // Regression: the Gram matrix in the pinned convention.
  const EisensteinMatrix& g = h.gram();
  const EisensteinInt o(0), one(1), mw = -w, m1w = EisensteinInt(-1, -1), p1w = EisensteinInt(1, 1);
  const std::array<std::array<EisensteinInt, 4>, 4> expect{{{one, o, mw, one}, {o, o, m1w, mw}, {p1w, w, o, o},
                                                             {one, p1w, o, one}}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g(i, j) == expect[i][j]);
}

TEST_CASE("braid and commutation relations hold exactly") {
  const auto& cert = fixture::certificate();
  CHECK(cert.relations.all_hold());
  CHECK(cert.relations.relations.size() == 10);
  const auto& M = [](int i) { return fixture::generator(i); };
  CHECK(M(1) * M(2) * M(1) == M(2) * M(1) * M(2));
  CHECK(M(1) * M(3) == M(3) * M(1));
  CHECK((M(1) * M(1).inverse()).is_identity());

  auto broken = cert.generators;
  broken[2] = broken[0];
  CHECK_FALSE(verify_braid_relations(broken).all_hold());
}

TEST_CASE("rotation of all points about the origin") {
  const std::array<cd, 5> z5{cd(0.13, 0.21), cd(1.37, -0.42), cd(2.24, 0.55), cd(-0.71, 1.16), cd(0.45, -1.31)};
  const MonodromyMatrix full = scalar_monodromy_check(z5, 1.0);
  CHECK(full.exact == EisensteinMatrix::scalar(w));
  CHECK(full.float_residual < 1e-6);
  CHECK(scalar_monodromy_check(z5, 3.0).exact.is_identity());

  Configuration c;
  for (int k = 0; k < 5; ++k) c.z[k] = z5[k];
  c.infinity = 5;
  const ContinuationResult there_and_back = continue_along([c](double t) {
    Configuration r = c;
    const cd rot = std::polar(1.0, oracle::pi * (1.0 - std::abs(1.0 - 2.0 * t)));
    for (int k = 0; k < 5; ++k) r.z[k] = c.z[k] * rot;
    return r;
  });
  CHECK(there_and_back.transition.is_identity());
}

TEST_CASE("ball points and distances") {
  const auto& cert = fixture::certificate();
  const HermitianForm& h = cert.form();
  std::mt19937 rng(29);
  for (int n = 0; n < 5; ++n) {
    const Eigen::Vector4cd a = period_vector(random_real(rng)).values;
    const Eigen::Vector4cd b = period_vector(random_real(rng)).values;
    CHECK(h.norm(a) < 0);
    const BallPoint p = ball_point(a, h), q = ball_point(b, h);
    CHECK(h.norm(p.v) == doctest::Approx(-1.0).epsilon(1e-12));
    const BallPoint pw = ball_point(w.to_complex() * a, h);
    CHECK((pw.v - p.v).norm() < 1e-12);
    CHECK(ball_distance(p, p, h) < 1e-7);
    CHECK(ball_distance(p, q, h) == doctest::Approx(ball_distance(q, p, h)).epsilon(1e-12));
    for (int i = 1; i <= 5; ++i) {
      const Eigen::Matrix4cd M = fixture::generator(i).to_complex();
      const BallPoint mp = ball_point(M * a, h), mq = ball_point(M * b, h);
      CHECK(std::abs(ball_distance(mp, mq, h) - ball_distance(p, q, h)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(ball_point(Eigen::Vector4cd(1, 0, 0, 0), HermitianForm::standard()), VerificationError);
}

TEST_CASE("generators act on periods as the half-twists do") {
  const auto& cert = fixture::certificate();
  const Configuration c = jittered_base();
  const Eigen::Vector4cd P = period_vector(c).values;
  const auto p = sorted(c);
  for (int i = 1; i <= 5; ++i) {
    oracle::ContourPeriods twisted(p, oracle::half_twist(p, i));
    Eigen::Vector4cd moved;
    for (int j = 0; j < 4; ++j) moved(j) = twisted.slit(j + 1);
    const Eigen::Vector4cd predicted = cert.generators[i - 1].exact.to_complex() * P;
    CHECK((moved - predicted).norm() < 1e-10 * P.norm());
  }
}
