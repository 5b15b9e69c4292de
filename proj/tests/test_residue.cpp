#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "support/fixtures.hpp"
#include "torelli/io.hpp"
#include "torelli/residue.hpp"

using namespace torelli;
using namespace torelli::residue;

namespace {

const EisensteinInt w = EisensteinInt::omega();

// Every N x N matrix over F3, checked one by one.
template <std::size_t N>
std::vector<F3Mat<N>> blind_scan(const QuadraticForm<N>& form) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < N * N; ++i) total *= 3;
  std::vector<F3Mat<N>> out;
  for (std::size_t c = 0; c < total; ++c) {
    F3Mat<N> m;
    std::size_t x = c;
    for (std::size_t i = N; i-- > 0;)
      for (std::size_t j = N; j-- > 0;) {
        m.m[i][j] = static_cast<std::uint8_t>(x % 3);
        x /= 3;
      }
    if (form.preserves(m)) out.push_back(m);
  }
  return out;
}

template <std::size_t N>
QuadraticForm<N> diagonal_form(const std::array<std::uint8_t, N>& d) {
  F3Mat<N> g;
  for (std::size_t i = 0; i < N; ++i) g.m[i][i] = d[i];
  return QuadraticForm<N>(g);
}

const io::GroupAudit& audit() {
  static const io::GroupAudit a = io::run_group_audit(fixture::certificate());
  return a;
}

int lookup(const std::vector<OrthogonalElement>& group, const OrthogonalElement& g) {
  auto it = std::lower_bound(group.begin(), group.end(), g);
  REQUIRE(it != group.end());
  REQUIRE(*it == g);
  return static_cast<int>(it - group.begin());
}

EisensteinMatrix random_word(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(1, 6), gen(1, 5), sign(0, 1);
  EisensteinMatrix m = EisensteinMatrix::identity();
  for (int n = len(rng); n > 0; --n) {
    const EisensteinMatrix& g = fixture::generator(gen(rng));
    m = m * (sign(rng) ? g : g.pow(5));
  }
  return m;
}

}  // namespace

TEST_CASE("reduction of vectors") {
  CHECK(reduce_vector({theta(), EisensteinInt(0), EisensteinInt(0), EisensteinInt(0)}) == ResidueVector{0, 0, 0, 0});
  CHECK(reduce_vector(unit_vector(0)) == ResidueVector{1, 0, 0, 0});
  CHECK(reduce_vector({w, w * w, EisensteinInt(1), EisensteinInt(0)}) == ResidueVector{1, 1, 1, 0});
  // omega - 1 is divisible by theta: (omega - 1) * conj(theta) / 3 is integral.
  const EisensteinInt p = (w - EisensteinInt(1)) * theta().conj();
  CHECK(static_cast<long long>(p.a() % 3) == 0);
  CHECK(static_cast<long long>(p.b() % 3) == 0);

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-9, 9);
  for (int n = 0; n < 200; ++n) {
    EisVec v;
    for (auto& e : v) e = EisensteinInt(coef(rng), coef(rng));
    CHECK(is_zero(reduce_vector(theta() * v)));
  }
}

TEST_CASE("q is well defined on the quotient") {
  const HermitianForm& h = fixture::certificate().form();
  const ResidueForm form = residue_form(h);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int n = 0; n < 500; ++n) {
    EisVec x, y;
    for (auto& e : x) e = EisensteinInt(coef(rng), coef(rng));
    for (auto& e : y) e = EisensteinInt(coef(rng), coef(rng));
    const EisVec shifted = x + theta() * y;
    const EisensteinInt hx = h.eval(x, x), hs = h.eval(shifted, shifted);
    CHECK(hx.b() == 0);
    CHECK(reduce(hx) == reduce(hs));
    CHECK(form.q(reduce_vector(x)) == reduce(hx));
  }
}

TEST_CASE("column extension agrees with a blind scan in small rank") {
  for (const auto& d : {std::array<std::uint8_t, 2>{1, 1}, std::array<std::uint8_t, 2>{1, 2}}) {
    const auto form = diagonal_form<2>(d);
    CHECK(enumerate_orthogonal_group(form) == blind_scan(form));
  }
  for (const auto& d : {std::array<std::uint8_t, 3>{1, 1, 1}, std::array<std::uint8_t, 3>{1, 1, 2}}) {
    const auto form = diagonal_form<3>(d);
    const auto group = enumerate_orthogonal_group(form);
    CHECK(group == blind_scan(form));
    CHECK(group.size() == 48);
  }
  CHECK_THROWS_AS(enumerate_orthogonal_group(diagonal_form<2>({1, 0})), InputError);
}

TEST_CASE("orthogonal group of the residue form") {
  const auto& a = audit();
  CHECK(a.group.size() == 1440);
  CHECK(a.kernel_order == 720);
  CHECK(std::is_sorted(a.group.begin(), a.group.end()));
  CHECK(std::adjacent_find(a.group.begin(), a.group.end()) == a.group.end());
  for (const auto& g : a.group) REQUIRE(a.form.preserves(g));
}

TEST_CASE("spinor norm") {
  const auto& a = audit();
  CHECK(spinor_norm(a.form, OrthogonalElement::identity()) == 0);
  for (const auto& v : all_vectors<4>()) {
    const auto qv = a.form.q(v);
    if (qv == 0) continue;
    CHECK(spinor_norm(a.form, a.form.reflection(v)) == (qv == 2 ? 1 : 0));
  }

  // -I is the product of the reflections in an orthogonal anisotropic basis.
  std::vector<ResidueVector> frame;
  for (const auto& v : all_vectors<4>()) {
    if (a.form.q(v) == 0) continue;
    if (std::all_of(frame.begin(), frame.end(), [&](const ResidueVector& u) { return a.form.b(u, v) == 0; }))
      frame.push_back(v);
  }
  REQUIRE(frame.size() == 4);
  OrthogonalElement prod = OrthogonalElement::identity();
  unsigned qprod = 1;
  for (const auto& v : frame) {
    prod = prod * a.form.reflection(v);
    qprod = qprod * a.form.q(v) % 3;
  }
  OrthogonalElement minus = OrthogonalElement::identity();
  for (int i = 0; i < 4; ++i) minus.m[i][i] = 2;
  CHECK(prod == minus);
  CHECK(spinor_norm(a.form, minus) == (qprod == 2 ? 1 : 0));
  CHECK(std::binary_search(a.group.begin(), a.group.end(), minus));

  // Homomorphism on every pair, surjective onto Z/2.
  const std::size_t n = a.group.size();
  std::size_t failures = 0, odd = 0;
  for (std::size_t i = 0; i < n; ++i) {
    odd += a.spinor[i];
    for (std::size_t j = 0; j < n; ++j) {
      const int k = lookup(a.group, a.group[i] * a.group[j]);
      if (a.spinor[k] != (a.spinor[i] ^ a.spinor[j])) ++failures;
    }
  }
  CHECK(failures == 0);
  CHECK(odd == n / 2);
  for (std::size_t i = 0; i < n; i += 37) CHECK(a.spinor[i] == spinor_norm(a.form, a.group[i]));
}

TEST_CASE("reduction of isometries") {
  const auto& cert = fixture::certificate();
  const HermitianForm& h = cert.form();
  CHECK(reduce_isometry(h, EisensteinMatrix::identity()).is_identity());
  CHECK(reduce_isometry(h, EisensteinMatrix::scalar(w)).is_identity());
  const OrthogonalElement r1 = reduce_isometry(h, fixture::generator(1));
  CHECK_FALSE(r1.is_identity());
  CHECK((r1 * r1).is_identity());
  CHECK_THROWS_AS(reduce_isometry(h, EisensteinMatrix::scalar(EisensteinInt(2))), InputError);

  CHECK(in_gamma_theta(h, EisensteinMatrix::scalar(w)));
  CHECK_FALSE(in_gamma_theta(h, fixture::generator(1)));
  CHECK(in_gamma_theta(h, fixture::generator(1).pow(2)));

  std::mt19937 rng(17);
  for (int n = 0; n < 1000; ++n) {
    const EisensteinMatrix x = random_word(rng), y = random_word(rng);
    REQUIRE(reduce_isometry(h, x * y) == reduce_isometry(h, x) * reduce_isometry(h, y));
  }
}

TEST_CASE("S6 presentation of the reduced generators") {
  const auto& a = audit();
  CHECK(a.s6.passed());
  CHECK(a.s6.generated_order == 720);
  CHECK_FALSE(a.s6.abelian);
  CHECK(a.s6.spinor_norms == std::vector<int>(5, 0));
  CHECK(a.scalar_trivial);

  auto with_scalar = a.generators;
  with_scalar.push_back(reduce_isometry(fixture::certificate().form(), EisensteinMatrix::scalar(w)));
  CHECK(generated_group(with_scalar).size() == 720);

  auto broken = a.generators;
  broken[2] = broken[0];
  const S6Report bad = verify_s6(a.form, broken);
  CHECK_FALSE(bad.passed());
  CHECK_FALSE(bad.counterexamples.empty());
}
