// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "support/oracles.hpp"
#include "torelli/birational.hpp"
#include "torelli/io.hpp"
#include "torelli/residue.hpp"
#include "torelli/torelli.hpp"

using namespace torelli;

namespace {

using Clock = std::chrono::steady_clock;

const EisensteinInt w = EisensteinInt::omega();

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int n, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %2d  %-28s %s  %s [%.1fs]\n", n, title, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Blind scan of all 3^16 matrices: M^T G M = G.
std::vector<residue::OrthogonalElement> blind_scan(const residue::ResidueForm& form) {
  const auto& G = form.gram();
  std::vector<residue::OrthogonalElement> out;
  for (std::uint64_t code = 0; code < 43046721ULL; ++code) {
    residue::OrthogonalElement m;
    std::uint64_t c = code;
    for (int i = 4; i-- > 0;)
      for (int j = 4; j-- > 0;) {
        m.m[i][j] = static_cast<std::uint8_t>(c % 3);
        c /= 3;
      }
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = i; j < 4 && ok; ++j) {
        unsigned s = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) s += m.m[a][i] * G.m[a][b] * m.m[b][j];
        ok = s % 3 == G.m[i][j];
      }
    if (ok) out.push_back(m);
  }
  return out;
}

PointConfig random_rational(std::mt19937& rng, bool allow_infinity) {
  std::uniform_int_distribution<int> num(-24, 24), den(1, 5), coin(0, 2);
  std::set<Rational> seen;
  PointConfig c;
  const int inf_at = allow_infinity && coin(rng) == 0 ? std::uniform_int_distribution<int>(0, 5)(rng) : -1;
  for (int i = 0; i < 6; ++i) {
    if (i == inf_at) {
      c.points[i] = PointValue::infinity();
      continue;
    }
    Rational q;
    do q = Rational(num(rng), den(rng));
    while (!seen.insert(q).second);
    c.points[i] = PointValue::rational(q);
  }
  return c;
}

Mobius random_mobius(std::mt19937& rng) {
  std::uniform_int_distribution<int> e(-5, 5);
  for (;;) {
    std::array<Rational, 4> m{e(rng), e(rng), e(rng), e(rng)};
    if (m[0] * m[3] - m[1] * m[2] != 0) return Mobius::exact(m);
  }
}

Configuration random_complex(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    std::array<cd, 6> z;
    for (auto& p : z) p = cd(u(rng), u(rng));
    double gap = 1e300;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        gap = std::min(gap, std::abs(z[i] - z[j]));
        gap = std::min(gap, std::abs(z[i].real() - z[j].real()));
      }
    if (gap > 0.15) return Configuration::finite(z);
  }
}

double projective_gap(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) {
  const cd s = b.dot(a) / b.squaredNorm();
  return (a - s * b).norm() / a.norm();
}

}  // namespace

int main() {
  std::optional<MonodromyCertificate> derived;
  auto cert = [&]() -> const MonodromyCertificate& { return derived.value(); };
  std::string derive_error;
  const auto t0 = Clock::now();
  try {
    derived = derive_certificate();
  } catch (const std::exception& e) {
    derive_error = e.what();
  }
  const double derive_secs = std::chrono::duration<double>(Clock::now() - t0).count();

  report(1, "group audit", [&] {
    const io::GroupAudit a = io::run_group_audit(cert());
    const auto blind = blind_scan(a.form);
    const bool same = blind == a.group;
    return Outcome{a.group.size() == 1440 && same && a.kernel_order == 720 && a.s6.passed(),
                   fmt("|Aut(V,q)| = %zu (blind scan %zu, identical %s), |ker| = %zu, S6 check %s", a.group.size(),
                       blind.size(), same ? "yes" : "no", a.kernel_order, a.s6.passed() ? "passes" : "fails")};
  });

  report(2, "monodromy derivation", [&] {
    if (!derived) return Outcome{false, "derivation failed: " + derive_error};
    const HermitianForm& h = cert().form();
    double worst = 0.0;
    bool reflections = true;
    for (int i = 0; i < 5; ++i) {
      const EisensteinMatrix& m = cert().generators[i].exact;
      worst = std::max(worst, cert().generators[i].float_residual);
      const ReflectionData rd = reflection_data(m, h);
      const ReflectionData sq = reflection_data(m.pow(2), h);
      reflections = reflections && rd.multiplier == -w && h.norm(rd.root) == 1 &&
                    sq.multiplier == rd.multiplier * rd.multiplier;
    }
    const bool relations =
        verify_braid_relations(cert().generators).all_hold() && cert().relations.relations.size() == 10;
    return Outcome{worst < 1e-6 && relations && reflections && derive_secs < 600,
                   fmt("derived in %.1fs, max residual %.2e, 10 relations exact %s, -omega reflections %s",
                       derive_secs, worst, relations ? "yes" : "no", reflections ? "yes" : "no")};
  });

  report(3, "invariant Gram", [&] {
    const HermitianForm& h = cert().form();
    bool iso = true;
    for (const auto& g : cert().generators) iso = iso && is_isometry(h, g.exact);
    const auto sig = signature(h);
    const bool ok = cert().gram.solution_dimension == 1 && is_unimodular(h) && sig == std::make_pair(3, 1) && iso;
    return Outcome{ok, fmt("dimension %d, unimodular %s, signature (%d,%d)", cert().gram.solution_dimension,
                           is_unimodular(h) ? "yes" : "no", sig.first, sig.second)};
  });

  report(4, "finite shadow", [&] {
    const HermitianForm& h = cert().form();
    std::vector<residue::OrthogonalElement> gens;
    for (const auto& g : cert().generators) gens.push_back(residue::reduce_isometry(h, g.exact));
    const std::size_t order = residue::generated_group(gens).size();
    auto more = gens;
    more.push_back(residue::reduce_isometry(h, EisensteinMatrix::scalar(w)));
    const std::size_t with_scalar = residue::generated_group(more).size();
    const EisensteinMatrix& m1 = cert().generators[0].exact;
    const bool members = residue::in_gamma_theta(h, EisensteinMatrix::scalar(w)) && !residue::in_gamma_theta(h, m1) &&
                         residue::in_gamma_theta(h, m1.pow(2));
    return Outcome{order == 720 && with_scalar == 720 && members,
                   fmt("generated order %zu, with omega*I %zu, membership examples %s", order, with_scalar,
                       members ? "agree" : "disagree")};
  });

  report(5, "scalar monodromy", [&] {
    const MonodromyMatrix s = scalar_monodromy_check(
        {cd(0.13, 0.21), cd(1.37, -0.42), cd(2.24, 0.55), cd(-0.71, 1.16), cd(0.45, -1.31)});
    const bool scalar = s.exact == EisensteinMatrix::scalar(w);
    return Outcome{scalar && s.float_residual < 1e-6,
                   fmt("full rotation gives %s, residual %.2e", scalar ? "omega*I" : "another matrix",
                       s.float_residual)};
  });

  report(6, "period map sanity", [&] {
    const HermitianForm& h = cert().form();
    std::mt19937 rng(2024);
    int negative = 0;
    double min_mirror = 1e300, worst_affine = 0.0;
    for (int n = 0; n < 100; ++n) {
      const Configuration z = random_complex(rng);
      const PeriodVector v = period_vector(z);
      if (h.norm(v.values) < 0) ++negative;
      const BallPoint p = ball_point(v.values, h);
      min_mirror = std::min(min_mirror, mirror_locus_distance(p, 2, h).distance);
    }
    std::uniform_real_distribution<double> gap(0.3, 1.7), scale(0.1, 10.0), shift(-5.0, 5.0);
    for (int n = 0; n < 20; ++n) {
      std::array<cd, 6> z;
      double x = -3.0;
      for (auto& p : z) p = x += gap(rng);
      const double alpha = scale(rng), beta = shift(rng);
      std::array<cd, 6> y;
      for (int k = 0; k < 6; ++k) y[k] = alpha * z[k] + beta;
      worst_affine = std::max(worst_affine, projective_gap(period_vector(Configuration::finite(z)).values,
                                                           period_vector(Configuration::finite(y)).values));
    }
    std::uniform_int_distribution<int> pick(1, 5);
    double worst_twist = 0.0;
    for (int n = 0; n < 20; ++n) {
      // Redraw until the rotation disk of the pair holds no other point.
      int i = 0;
      Configuration z;
      std::vector<cd> p;
      for (double room = 0.0; room < 1.2;) {
        i = pick(rng);
        z = random_complex(rng);
        p.clear();
        for (int k : pinned_order(z)) p.push_back(z.z[k]);
        const cd mid = 0.5 * (p[i - 1] + p[i]);
        room = 1e300;
        for (int k = 0; k < 6; ++k)
          if (k != i - 1 && k != i) room = std::min(room, std::abs(p[k] - mid) / std::abs(0.5 * (p[i] - p[i - 1])));
      }
      oracle::ContourPeriods twisted(p, oracle::half_twist(p, i));
      Eigen::Vector4cd moved;
      for (int j = 0; j < 4; ++j) moved(j) = twisted.slit(j + 1);
      const Eigen::Vector4cd P = period_vector(z).values;
      const Eigen::Vector4cd predicted = cert().generators[i - 1].exact.to_complex() * P;
      worst_twist = std::max(worst_twist, (moved - predicted).norm() / moved.norm());
    }
    const bool ok = negative == 100 && min_mirror > 0 && worst_affine < 1e-8 && worst_twist < 1e-6;
    return Outcome{ok, fmt("h(v,v) < 0 on %d/100 (min mirror distance %.3g), affine %.1e, equivariance %.1e", negative,
                           min_mirror, worst_affine, worst_twist)};
  });

  report(7, "degeneration", [&] {
    Configuration z = default_base_configuration();
    for (int i = 0; i < 6; ++i) z.z[i] += cd(0, 0.1 * ((i * 7) % 5) - 0.2);
    const DegenerationReport r = degeneration_report(z, {1, 2}, default_eps_schedule(), cert());
    bool ranks = true;
    for (int k = 0; k <= 3; ++k) ranks = ranks && hodge_numbers(k).dim_q == 8 - 2 * k;
    const bool ok = std::abs(r.exponent - 1.0 / 3.0) <= 0.02 && r.mirror_monotone && r.limit_distance < 1e-4 &&
                    r.k_after == 1 && r.dim_q_after == 6 && ranks;
    return Outcome{ok, fmt("exponent %.6f, last mirror distance %.2e, limit gap %.2e, ranks 8-2k %s", r.exponent,
                           r.rows.back().mirror, r.limit_distance, ranks ? "yes" : "no")};
  });

  report(8, "Torelli property suite", [&] {
    std::mt19937 rng(7);
    int equivalent = 0, distinct = 0, disagreements = 0;
    double worst_eq = 0.0, closest = 1e300;
    for (int n = 0; n < 50; ++n) {
      const PointConfig a = random_rational(rng, true);
      std::array<int, 6> perm;
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const Mobius g = random_mobius(rng);
      PointConfig b;
      for (int i = 0; i < 6; ++i) b.points[i] = g.apply(a.points[perm[i]]);
      const TorelliVerdict v = torelli_check(a, b, cert());
      const bool ok = v.kind == TorelliVerdict::Kind::equivalent && v.ground_truth && v.word_matches &&
                      v.isometry && is_isometry(cert().form(), *v.isometry) && v.distance < 1e-6;
      equivalent += ok;
      if (!v.agrees()) ++disagreements;
      worst_eq = std::max(worst_eq, v.distance);
    }
    for (int n = 0; n < 50; ++n) {
      const PointConfig a = random_rational(rng, true), b = random_rational(rng, true);
      const TorelliVerdict v = torelli_check(a, b, cert());
      const bool ok = v.kind == TorelliVerdict::Kind::distinct && !v.ground_truth && v.depth == 6 && v.distance > 1e-3;
      distinct += ok;
      if (!v.agrees()) ++disagreements;
      closest = std::min(closest, v.distance);
    }
    return Outcome{equivalent == 50 && distinct == 50 && disagreements == 0,
                   fmt("equivalent %d/50 (max distance %.1e), distinct %d/50 (min distance %.3g), disagreements %d",
                       equivalent, worst_eq, distinct, closest, disagreements)};
  });

  report(9, "appendix manifest", [&] {
    const ManifestReport r = run_manifest(builtin_manifest());
    double worst = 0.0;
    int failed = 0;
    for (const auto& row : r.rows) {
      if (row.kind != "rank") worst = std::max(worst, row.max_residual);
      failed += !row.passed;
    }
    return Outcome{r.all_passed() && worst < 1e-9,
                   fmt("%zu rows, %d failed, max residual %.2e", r.rows.size(), failed, worst)};
  });

  report(10, "Hodge bookkeeping", [&] {
    const HodgeTable t = hodge_numbers(0);
    int h30 = 0, h21 = 0;
    for (auto [p, q] : oracle::wedge_cube(t.curve_omega.first, t.curve_omega.second)) {
      h30 += p == 3;
      h21 += p == 2;
    }
    const bool ok = t.threefold == std::make_pair(1, 3) && h30 == 1 && h21 == 3;
    return Outcome{ok, fmt("(h30, h21) = (%d, %d), wedge cube of (%d,%d) gives (%d, %d)", t.threefold.first,
                           t.threefold.second, t.curve_omega.first, t.curve_omega.second, h30, h21)};
  });

  std::printf("%s\n", failures == 0 ? "all criteria pass" : "some criteria fail");
  return failures == 0 ? 0 : 1;
}
