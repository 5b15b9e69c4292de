#include "torelli/torelli.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

#include "torelli/errors.hpp"

namespace torelli {

namespace {

EisensteinMatrix word_product(const MonodromyCertificate& cert, const BraidWord& w) {
  EisensteinMatrix m = EisensteinMatrix::identity();
  for (int letter : w) {
    const EisensteinMatrix& g = cert.generators[std::abs(letter) - 1].exact;
    m = m * (letter > 0 ? g : g.inverse());
  }
  return m;
}

bool same_value(const PointValue& x, const PointValue& y) {
  if (x.is_infinity() || y.is_infinity()) return x.is_infinity() && y.is_infinity();
  if (x.is_exact() && y.is_exact()) return x.q() == y.q();
  return std::abs(x.z() - y.z()) <= kModuliTolerance * std::max(1.0, std::abs(x.z()));
}

// Moves a double point at infinity to a finite place; returns the map used.
Mobius finite_map(const PointConfig& c) {
  const int inf = c.infinity_index();
  if (inf < 0) return Mobius::identity();
  int mult = 0;
  for (const auto& p : c.points) mult += p.is_infinity();
  if (mult < 2) return Mobius::identity();
  // x -> 1 / (x - x0) with x0 not among the values
  for (int n = 0;; ++n) {
    const Rational x0 = (n % 2 == 0) ? Rational(n / 2) : Rational(-(n + 1) / 2);
    bool used = false;
    for (const auto& p : c.points) used = used || same_value(p, PointValue::rational(x0));
    if (!used) return Mobius::exact({Rational(0), Rational(1), Rational(1), -x0});
  }
}

std::vector<std::array<int, 2>> coincident_pairs(const PointConfig& c) {
  std::vector<std::array<int, 2>> out;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (same_value(c.points[i], c.points[j])) out.push_back({i, j});
  return out;
}

Eigen::Vector2cd proj(const PointValue& p) {
  if (p.is_infinity()) return {1.0, 0.0};
  return {p.z(), 1.0};
}

Eigen::Matrix2cd to_mat(const std::array<cd, 4>& m) {
  Eigen::Matrix2cd out;
  out << m[0], m[1], m[2], m[3];
  return out;
}

cd value(const Eigen::Vector2cd& x) { return x(0) / x(1); }

// Path r o g_t applied to the start points; r(x) = x / (1 + x/R) puts infinity at R.
// g_t is piecewise linear through the waypoints I, K, [L,] G.
struct MobiusPath {
  std::array<Eigen::Vector2cd, 6> start;
  Eigen::Matrix2cd K, L, G;  // waypoints; L is used only with three legs
  bool three_legs = false;
  double R = 1e9;
  double kappa = 0.0;
  std::vector<std::array<int, 2>> pairs;  // split pairs (first stays, second rotates at the end)
  double tail = 0.0;                      // fraction of s used for the final rotation leg

  Eigen::Matrix2cd g(double t) const {
    const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    if (three_legs) {
      if (t <= 1.0 / 3.0) return I + 3.0 * t * (K - I);
      if (t <= 2.0 / 3.0) return K + (3.0 * t - 1.0) * (L - K);
      return L + (3.0 * t - 2.0) * (G - L);
    }
    if (t <= 0.5) return I + 2.0 * t * (K - I);
    return K + (2.0 * t - 1.0) * (G - K);
  }

  double reparam(double s) const {
    const double t1 = 0.05;
    const double e = std::expm1(kappa);
    if (s < 0.25) return t1 * std::expm1(kappa * 4.0 * s) / e;
    if (s > 0.75) return 1.0 - t1 * std::expm1(kappa * 4.0 * (1.0 - s)) / e;
    return t1 + (1.0 - 2.0 * t1) * (s - 0.25) / 0.5;
  }

  std::array<cd, 6> main(double s) const {
    Eigen::Matrix2cd r;
    r << 1.0, 0.0, 1.0 / R, 1.0;
    const Eigen::Matrix2cd m = r * g(reparam(s));
    std::array<cd, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = value(m * start[i]);
    return out;
  }

  Configuration operator()(double s) const {
    const double split = 1.0 - tail;
    std::array<cd, 6> z = main(std::min(1.0, s / split));
    if (s > split) {
      // pairs turn one after another so that their walls are crossed separately
      const double u = (s - split) / tail * static_cast<double>(pairs.size());
      for (std::size_t n = 0; n < pairs.size(); ++n) {
        const auto& p = pairs[n];
        const double un = std::clamp(u - static_cast<double>(n), 0.0, 1.0);
        const cd d = z[p[1]] - z[p[0]];
        z[p[1]] = z[p[0]] + std::abs(d) * std::polar(1.0, std::arg(d) * (1.0 - un));
      }
    }
    return Configuration::finite(z);
  }

  double quality(int samples = 200) const {
    double q = std::numeric_limits<double>::infinity();
    std::array<bool, 6> at_infinity_end{};
    for (int i = 0; i < 6; ++i) {
      const Eigen::Vector2cd e = G * start[i];
      at_infinity_end[i] = std::abs(e(1)) <= 1e-14 * std::abs(e(0));
    }
    for (int k = 0; k <= samples; ++k) {
      const auto z = main(static_cast<double>(k) / samples);
      for (int i = 0; i < 6; ++i) {
        if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag()) || std::abs(z[i]) > 4.0 * R) return 0.0;
        for (int j = i + 1; j < 6; ++j) {
          bool paired = false;
          for (const auto& p : pairs) paired = paired || (p[0] == i && p[1] == j);
          if (paired) continue;
          q = std::min(q, std::abs(z[i] - z[j]) / (1.0 + std::abs(z[i]) + std::abs(z[j])));
        }
        // only a point placed at infinity by an end of the path may come near it
        const bool end_at_inf = 2 * k < samples ? start[i](1) == 0.0 : at_infinity_end[i];
        if (!end_at_inf || (4 * k >= samples && 4 * k <= 3 * samples))
          q = std::min(q, 1.0 / (1.0 + 1e-3 * std::abs(z[i])));
      }
    }
    return q;
  }
};

Eigen::Vector4cd to_cvec(const EisVec& v) { return to_complex(v); }

std::mutex roots_mutex;
std::map<std::pair<std::string, int>, std::vector<ShortRoot>> roots_cache;

const std::vector<ShortRoot>& cached_roots(const HermitianForm& h, int bound) {
  std::lock_guard<std::mutex> lock(roots_mutex);
  const auto key = std::make_pair(h.gram().str(), bound);
  auto it = roots_cache.find(key);
  if (it == roots_cache.end()) it = roots_cache.emplace(key, enumerate_short_roots(h, bound)).first;
  return it->second;
}

struct SearchBest {
  double score = -1.0;  // |h(v, p_b)|^2, larger is closer
  std::vector<int> letters;
  long long count = 0;
};

bool better(const SearchBest& x, const SearchBest& y) {
  if (x.score != y.score) return x.score > y.score;
  return x.letters < y.letters;
}

}  // namespace

MonodromyCertificate derive_certificate(const ContinuationOptions& opt) {
  const Configuration base = default_base_configuration();
  const auto gens = derive_generators(base, opt);
  for (int i = 0; i < 5; ++i)
    if (!(gens[i].float_residual < opt.certify_residual))
      throw VerificationError("generator " + std::to_string(i + 1) + " residual above certification threshold");
  InvariantGram gram = derive_invariant_gram(gens);
  std::array<ReflectionData, 5> refl;
  for (int i = 0; i < 5; ++i) refl[i] = reflection_data(gens[i].exact, gram.form);
  BraidRelationReport rel = verify_braid_relations(gens);
  MonodromyCertificate cert{base, gens, std::move(gram), refl, std::move(rel)};
  validate_certificate(cert);
  return cert;
}

void validate_certificate(const MonodromyCertificate& cert) {
  const HermitianForm& h = cert.form();
  if (signature(h) != std::make_pair(3, 1)) throw VerificationError("certificate Gram does not have signature (3,1)");
  if (!is_unimodular(h)) throw VerificationError("certificate Gram is not unimodular");
  for (int i = 0; i < 5; ++i) {
    const auto& m = cert.generators[i].exact;
    if (!is_isometry(h, m))
      throw VerificationError("generator " + std::to_string(i + 1) + " does not preserve the Gram");
    const ReflectionData rd = reflection_data(m, h);
    if (!(rd.root == cert.reflections[i].root) || !(rd.multiplier == cert.reflections[i].multiplier))
      throw VerificationError("reflection data of generator " + std::to_string(i + 1) + " does not match");
    if (h.norm(rd.root) != 1) throw VerificationError("generator root is not short");
  }
  const auto rel = verify_braid_relations(cert.generators);
  if (!rel.all_hold()) throw VerificationError("braid relations fail on certificate generators");
  for (const auto& r : cert.relations.relations)
    if (!r.holds) throw VerificationError("certificate records a failing relation: " + r.name);
}

double mirror_distance(const Eigen::Vector4cd& v, const EisVec& r, const HermitianForm& h) {
  const double n = h.norm(v);
  if (!(n < 0.0)) throw VerificationError("vector is not in the ball");
  return std::abs(h.eval(v, to_cvec(r))) / std::sqrt(-n);
}

MirrorDatum mirror_locus_distance(const BallPoint& p, int height_bound, const HermitianForm& h) {
  const auto& roots = cached_roots(h, height_bound);
  if (roots.empty()) throw InputError("no short roots up to the height bound");
  MirrorDatum best{roots.front(), std::numeric_limits<double>::infinity()};
  for (const auto& r : roots) {
    const double d = mirror_distance(p.v, r.r, h);
    if (d < best.distance) best = {r, d};
  }
  return best;
}

PointConfig finite_double_points(const PointConfig& c) { return finite_map(c).apply(c); }

Configuration to_configuration(const PointConfig& c) {
  Configuration out;
  int infinities = 0;
  for (int i = 0; i < 6; ++i) {
    if (c.points[i].is_infinity()) {
      out.infinity = i;
      ++infinities;
    } else {
      out.z[i] = c.points[i].z();
    }
  }
  if (infinities > 1) throw InputError("more than one point at infinity; move the double point first");
  return out;
}

PeriodPoint period_point(const PointConfig& c, const MonodromyCertificate& cert, double precision) {
  PeriodPoint out;
  out.cls = stability(c);
  if (!out.cls.stable) throw InputError("unstable configuration: a point of multiplicity " +
                                        std::to_string(out.cls.max_multiplicity));
  out.working = finite_double_points(c);
  out.config = to_configuration(out.working);
  const HermitianForm& h = cert.form();
  out.periods = out.cls.k == 0 ? period_vector(out.config, precision) : limit_period_vector(out.config, precision);
  out.point = ball_point(out.periods.values, h);
  if (out.cls.k > 0) {
    const auto order = pinned_order(out.config);
    for (std::size_t j = 0; j + 1 < order.size(); ++j)
      if (out.config.z[order[j]] == out.config.z[order[j + 1]]) {
        out.vanishing.push_back(static_cast<int>(j) + 1);
        out.roots.push_back(make_short_root(h, cert.reflections[j].root));
      }
    for (const auto& r : out.roots) {
      const double d = mirror_distance(out.point.v, r.r, h);
      if (!out.mirror || d < out.mirror->distance) out.mirror = MirrorDatum{r, d};
    }
  }
  return out;
}

PeriodPoint period_point(const ArrangementConfig& a, const MonodromyCertificate& cert, double precision) {
  const ArrangementStability st = arrangement_stability(a);
  if (!st.cls.stable) throw InputError("unstable arrangement");
  return period_point(points_from_arrangement(a), cert, precision);
}

bool TorelliVerdict::agrees() const {
  if (ground_truth) return kind == Kind::equivalent;
  return kind == Kind::distinct;
}

std::string to_string(TorelliVerdict::Kind k) {
  switch (k) {
    case TorelliVerdict::Kind::equivalent: return "Equivalent";
    case TorelliVerdict::Kind::distinct: return "Distinct";
    default: return "Inconclusive";
  }
}

namespace {

// Isometry M with P(b') proportional to M P(a'), by continuation along a Mobius path.
TorelliVerdict transport(const PointConfig& aw, const PointConfig& bw, const Mobius& g, int k,
                         const MonodromyCertificate& cert, const TorelliOptions& opt, TorelliVerdict v) {
  MobiusPath path;
  for (int i = 0; i < 6; ++i) path.start[i] = proj(aw.points[i]);
  path.pairs = coincident_pairs(aw);
  if (static_cast<int>(path.pairs.size()) != k) throw InputError("unexpected coincidences in working configuration");
  if (k > 0) {
    double spacing = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        const cd d = value(path.start[i]) - value(path.start[j]);
        if (std::abs(d) > 0) spacing = std::min(spacing, std::abs(d));
      }
    const double eps = 1e-3 * std::min(1.0, spacing);
    for (const auto& p : path.pairs) path.start[p[1]] = {value(path.start[p[0]]) + eps, 1.0};
    path.tail = 0.1;
  }
  path.kappa = std::log(path.R);
  path.G = to_mat(g.matrix());
  if ((path.G + Eigen::Matrix2cd::Identity()).norm() < (path.G - Eigen::Matrix2cd::Identity()).norm()) path.G = -path.G;

  std::mt19937_64 rng(opt.continuation.seed * 1000003ULL + 17);
  std::normal_distribution<double> nd;
  std::vector<std::pair<double, MobiusPath>> trials;
  for (int c = 0; c < 16; ++c) {
    MobiusPath trial = path;
    Eigen::Matrix2cd K;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) K(i, j) = cd(nd(rng), nd(rng));
    // G and -G are the same map but give different middle legs
    if (c % 2) trial.G = -trial.G;
    // a point at infinity must leave and arrive along the positive real axis
    // and the pole of the first leg then keeps off the real axis
    for (int i = 0; i < 6; ++i)
      if (trial.start[i](1) == 0.0) {
        K(1, 0) = std::abs(K(1, 0));
        K(1, 1) = cd(K(1, 1).real(), std::copysign(0.5 + std::abs(K(1, 1).imag()), K(1, 1).imag()));
      }
    for (int i = 0; i < 6; ++i) {
      const Eigen::Vector2cd end = trial.G * trial.start[i];
      if (std::abs(end(1)) > 1e-14 * std::abs(end(0))) continue;
      if (trial.start[i](1) == 0.0) {
        trial.G *= std::conj(end(0)) / std::abs(end(0));
      } else {
        // A separate waypoint L fixes the arrival, so K keeps its free corner.
        Eigen::Matrix2cd L;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) L(a, b) = cd(nd(rng), nd(rng));
        // G is real up to a phase; a corner off that line keeps the real points away
        // from the pole on the last leg
        Eigen::Index r = 0, col = 0;
        trial.G.cwiseAbs().maxCoeff(&r, &col);
        const cd phase = trial.G(r, col) / std::abs(trial.G(r, col));
        L(1, 0) = phase * cd(0.0, std::copysign(0.5 + std::abs(L(1, 0).imag()), L(1, 0).imag()));
        const cd c = L(1, 0) * trial.start[i](0) + L(1, 1) * trial.start[i](1);
        L(1, 1) = (end(0) / std::abs(end(0)) * std::abs(c) - L(1, 0) * trial.start[i](0)) / trial.start[i](1);
        trial.L = L;
        trial.three_legs = true;
      }
    }
    trial.K = K;
    trials.emplace_back(trial.quality(), trial);
  }
  std::stable_sort(trials.begin(), trials.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  // Paths are tried from the best separated down; any of them yields a valid transition.
  ContinuationResult res;
  for (std::size_t n = 0; n < trials.size(); ++n) {
    const bool last = n + 1 == trials.size();
    try {
      res = continue_along(trials[n].second, opt.continuation);
    } catch (const VerificationError&) {
      if (last) throw;
      continue;
    } catch (const PrecisionError&) {
      if (last) throw;
      continue;
    }
    if (res.final_residual < opt.continuation.certify_residual) break;
    if (last) throw PrecisionError("continuation did not certify the final transition", res.final_residual);
  }
  const EisensteinMatrix M = res.transition.inverse();
  v.word = res.word();
  // M = T^{-1}; the word product reproduces T
  v.word_matches = word_product(cert, v.word) == res.transition;
  v.isometry = M;

  const HermitianForm& h = cert.form();
  const Configuration ca = to_configuration(aw), cb = to_configuration(bw);
  const PeriodVector pa = k == 0 ? period_vector(ca, opt.precision) : limit_period_vector(ca, opt.precision);
  const PeriodVector pb = k == 0 ? period_vector(cb, opt.precision) : limit_period_vector(cb, opt.precision);
  const BallPoint image = ball_point(M.to_complex() * pa.values, h);
  v.distance = ball_distance(image, ball_point(pb.values, h), h);
  if (!is_isometry(h, M)) {
    v.kind = TorelliVerdict::Kind::inconclusive;
    v.reason = "transported matrix is not an isometry of the Gram";
  } else if (!v.word_matches) {
    v.kind = TorelliVerdict::Kind::inconclusive;
    v.reason = "wall word does not reproduce the transported matrix";
  } else if (v.distance < opt.equal_distance) {
    v.kind = TorelliVerdict::Kind::equivalent;
    v.reason = "isometry witness from continuation along a Mobius path";
  } else {
    v.kind = TorelliVerdict::Kind::inconclusive;
    v.reason = "witness distance above " + std::to_string(opt.equal_distance);
  }
  return v;
}

TorelliVerdict search(const PointConfig& aw, const PointConfig& bw, int k, const MonodromyCertificate& cert,
                      const TorelliOptions& opt, TorelliVerdict v) {
  const HermitianForm& h = cert.form();
  const Configuration ca = to_configuration(aw), cb = to_configuration(bw);
  const PeriodVector pa = k == 0 ? period_vector(ca, opt.precision) : limit_period_vector(ca, opt.precision);
  const PeriodVector pb = k == 0 ? period_vector(cb, opt.precision) : limit_period_vector(cb, opt.precision);
  const BallPoint A = ball_point(pa.values, h), B = ball_point(pb.values, h);

  // letters 0..4 are M_1..M_5, 5..9 their inverses; omega * identity acts trivially on the ball
  std::array<Eigen::Matrix4cd, 10> L;
  for (int i = 0; i < 5; ++i) {
    L[i] = cert.generators[i].exact.to_complex();
    L[i + 5] = cert.generators[i].exact.inverse().to_complex();
  }
  const Eigen::RowVector4cd hb = (h.complex_gram().transpose() * B.v.conjugate()).transpose();
  auto score = [&](const Eigen::Vector4cd& x) { return std::norm((hb * x)(0)); };

  const int depth = opt.depth;
  auto run = [&](int first) {
    SearchBest best;
    std::vector<int> letters{first};
    std::vector<Eigen::Vector4cd> stack{L[first] * A.v};
    auto visit = [&](auto&& self) -> void {
      ++best.count;
      const double s = score(stack.back());
      SearchBest cand{s, letters, 0};
      if (best.letters.empty() || better(cand, best)) {
        best.score = s;
        best.letters = letters;
      }
      if (static_cast<int>(letters.size()) == depth) return;
      const int last = letters.back();
      for (int x = 0; x < 10; ++x) {
        if ((x + 5) % 10 == last) continue;
        letters.push_back(x);
        stack.push_back(L[x] * stack.back());
        self(self);
        stack.pop_back();
        letters.pop_back();
      }
    };
    visit(visit);
    return best;
  };

  SearchBest best{score(A.v), {}, 1};
  if (depth > 0) {
    std::vector<std::future<SearchBest>> jobs;
    for (int f = 0; f < 10; ++f) jobs.push_back(std::async(std::launch::async, run, f));
    for (auto& j : jobs) {
      SearchBest r = j.get();
      best.count += r.count;
      if (better(r, best)) {
        best.score = r.score;
        best.letters = std::move(r.letters);
      }
    }
  }
  // letters are listed in application order; the matrix is L[last] ... L[first]
  BraidWord word;
  EisensteinMatrix M = EisensteinMatrix::identity();
  for (auto it = best.letters.rbegin(); it != best.letters.rend(); ++it) {
    const int g = *it % 5 + 1;
    word.push_back(*it < 5 ? g : -g);
  }
  M = word_product(cert, word);
  v.word = word;
  v.isometry = M;
  v.word_matches = true;
  v.words_searched = best.count;
  v.depth = depth;
  v.distance = ball_distance(ball_point(M.to_complex() * A.v, h), B, h);
  if (v.distance > opt.distinct_margin) {
    v.kind = TorelliVerdict::Kind::distinct;
    v.reason = "no word of length <= " + std::to_string(depth) + " brings the period points closer than the margin";
  } else if (v.distance < opt.equal_distance) {
    v.kind = TorelliVerdict::Kind::equivalent;
    v.reason = "a short word identifies the period points";
  } else {
    v.kind = TorelliVerdict::Kind::inconclusive;
    v.reason = "minimum distance in the ambiguous band";
  }
  return v;
}

}  // namespace

TorelliVerdict torelli_check(const PointConfig& a, const PointConfig& b, const MonodromyCertificate& cert,
                             const TorelliOptions& opt) {
  const StabilityClass sa = stability(a), sb = stability(b);
  if (!sa.stable || !sb.stable) throw InputError("torelli_check needs stable configurations");
  TorelliVerdict v;
  v.witness = is_equivalent(a, b);
  v.ground_truth = v.witness.has_value();
  v.k = sa.k;
  v.depth = opt.depth;
  if (sa.k != sb.k) {
    v.kind = TorelliVerdict::Kind::distinct;
    v.distance = std::numeric_limits<double>::infinity();
    v.reason = "different numbers of double points";
    return v;
  }
  if (sa.k == 3) {
    v.kind = v.ground_truth ? TorelliVerdict::Kind::equivalent : TorelliVerdict::Kind::distinct;
    v.reason = "three double points: decided on the configurations";
    return v;
  }
  const Mobius ha = finite_map(a), hb = finite_map(b);
  const PointConfig aw = ha.apply(a), bw = hb.apply(b);
  if (v.ground_truth) {
    const Mobius g = hb.compose(v.witness->map.compose(ha.inverse()));
    return transport(aw, bw, g, sa.k, cert, opt, v);
  }
  return search(aw, bw, sa.k, cert, opt, v);
}

std::vector<double> default_eps_schedule() { return {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5}; }

DegenerationReport degeneration_report(const Configuration& z, std::array<int, 2> pair,
                                       const std::vector<double>& eps_schedule, const MonodromyCertificate& cert) {
  const auto [i, j] = pair;
  if (i < 0 || i > 5 || j < 0 || j > 5 || i == j) throw InputError("pair indices must be two distinct points");
  if (!z.is_finite(i) || !z.is_finite(j)) throw InputError("the colliding points must be finite");
  if (eps_schedule.size() < 3) throw InputError("schedule too coarse: at least three values of eps are needed");
  for (std::size_t n = 0; n < eps_schedule.size(); ++n) {
    if (!(eps_schedule[n] > 0.0)) throw InputError("eps values must be positive");
    if (n > 0 && !(eps_schedule[n] < eps_schedule[n - 1])) throw InputError("eps schedule must decrease");
  }
  if (eps_schedule.front() / eps_schedule.back() < 10.0)
    throw InputError("schedule too coarse: eps must span at least one decade");

  const HermitianForm& h = cert.form();
  DegenerationReport rep;
  rep.pair = pair;
  auto moved = [&](double eps) {
    Configuration c = z;
    c.z[j] = z.z[i] + eps;
    return c;
  };
  for (double eps : eps_schedule) {
    const Configuration c = moved(eps);
    const auto order = pinned_order(c);
    const auto pi = std::find(order.begin(), order.end(), i) - order.begin();
    if (pi + 1 >= static_cast<long>(order.size()) || order[pi + 1] != j)
      throw InputError("another point separates the colliding pair");
    const int slit = static_cast<int>(pi) + 1;
    if (rep.slit == 0) {
      rep.slit = slit;
      rep.root = make_short_root(h, cert.reflections[slit - 1].root);
    } else if (rep.slit != slit) {
      throw InputError("vanishing slit changes along the schedule");
    }
    const PeriodVector pv = period_vector(c);
    DegenerationRow row;
    row.eps = eps;
    row.vector = pv.values;
    row.vanishing = std::abs(pv.values[slit - 1]);
    row.mirror = mirror_distance(pv.values, rep.root.r, h);
    rep.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    const double x = std::log(r.eps), y = std::log(r.vanishing);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.mirror_monotone = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (!(rep.rows[k].mirror < rep.rows[k - 1].mirror)) rep.mirror_monotone = false;

  const Eigen::Vector4cd r = to_cvec(rep.root.r);
  const Eigen::Vector4cd v = rep.rows.back().vector;
  rep.limit = ball_point(v - h.eval(v, r) * r, h);
  Configuration lim = z;
  lim.z[j] = z.z[i];
  rep.direct = ball_point(limit_period_vector(lim).values, h);
  rep.limit_distance = ball_distance(rep.limit, rep.direct, h);
  const HodgeTable t = hodge_numbers(1);
  rep.k_after = t.k;
  rep.dim_q_after = t.dim_q;
  return rep;
}

}  // namespace torelli
