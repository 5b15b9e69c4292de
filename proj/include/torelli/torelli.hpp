#pragma once

// Period points of stable configurations, equivalence verdicts modulo the
// monodromy group, distance to the mirror arrangement, and degenerations.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "torelli/eisenstein.hpp"
#include "torelli/moduli.hpp"
#include "torelli/periods.hpp"

namespace torelli {

struct MonodromyCertificate {
  Configuration base;
  std::array<MonodromyMatrix, 5> generators;
  InvariantGram gram;
  std::array<ReflectionData, 5> reflections;
  BraidRelationReport relations;

  const HermitianForm& form() const { return gram.form; }
};

MonodromyCertificate derive_certificate(const ContinuationOptions& opt = {});

// Exact re-verification of a loaded certificate; throws VerificationError.
void validate_certificate(const MonodromyCertificate& cert);

struct MirrorDatum {
  ShortRoot root;
  double distance = 0.0;  // |h(v,r)| / sqrt(-h(v,v)), with h(r,r) = 1
};

double mirror_distance(const Eigen::Vector4cd& v, const EisVec& r, const HermitianForm& h);

MirrorDatum mirror_locus_distance(const BallPoint& p, int height_bound, const HermitianForm& h);

struct PeriodPoint {
  StabilityClass cls;
  PointConfig working;   // the configuration actually integrated
  Configuration config;
  PeriodVector periods;
  BallPoint point;
  std::vector<int> vanishing;  // slits of length zero (k >= 1)
  std::vector<ShortRoot> roots;
  std::optional<MirrorDatum> mirror;  // vanishing root, distance 0 up to rounding
};

// A double point at infinity is first moved to a finite position by a
// rational Mobius map; the resulting configuration is equivalent.
PointConfig finite_double_points(const PointConfig& c);
Configuration to_configuration(const PointConfig& c);

PeriodPoint period_point(const PointConfig& c, const MonodromyCertificate& cert, double precision = 1e-10);
PeriodPoint period_point(const ArrangementConfig& a, const MonodromyCertificate& cert, double precision = 1e-10);

struct TorelliOptions {
  int depth = 6;
  double equal_distance = 1e-6;
  double distinct_margin = 1e-3;
  double precision = 1e-10;
  ContinuationOptions continuation{};
};

struct TorelliVerdict {
  enum class Kind { equivalent, distinct, inconclusive };
  Kind kind = Kind::inconclusive;
  bool ground_truth = false;  // configurations equivalent after a permutation

  std::optional<EquivalenceWitness> witness;
  std::optional<EisensteinMatrix> isometry;  // M with M P(a) = P(b) projectively
  BraidWord word;
  bool word_matches = false;  // product of certified generators along word equals the isometry
  double distance = 0.0;      // Equivalent: d(M P(a), P(b)); Distinct: minimum over the group ball
  int depth = 0;
  long long words_searched = 0;
  int k = 0;
  std::string reason;

  bool agrees() const;
};

std::string to_string(TorelliVerdict::Kind k);

TorelliVerdict torelli_check(const PointConfig& a, const PointConfig& b, const MonodromyCertificate& cert,
                             const TorelliOptions& opt = {});

struct DegenerationRow {
  double eps = 0.0;
  Eigen::Vector4cd vector;
  double vanishing = 0.0;  // |L_m| for the slit joining the pair
  double mirror = 0.0;     // distance to the mirror of the vanishing root
};

struct DegenerationReport {
  std::array<int, 2> pair{};
  int slit = 0;  // 1-based position of the vanishing slit
  ShortRoot root;
  std::vector<DegenerationRow> rows;
  double exponent = 0.0;
  bool mirror_monotone = false;
  BallPoint limit;          // projection of the last row onto the mirror
  BallPoint direct;         // limit configuration integrated directly
  double limit_distance = 0.0;
  int k_after = 1;
  int dim_q_after = 6;
};

std::vector<double> default_eps_schedule();

DegenerationReport degeneration_report(const Configuration& z, std::array<int, 2> pair,
                                       const std::vector<double>& eps_schedule, const MonodromyCertificate& cert);

}  // namespace torelli
