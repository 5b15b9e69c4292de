#pragma once

// Slit periods of eta = prod (x - z_k)^{-1/3} dx and their monodromy.
//
// Branch convention. Finite points are sorted by (Re, Im) and joined by the
// polygon p_1 -> p_2 -> ... ; slit j is the segment [p_j, p_{j+1}]. Every
// factor's argument is tracked along the polygon starting on the first slit
// with arg(x - p_1) = Arg(p_2 - p_1) in (-pi, pi] and arg(x - p_k) =
// arg(p_1 - p_k) in [0, 2pi) for k >= 2. At each vertex the path turns
// counter-clockwise around the vertex, i.e. passes to its right-hand side.
// A point at infinity is treated as the last point; only the finite points
// enter the integrand and slits 1..4 join the five finite points.
// Coincident points (limit configurations) are treated as p_{k+1} = p_k + eps
// with eps -> 0+.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torelli/eisenstein.hpp"

namespace torelli {

using cd = std::complex<double>;

struct Configuration {
  std::array<cd, 6> z{};
  int infinity = -1;  // index of the point at infinity, -1 if none

  static Configuration finite(const std::array<cd, 6>& pts);
  bool is_finite(int k) const { return k != infinity; }
  int finite_count() const { return infinity < 0 ? 6 : 5; }
};

// Finite indices sorted by (Re, Im), ties by index.
std::vector<int> pinned_order(const Configuration& c);

struct SlitValue {
  cd value;
  double error = 0.0;
};

SlitValue lauricella_period(const Configuration& c, int j, double precision_target = 1e-10);

struct PeriodVector {
  Eigen::Vector4cd values;
  Configuration base;
  double precision = 0.0;
  std::optional<cd> fifth;         // L5 for six finite points
  double relation_residual = 0.0;  // |L5 - (w L1 - L2 + w L4)| / max |L|
};

PeriodVector period_vector(const Configuration& c, double precision_target = 1e-10);

// Coincident points allowed; slits between coincident points are zero.
PeriodVector limit_period_vector(const Configuration& c, double precision_target = 1e-10);

// Slit periods for points already in pinned order; fixed rule, no error estimate.
Eigen::Vector4cd slit_periods_sorted(const std::vector<cd>& sorted_points);

// A braid word: +i is the half-twist tau_i, -i its inverse (1 <= i <= 5).
using BraidWord = std::vector<int>;
std::string to_string(const BraidWord& w);

struct MonodromyMatrix {
  EisensteinMatrix exact;
  double float_residual = 0.0;
  BraidWord braid_word;
};

struct ContinuationOptions {
  int configs = 8;
  double jitter = 0.03;
  std::uint64_t seed = 1;
  double ambiguous_residual = 0.05;
  double certify_residual = 1e-6;
  double initial_step = 1e-3;
  double max_step = 0.02;
  double end_step = 1e-3;
  double min_step = 1e-10;
  int max_steps = 100000;
  double max_condition = 1e6;
  int max_resamples = 3;
};

struct WallCrossing {
  double t = 0.0;
  int position = 0;  // 1..5, positions swapped in the pinned order
  int sign = 0;      // +1 when the left point passes above, -1 when below
  EisensteinMatrix jump;
};

struct ContinuationResult {
  EisensteinMatrix transition;  // continued vectors = transition * canonical vectors at the end
  double final_residual = 0.0;
  double max_step_residual = 0.0;
  double max_condition = 0.0;
  int steps = 0;
  int resamples = 0;
  std::vector<WallCrossing> walls;
  BraidWord word() const;
};

using ConfigPath = std::function<Configuration(double)>;

ContinuationResult continue_along(const ConfigPath& path, const ContinuationOptions& opt = {});

// Half-twist path: tau_i rotates the points in positions i, i+1 clockwise by pi about their midpoint.
ConfigPath braid_path(const Configuration& z, const BraidWord& word);

MonodromyMatrix continue_periods(const Configuration& z, const BraidWord& braid, const ContinuationOptions& opt = {});

// Real increasing base configuration used for the certified generators.
Configuration default_base_configuration();

std::array<MonodromyMatrix, 5> derive_generators(const Configuration& base, const ContinuationOptions& opt = {});

struct InvariantGram {
  HermitianForm form;
  int solution_dimension = 0;
  double rounding_residual = 0.0;
  std::vector<double> singular_values;
};

InvariantGram derive_invariant_gram(const std::array<MonodromyMatrix, 5>& matrices);

struct RelationResult {
  std::string name;
  bool holds = false;
  std::string dump;
};

struct BraidRelationReport {
  std::vector<RelationResult> relations;
  bool all_hold() const;
};

BraidRelationReport verify_braid_relations(const std::array<MonodromyMatrix, 5>& matrices);

struct ReflectionData {
  EisVec root;
  EisensteinInt multiplier;
};

// Exact: M = I + r phi with M r = mu r, mu a unit other than 1.
ReflectionData reflection_data(const EisensteinMatrix& m);
ReflectionData reflection_data(const EisensteinMatrix& m, const HermitianForm& h);

MonodromyMatrix scalar_monodromy_check(const std::array<cd, 5>& z5, double turns = 1.0,
                                       const ContinuationOptions& opt = {});

struct BallPoint {
  Eigen::Vector4cd v;  // h(v,v) = -1, largest coordinate real positive
};

BallPoint ball_point(const Eigen::Vector4cd& v, const HermitianForm& h, double tol = 1e-9);
double ball_distance(const BallPoint& p, const BallPoint& q, const HermitianForm& h);

}  // namespace torelli
