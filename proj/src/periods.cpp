#include "torelli/periods.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <future>
#include <numeric>
#include <random>
#include <sstream>

#include "torelli/errors.hpp"
#include "torelli/quadrature.hpp"

namespace torelli {

namespace {

const double kPi = 3.14159265358979323846;
const double kTwoPi = 2.0 * kPi;
const cd kOmega(-0.5, 0.86602540378443864676);

double arg02(cd z) {
  const double a = std::arg(z);
  return a < 0 ? a + kTwoPi : a;
}

double mod2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

struct Slit {
  cd start, d;
  bool degenerate = false;
  double mu_left = 0.0, mu_right = 0.0;
  cd log_const;
  struct Other {
    cd p;
    cd ref_conj;
    double base;
  };
  std::vector<Other> others;

  cd point(double t) const { return start + t * d; }

  // log of the integrand without the factors t^{-mu_left} (1-t)^{-mu_right}
  cd log_regular(double t) const {
    const cd x = point(t);
    double re = 0.0, im = 0.0;
    for (const auto& o : others) {
      const cd w = x - o.p;
      re += 0.5 * std::log(std::norm(w));
      im += o.base + std::arg(w * o.ref_conj);
    }
    return log_const - cd(re, im) / 3.0;
  }
};

std::vector<Slit> build_slits(const std::vector<cd>& p) {
  const int n = static_cast<int>(p.size());
  auto diff = [&](int a, int b) -> cd {
    if (p[a] != p[b]) return p[a] - p[b];
    return a > b ? cd(1.0, 0.0) : cd(-1.0, 0.0);
  };
  std::vector<double> A(n);
  A[0] = std::arg(diff(1, 0));
  for (int k = 1; k < n; ++k) A[k] = arg02(diff(0, k));

  std::vector<Slit> slits;
  for (int j = 0; j + 1 < n; ++j) {
    Slit s;
    s.start = p[j];
    s.d = p[j + 1] - p[j];
    s.degenerate = (s.d == cd(0.0, 0.0));
    if (!s.degenerate) {
      int cl = 0, cr = 0;
      double phase = 0.0;
      for (int k = 0; k < n; ++k) {
        if (p[k] == p[j]) {
          ++cl;
          phase += (k == j) ? A[j] : A[k] + std::arg(s.d * std::conj(diff(j, k)));
        } else if (p[k] == p[j + 1]) {
          ++cr;
          phase += A[k];
        } else {
          s.others.push_back({p[k], std::conj(diff(j, k)), A[k]});
        }
      }
      s.mu_left = cl / 3.0;
      s.mu_right = cr / 3.0;
      s.log_const = -cd((cl + cr) * std::log(std::abs(s.d)), phase) / 3.0;
    }
    for (int k = 0; k < n; ++k) {
      if (k == j || k == j + 1) continue;
      A[k] += std::arg(diff(j + 1, k) * std::conj(diff(j, k)));
    }
    if (j + 2 < n) A[j + 1] += mod2pi(std::arg(diff(j + 2, j + 1)) - A[j + 1]);
    slits.push_back(std::move(s));
  }
  return slits;
}

enum class PanelKind { left, mid, right };

struct Panel {
  double a, b;
  PanelKind kind;
};

double point_segment_distance(cd p, cd x0, cd x1) {
  const cd e = x1 - x0;
  const double len2 = std::norm(e);
  double s = len2 > 0 ? ((p - x0) * std::conj(e)).real() / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (x0 + s * e));
}

void refine(const Slit& s, const Panel& pn, double ratio, int depth, std::vector<Panel>& out) {
  const double len = std::abs(s.d);
  double clearance = std::numeric_limits<double>::infinity();
  const cd x0 = s.point(pn.a), x1 = s.point(pn.b);
  for (const auto& o : s.others) clearance = std::min(clearance, point_segment_distance(o.p, x0, x1));
  if (pn.kind != PanelKind::left) clearance = std::min(clearance, pn.a * len);
  if (pn.kind != PanelKind::right) clearance = std::min(clearance, (1.0 - pn.b) * len);
  if (depth >= 60 || (pn.b - pn.a) * len <= ratio * clearance) {
    out.push_back(pn);
    return;
  }
  const double m = 0.5 * (pn.a + pn.b);
  switch (pn.kind) {
    case PanelKind::left:
      refine(s, {pn.a, m, PanelKind::left}, ratio, depth + 1, out);
      refine(s, {m, pn.b, PanelKind::mid}, ratio, depth + 1, out);
      break;
    case PanelKind::right:
      refine(s, {pn.a, m, PanelKind::mid}, ratio, depth + 1, out);
      refine(s, {m, pn.b, PanelKind::right}, ratio, depth + 1, out);
      break;
    case PanelKind::mid:
      refine(s, {pn.a, m, PanelKind::mid}, ratio, depth + 1, out);
      refine(s, {m, pn.b, PanelKind::mid}, ratio, depth + 1, out);
      break;
  }
}

std::vector<Panel> panels_for(const Slit& s, double ratio) {
  std::vector<Panel> out;
  refine(s, {0.0, 0.5, PanelKind::left}, ratio, 0, out);
  refine(s, {0.5, 1.0, PanelKind::right}, ratio, 0, out);
  return out;
}

cd integrate_panels(const Slit& s, const std::vector<Panel>& panels, int n) {
  cd total(0.0, 0.0);
  for (const auto& pn : panels) {
    const double h = pn.b - pn.a;
    if (pn.kind == PanelKind::left) {
      const auto& rule = quad::jacobi_left01(n, s.mu_left);
      const double scale = std::pow(h, 1.0 - s.mu_left);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = h * rule.x[i];
        total += rule.w[i] * scale * std::exp(s.log_regular(t) - s.mu_right * std::log1p(-t));
      }
    } else if (pn.kind == PanelKind::right) {
      const auto& rule = quad::jacobi_left01(n, s.mu_right);
      const double scale = std::pow(h, 1.0 - s.mu_right);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double u = h * rule.x[i];
        const double t = 1.0 - u;
        total += rule.w[i] * scale * std::exp(s.log_regular(t) - s.mu_left * std::log(t));
      }
    } else {
      const auto& rule = quad::legendre01(n);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = pn.a + h * rule.x[i];
        total += rule.w[i] * h * std::exp(s.log_regular(t) - s.mu_left * std::log(t) - s.mu_right * std::log1p(-t));
      }
    }
  }
  return total * s.d;
}

SlitValue integrate_with_estimate(const Slit& s, double target) {
  if (s.degenerate) return {cd(0.0, 0.0), 0.0};
  double ratio = 2.0;
  double err = 0.0;
  cd fine;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto panels = panels_for(s, ratio);
    const cd coarse = integrate_panels(s, panels, 16);
    fine = integrate_panels(s, panels, 24);
    if (!std::isfinite(fine.real()) || !std::isfinite(fine.imag()))
      throw PrecisionError("non-finite period value", std::numeric_limits<double>::infinity());
    err = std::abs(coarse - fine);
    if (err <= target) return {fine, err};
    ratio *= 0.5;
  }
  throw PrecisionError("quadrature did not reach the precision target", err);
}

std::vector<cd> sorted_finite(const Configuration& c) {
  std::vector<cd> p;
  for (int k : pinned_order(c)) p.push_back(c.z[k]);
  return p;
}

void validate(const Configuration& c, bool allow_coincident) {
  if (c.infinity < -1 || c.infinity > 5) throw InputError("invalid infinity index");
  for (int k = 0; k < 6; ++k)
    if (c.is_finite(k) && !(std::isfinite(c.z[k].real()) && std::isfinite(c.z[k].imag())))
      throw InputError("configuration has a non-finite coordinate");
  auto p = sorted_finite(c);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i] == p[i + 1]) {
      if (!allow_coincident) throw InputError("configuration has coincident points (degenerate slit)");
      if (i + 2 < p.size() && p[i + 2] == p[i]) throw InputError("configuration has a triple point (unstable)");
    }
  }
}

const cd& omega() { return kOmega; }

}  // namespace

Configuration Configuration::finite(const std::array<cd, 6>& pts) {
  Configuration c;
  c.z = pts;
  return c;
}

std::vector<int> pinned_order(const Configuration& c) {
  std::vector<int> idx;
  for (int k = 0; k < 6; ++k)
    if (c.is_finite(k)) idx.push_back(k);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (c.z[a].real() != c.z[b].real()) return c.z[a].real() < c.z[b].real();
    return c.z[a].imag() < c.z[b].imag();
  });
  return idx;
}

SlitValue lauricella_period(const Configuration& c, int j, double precision_target) {
  validate(c, true);
  const auto p = sorted_finite(c);
  const int nslits = static_cast<int>(p.size()) - 1;
  if (j < 1 || j > nslits) throw InputError("slit index out of range");
  const auto slits = build_slits(p);
  if (slits[j - 1].degenerate) throw InputError("degenerate slit: coincident endpoints");
  return integrate_with_estimate(slits[j - 1], precision_target);
}

namespace {

PeriodVector compute_period_vector(const Configuration& c, double target, bool allow_coincident) {
  validate(c, allow_coincident);
  const auto p = sorted_finite(c);
  const auto slits = build_slits(p);
  PeriodVector pv;
  pv.base = c;
  double err = 0.0;
  for (int j = 0; j < 4; ++j) {
    const SlitValue sv = integrate_with_estimate(slits[j], target);
    pv.values[j] = sv.value;
    err = std::max(err, sv.error);
  }
  if (slits.size() == 5) {
    const SlitValue sv = integrate_with_estimate(slits[4], target);
    err = std::max(err, sv.error);
    pv.fifth = sv.value;
    const cd predicted = omega() * pv.values[0] - pv.values[1] + omega() * pv.values[3];
    double scale = pv.values.cwiseAbs().maxCoeff();
    scale = std::max(scale, std::abs(sv.value));
    pv.relation_residual = scale > 0 ? std::abs(sv.value - predicted) / scale : 0.0;
  }
  pv.precision = err;
  return pv;
}

}  // namespace

PeriodVector period_vector(const Configuration& c, double precision_target) {
  return compute_period_vector(c, precision_target, false);
}

PeriodVector limit_period_vector(const Configuration& c, double precision_target) {
  return compute_period_vector(c, precision_target, true);
}

Eigen::Vector4cd slit_periods_sorted(const std::vector<cd>& sorted_points) {
  if (sorted_points.size() != 5 && sorted_points.size() != 6) throw InputError("expected five or six finite points");
  const auto slits = build_slits(sorted_points);
  Eigen::Vector4cd v;
  for (int j = 0; j < 4; ++j) {
    if (slits[j].degenerate) throw InputError("degenerate slit during continuation");
    v[j] = integrate_panels(slits[j], panels_for(slits[j], 2.0), 20);
  }
  return v;
}

std::string to_string(const BraidWord& w) {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += "t" + std::to_string(std::abs(w[i]));
    if (w[i] < 0) s += "^-1";
  }
  return s;
}

BraidWord ContinuationResult::word() const {
  BraidWord w;
  for (const auto& wall : walls) w.push_back(wall.sign * wall.position);
  return w;
}

namespace {

struct Sample {
  std::vector<int> order;
  Eigen::MatrixXcd P;
  double condition = 0.0;
  Configuration central;
};

struct IllConditioned {};

class Continuation {
 public:
  Continuation(const ConfigPath& path, const ContinuationOptions& opt, int attempt) : path_(path), opt_(opt) {
    std::mt19937_64 rng(opt.seed + 7919ULL * static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    offsets_.assign(opt.configs, std::array<cd, 6>{});
    for (int m = 1; m < opt.configs; ++m)
      for (int k = 0; k < 6; ++k) offsets_[m][k] = cd(normal(rng), normal(rng));
  }

  // The jitter cap uses the polygon edges of the pinned order and, across a wall,
  // also those of the order on the other side, so both samples share one rule.
  Sample sample(double t, const std::vector<int>* other = nullptr) const {
    Sample s;
    s.central = path_(t);
    s.order = pinned_order(s.central);
    const auto& c = s.central;
    std::array<double, 6> scale{};
    for (int k : s.order) {
      double acc = 0.0;
      for (int l : s.order)
        if (l != k) acc += std::pow(std::norm(c.z[k] - c.z[l]), -2.0);
      scale[k] = std::pow(acc, -0.25);
    }
    // A polygon edge passing close to another point limits the jitter of all three.
    auto cap = [&](const std::vector<int>& order) {
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int a = order[i], b = order[i + 1];
        const cd d = c.z[b] - c.z[a];
        for (int k : order) {
          if (k == a || k == b) continue;
          const double u = std::clamp(((c.z[k] - c.z[a]) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
          const double gap = std::abs(c.z[k] - (c.z[a] + u * d));
          for (int m : {a, b, k}) scale[m] = std::min(scale[m], gap);
        }
      }
    };
    cap(s.order);
    if (other) cap(*other);
    s.P.resize(4, opt_.configs);
    std::vector<cd> pts(s.order.size());
    for (int m = 0; m < opt_.configs; ++m) {
      for (std::size_t i = 0; i < s.order.size(); ++i) {
        const int k = s.order[i];
        pts[i] = c.z[k] + opt_.jitter * scale[k] * offsets_[m][k];
      }
      s.P.col(m) = slit_periods_sorted(pts);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.P);
    const auto& sv = svd.singularValues();
    s.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    return s;
  }

  ContinuationResult run() {
    ContinuationResult res;
    Sample cur = sample(0.0);
    if (cur.condition > opt_.max_condition) throw IllConditioned{};
    res.max_condition = cur.condition;
    EisensteinMatrix T = EisensteinMatrix::identity();
    Eigen::MatrixXcd C = cur.P;
    std::deque<std::pair<double, Eigen::MatrixXcd>> history{{0.0, C}};
    double t = 0.0;
    double h = opt_.initial_step;
    double last_residual = 0.0;
    while (t < 1.0) {
      h = std::min({h, opt_.max_step, std::max(opt_.end_step, 0.5 * (1.0 - t))});
      if (t + h > 1.0 - 1e-14) h = 1.0 - t;
      const double tn = (h == 1.0 - t) ? 1.0 : t + h;
      auto retry = [&]() {
        h *= 0.5;
        if (h < opt_.min_step)
          throw VerificationError("continuation step underflow at t = " + std::to_string(t));
      };
      Sample nxt = sample(tn);
      if (nxt.condition > opt_.max_condition) throw IllConditioned{};

      int wall_pos = 0;
      if (nxt.order != cur.order) {
        std::vector<int> changed;
        for (std::size_t i = 0; i < cur.order.size(); ++i)
          if (cur.order[i] != nxt.order[i]) changed.push_back(static_cast<int>(i));
        const bool single_swap = changed.size() == 2 && changed[1] == changed[0] + 1 &&
                                 cur.order[changed[0]] == nxt.order[changed[1]] &&
                                 cur.order[changed[1]] == nxt.order[changed[0]];
        if (!single_swap) {
          retry();
          continue;
        }
        wall_pos = changed[0] + 1;
      }

      Eigen::MatrixXcd Cpred, base = C;
      if (wall_pos) {
        // Resample both sides with the joint cap and predict from the left side alone.
        const Sample left = sample(t, &nxt.order);
        nxt = sample(tn, &cur.order);
        Cpred = base = T.to_complex() * left.P;
      } else {
        Cpred = extrapolate(history, tn);
      }
      const Eigen::MatrixXcd X = nxt.P.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                     .solve(Cpred.transpose());
      const Eigen::Matrix4cd Tn = X.transpose();
      if (!Tn.allFinite() || Tn.cwiseAbs().maxCoeff() > 1e12) {
        retry();
        continue;
      }
      double residual = 0.0;
      const EisensteinMatrix R = round_matrix(Tn, &residual);
      const Eigen::MatrixXcd Cn = R.to_complex() * nxt.P;
      const double change = (Cn - base).norm() / base.norm();
      if (residual > opt_.ambiguous_residual || change > 0.1) {
        retry();
        continue;
      }
      if (wall_pos) {
        WallCrossing w;
        w.t = tn;
        w.position = wall_pos;
        const int left = cur.order[wall_pos - 1];
        const int right = cur.order[wall_pos];
        w.sign = nxt.central.z[left].imag() > nxt.central.z[right].imag() ? 1 : -1;
        w.jump = T.inverse() * R;
        res.walls.push_back(w);
      }
      T = R;
      t = tn;
      if (wall_pos) {
        nxt = sample(tn);
        history.clear();
      }
      C = R.to_complex() * nxt.P;
      cur = std::move(nxt);
      history.emplace_back(t, C);
      if (history.size() > 4) history.pop_front();
      res.max_step_residual = std::max(res.max_step_residual, residual);
      res.max_condition = std::max(res.max_condition, cur.condition);
      last_residual = residual;
      ++res.steps;
      if (residual < 1e-9) h *= 1.6;
      else if (residual > 1e-4) h *= 0.5;
      if (h < opt_.min_step) throw VerificationError("continuation step underflow at t = " + std::to_string(t));
      if (res.steps >= opt_.max_steps)
        throw VerificationError("continuation step budget exhausted at t = " + std::to_string(t));
    }
    res.transition = T;
    res.final_residual = last_residual;
    return res;
  }

 private:
  static Eigen::MatrixXcd extrapolate(const std::deque<std::pair<double, Eigen::MatrixXcd>>& hist, double t) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(hist.front().second.rows(), hist.front().second.cols());
    for (std::size_t i = 0; i < hist.size(); ++i) {
      double li = 1.0;
      for (std::size_t j = 0; j < hist.size(); ++j)
        if (j != i) li *= (t - hist[j].first) / (hist[i].first - hist[j].first);
      out += li * hist[i].second;
    }
    return out;
  }

  const ConfigPath& path_;
  ContinuationOptions opt_;
  std::vector<std::array<cd, 6>> offsets_;
};

}  // namespace

ContinuationResult continue_along(const ConfigPath& path, const ContinuationOptions& opt) {
  if (opt.configs < 8) throw InputError("continuation needs at least 8 base configurations");
  for (int attempt = 0; attempt <= opt.max_resamples; ++attempt) {
    try {
      Continuation cont(path, opt, attempt);
      ContinuationResult r = cont.run();
      r.resamples = attempt;
      return r;
    } catch (const IllConditioned&) {
    }
  }
  throw VerificationError("ill-conditioned period fit persisted after resampling");
}

ConfigPath braid_path(const Configuration& z, const BraidWord& word) {
  struct Letter {
    int a, b;
    double angle;
  };
  std::vector<Configuration> states{z};
  std::vector<Letter> letters;
  auto perm = pinned_order(z);
  for (int x : word) {
    const int i = std::abs(x);
    if (x == 0 || i >= static_cast<int>(perm.size()))
      throw InputError("braid letter out of range: " + std::to_string(x));
    const int a = perm[i - 1], b = perm[i];
    const Configuration& s = states.back();
    const cd m = 0.5 * (s.z[a] + s.z[b]);
    const double r = 0.5 * std::abs(s.z[a] - s.z[b]);
    for (int k : perm)
      if (k != a && k != b && std::abs(s.z[k] - m) <= r * (1.0 + 1e-9))
        throw InputError("half-twist disk contains another branch point");
    letters.push_back({a, b, x > 0 ? -kPi : kPi});
    Configuration next = s;
    std::swap(next.z[a], next.z[b]);
    states.push_back(next);
    std::swap(perm[i - 1], perm[i]);
  }
  return [states, letters](double t) {
    if (letters.empty()) return states.front();
    const double T = std::clamp(t, 0.0, 1.0) * static_cast<double>(letters.size());
    std::size_t seg = std::min(static_cast<std::size_t>(T), letters.size() - 1);
    const double s = T - static_cast<double>(seg);
    Configuration c = states[seg];
    const Letter& L = letters[seg];
    const cd m = 0.5 * (c.z[L.a] + c.z[L.b]);
    const cd rot = std::polar(1.0, L.angle * s);
    c.z[L.a] = m + (c.z[L.a] - m) * rot;
    c.z[L.b] = m + (c.z[L.b] - m) * rot;
    return c;
  };
}

MonodromyMatrix continue_periods(const Configuration& z, const BraidWord& braid, const ContinuationOptions& opt) {
  const ConfigPath path = braid_path(z, braid);
  const ContinuationResult r = continue_along(path, opt);
  if (r.final_residual >= opt.certify_residual)
    throw VerificationError("rounding residual " + std::to_string(r.final_residual) + " too large to certify");
  return {r.transition, r.final_residual, braid};
}

Configuration default_base_configuration() {
  return Configuration::finite({cd(0.0), cd(1.0), cd(2.1), cd(3.3), cd(4.2), cd(5.4)});
}

std::array<MonodromyMatrix, 5> derive_generators(const Configuration& base, const ContinuationOptions& opt) {
  std::array<std::future<MonodromyMatrix>, 5> jobs;
  for (int i = 0; i < 5; ++i)
    jobs[i] = std::async(std::launch::async, [&, i] { return continue_periods(base, {i + 1}, opt); });
  std::array<MonodromyMatrix, 5> out;
  for (int i = 0; i < 5; ++i) out[i] = jobs[i].get();
  return out;
}

namespace {

// Real basis of 4x4 Hermitian matrices: 4 diagonal, then (re, im) of each upper entry.
std::vector<Eigen::Matrix4cd> hermitian_basis() {
  std::vector<Eigen::Matrix4cd> basis;
  for (int i = 0; i < 4; ++i) {
    Eigen::Matrix4cd e = Eigen::Matrix4cd::Zero();
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Eigen::Matrix4cd e = Eigen::Matrix4cd::Zero();
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      basis.push_back(e);
      e(i, j) = cd(0.0, 1.0);
      e(j, i) = cd(0.0, -1.0);
      basis.push_back(e);
    }
  return basis;
}

bool canonical_associate(const EisensteinInt& z) { return z.b() >= 0 && z.b() < z.a(); }

}  // namespace

InvariantGram derive_invariant_gram(const std::array<MonodromyMatrix, 5>& matrices) {
  const auto basis = hermitian_basis();
  Eigen::MatrixXd A(5 * 32, 16);
  for (int m = 0; m < 5; ++m) {
    const Eigen::Matrix4cd M = matrices[m].exact.to_complex();
    for (int k = 0; k < 16; ++k) {
      const Eigen::Matrix4cd E = M.adjoint() * basis[k] * M - basis[k];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          A(m * 32 + 2 * (4 * i + j), k) = E(i, j).real();
          A(m * 32 + 2 * (4 * i + j) + 1, k) = E(i, j).imag();
        }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  InvariantGram out{HermitianForm::standard(), 0, 0.0, {}};
  for (int i = 0; i < sv.size(); ++i) out.singular_values.push_back(sv(i));
  const double tol = 1e-8 * std::max(1.0, sv(0));
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < tol) ++out.solution_dimension;
  if (out.solution_dimension != 1)
    throw VerificationError("invariant form solution space has dimension " + std::to_string(out.solution_dimension) +
                            " (irreducibility failure)");
  const Eigen::VectorXd null = svd.matrixV().col(15);
  Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 16; ++k) H += null(k) * basis[k];

  const ReflectionData rd = reflection_data(matrices[0].exact);
  const Eigen::Vector4cd r = to_complex(rd.root);
  const double hr = r.dot(H * r).real();
  if (std::abs(hr) < 1e-8) throw VerificationError("tau_1 root is isotropic for the invariant form");
  H /= hr;
  double residual = 0.0;
  const EisensteinMatrix G = round_matrix(H, &residual);
  out.rounding_residual = residual;
  if (residual > 1e-6)
    throw VerificationError("invariant form is not integral after scaling (convention error), residual " +
                            std::to_string(residual));
  out.form = HermitianForm(G);
  for (const auto& m : matrices)
    if (!is_isometry(out.form, m.exact)) throw VerificationError("derived form is not preserved by " + m.exact.str());
  return out;
}

bool BraidRelationReport::all_hold() const {
  return std::all_of(relations.begin(), relations.end(), [](const RelationResult& r) { return r.holds; });
}

BraidRelationReport verify_braid_relations(const std::array<MonodromyMatrix, 5>& ms) {
  BraidRelationReport rep;
  auto name = [](int i) { return "M" + std::to_string(i + 1); };
  for (int i = 0; i + 1 < 5; ++i) {
    const auto& a = ms[i].exact;
    const auto& b = ms[i + 1].exact;
    const EisensteinMatrix lhs = a * b * a, rhs = b * a * b;
    RelationResult r{name(i) + name(i + 1) + name(i) + " = " + name(i + 1) + name(i) + name(i + 1), lhs == rhs, ""};
    if (!r.holds) r.dump = lhs.str() + " vs " + rhs.str();
    rep.relations.push_back(r);
  }
  for (int i = 0; i < 5; ++i)
    for (int j = i + 2; j < 5; ++j) {
      const EisensteinMatrix lhs = ms[i].exact * ms[j].exact, rhs = ms[j].exact * ms[i].exact;
      RelationResult r{name(i) + name(j) + " = " + name(j) + name(i), lhs == rhs, ""};
      if (!r.holds) r.dump = lhs.str() + " vs " + rhs.str();
      rep.relations.push_back(r);
    }
  return rep;
}

ReflectionData reflection_data(const EisensteinMatrix& m) {
  const EisensteinMatrix K = m - EisensteinMatrix::identity();
  int j0 = -1;
  for (int j = 0; j < 4 && j0 < 0; ++j)
    for (int i = 0; i < 4; ++i)
      if (!K(i, j).is_zero()) {
        j0 = j;
        break;
      }
  if (j0 < 0) throw VerificationError("not a reflection: matrix is the identity");
  const EisVec c = K.column(j0);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k)
        if (!(K(i, j) * c[k] == K(k, j) * c[i]))
          throw VerificationError("not a reflection: M - I has rank greater than one");
  EisensteinInt g;
  for (const auto& x : c) g = gcd(g, x);
  EisVec r;
  for (int i = 0; i < 4; ++i) r[i] = *exact_div(c[i], g);
  int lead = 0;
  while (r[lead].is_zero()) ++lead;
  for (const auto& u : units())
    if (canonical_associate(u * r[lead])) {
      r = u * r;
      break;
    }
  const EisVec mr = m * r;
  const auto mu = exact_div(mr[lead], r[lead]);
  if (!mu || !(mr == (*mu) * r)) throw VerificationError("not a reflection: root is not an eigenvector");
  if (!mu->is_unit() || *mu == EisensteinInt(1))
    throw VerificationError("not a reflection: eigenvalue " + mu->str() + " is not a nontrivial unit");
  return {r, *mu};
}

ReflectionData reflection_data(const EisensteinMatrix& m, const HermitianForm& h) {
  ReflectionData rd = reflection_data(m);
  const ShortRoot root = make_short_root(h, rd.root);
  if (!(reflection_matrix(h, root, rd.multiplier) == m))
    throw VerificationError("matrix is not the reflection determined by its root and multiplier");
  return rd;
}

MonodromyMatrix scalar_monodromy_check(const std::array<cd, 5>& z5, double turns, const ContinuationOptions& opt) {
  Configuration c;
  for (int k = 0; k < 5; ++k) c.z[k] = z5[k];
  c.infinity = 5;
  const ConfigPath path = [c, turns](double t) {
    Configuration r = c;
    const cd rot = std::polar(1.0, kTwoPi * turns * t);
    for (int k = 0; k < 5; ++k) r.z[k] = c.z[k] * rot;
    return r;
  };
  ContinuationOptions o = opt;
  o.max_step = std::min(o.max_step, opt.max_step / std::max(1.0, std::abs(turns)));
  const ContinuationResult r = continue_along(path, o);
  return {r.transition, r.final_residual, r.word()};
}

BallPoint ball_point(const Eigen::Vector4cd& v, const HermitianForm& h, double tol) {
  const double n = h.norm(v);
  if (!(n < -tol * v.squaredNorm()))
    throw VerificationError("vector is not in the ball: h(v,v) = " + std::to_string(n));
  Eigen::Vector4cd u = v / std::sqrt(-n);
  int big = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(u[i]) > std::abs(u[big]) * (1.0 + 1e-12)) big = i;
  u *= std::conj(u[big]) / std::abs(u[big]);
  return {u};
}

double ball_distance(const BallPoint& p, const BallPoint& q, const HermitianForm& h) {
  const Eigen::Vector4cd& u = p.v;
  const Eigen::Vector4cd& v = q.v;
  const double nu = h.norm(u), nv = h.norm(v);
  // component of v orthogonal to u; sinh^2 d = h(v_perp, v_perp) / (h(u,u) h(v,v)) * (-h(u,u))
  const cd alpha = h.eval(v, u) / nu;
  const Eigen::Vector4cd vp = v - alpha * u;
  const double s2 = std::max(0.0, h.norm(vp) / (-nv));
  return std::asinh(std::sqrt(s2));
}

}  // namespace torelli
