// Batch front end: audits, certificates, verdicts and reports as JSON.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "torelli/birational.hpp"
#include "torelli/errors.hpp"
#include "torelli/io.hpp"
#include "torelli/moduli.hpp"
#include "torelli/periods.hpp"
#include "torelli/residue.hpp"
#include "torelli/torelli.hpp"

namespace {

using namespace torelli;
using io::Json;

enum Exit { ok = 0, verification = 2, precision = 3, input = 4 };

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 1;
  double precision = 1e-10;
  int depth = 6;
  int height_bound = 2;
  std::string out;
  std::string certificate;
  std::string verify;
  bool scalar_check = false;
  bool all = false;
  std::string manifest;
  std::vector<int> pair{1, 2};
  int k = -1;
};

Json run_json(const RunConfig& rc) {
  return Json{{"command", rc.command}, {"seed", rc.seed},     {"precision", rc.precision},
              {"depth", rc.depth},     {"height_bound", rc.height_bound}, {"inputs", rc.inputs}};
}

void emit(const RunConfig& rc, Json report) {
  report["run"] = run_json(rc);
  const std::string text = io::dump(report);
  if (rc.out == "-")
    std::cout << text;
  else if (!rc.out.empty())
    io::write_text_file(rc.out, text);
}

// Summary lines go to stdout unless the report itself does.
void say(const RunConfig& rc, const char* fmt, auto... args) {
  if (rc.out == "-") return;
  if constexpr (sizeof...(args) == 0)
    std::fputs(fmt, stdout);
  else
    std::printf(fmt, args...);
}

ContinuationOptions continuation(const RunConfig& rc) {
  ContinuationOptions o;
  o.seed = rc.seed;
  return o;
}

MonodromyCertificate certificate(const RunConfig& rc) {
  if (!rc.certificate.empty()) return io::load_certificate(rc.certificate);
  return derive_certificate(continuation(rc));
}

int group_audit(const RunConfig& rc) {
  if (!rc.verify.empty()) {
    io::validate_group_certificate(io::read_json_file(rc.verify));
    say(rc, "group certificate %s: valid\n", rc.verify.c_str());
    return ok;
  }
  const MonodromyCertificate cert = certificate(rc);
  const io::GroupAudit audit = io::run_group_audit(cert);
  say(rc, "|Aut(V,q)| = %zu\n|ker spinor| = %zu\n", audit.group.size(), audit.kernel_order);
  for (const auto& r : audit.s6.relations) say(rc, "  %-28s %s\n", r.name.c_str(), r.holds ? "holds" : "FAILS");
  say(rc, "generated order = %zu, abelian = %s, omega*I reduces to I: %s\n", audit.s6.generated_order,
      audit.s6.abelian ? "yes" : "no", audit.scalar_trivial ? "yes" : "no");
  emit(rc, io::group_audit_to_json(audit));
  const bool passed = audit.s6.passed() && audit.group.size() == 2 * audit.kernel_order && audit.scalar_trivial;
  say(rc, "%s\n", passed ? "PASS" : "FAIL");
  return passed ? ok : verification;
}

int monodromy_derive(const RunConfig& rc) {
  if (!rc.verify.empty()) {
    io::load_certificate(rc.verify);
    say(rc, "monodromy certificate %s: valid\n", rc.verify.c_str());
    return ok;
  }
  const MonodromyCertificate cert = derive_certificate(continuation(rc));
  Json report = io::certificate_to_json(cert);
  for (int i = 0; i < 5; ++i)
    say(rc, "M%d  residual %.3g  multiplier %s  root %s\n", i + 1, cert.generators[i].float_residual,
        cert.reflections[i].multiplier.str().c_str(), to_string(cert.reflections[i].root).c_str());
  const auto sig = signature(cert.form());
  say(rc, "Gram %s\nsignature (%d,%d), unimodular %s, solution dimension %d\n", cert.form().gram().str().c_str(),
      sig.first, sig.second, is_unimodular(cert.form()) ? "yes" : "no", cert.gram.solution_dimension);
  say(rc, "relations: %s\n", cert.relations.all_hold() ? "all hold" : "FAIL");
  bool passed = cert.relations.all_hold();
  if (rc.scalar_check) {
    const MonodromyMatrix s = scalar_monodromy_check(
        {cd(0.13, 0.21), cd(1.37, -0.42), cd(2.24, 0.55), cd(-0.71, 1.16), cd(0.45, -1.31)}, 1.0, continuation(rc));
    const bool scalar = s.exact == EisensteinMatrix::scalar(EisensteinInt::omega());
    report["scalar_check"] = Json{{"matrix", io::to_json(s.exact)},
                                  {"float_residual", s.float_residual},
                                  {"omega_identity", scalar},
                                  {"braid_word", s.braid_word}};
    say(rc, "full rotation: %s (residual %.3g)\n", scalar ? "omega * identity" : s.exact.str().c_str(),
        s.float_residual);
    if (!(s.float_residual < 1e-6)) throw PrecisionError("scalar loop residual above 1e-6", s.float_residual);
    passed = passed && scalar;
  }
  emit(rc, report);
  return passed ? ok : verification;
}

PointConfig read_points(const std::string& path) {
  const Json j = io::read_json_file(path);
  if (io::is_arrangement(j)) return points_from_arrangement(io::arrangement_from_json(j));
  return io::point_config_from_json(j);
}

int torelli_check_cmd(const RunConfig& rc) {
  if (rc.inputs.size() != 2) throw InputError("torelli-check needs two configuration files");
  const PointConfig a = read_points(rc.inputs[0]);
  const PointConfig b = read_points(rc.inputs[1]);
  const MonodromyCertificate cert = certificate(rc);
  TorelliOptions opt;
  opt.depth = rc.depth;
  opt.precision = rc.precision;
  opt.continuation = continuation(rc);
  const TorelliVerdict v = torelli_check(a, b, cert, opt);
  say(rc, "verdict %s (ground truth %s), distance %.6g, k = %d\n", to_string(v.kind).c_str(),
      v.ground_truth ? "Equivalent" : "Distinct", v.distance, v.k);
  if (v.isometry)
    say(rc, "%s %s\nbraid word %s, matches %s\n",
        v.kind == TorelliVerdict::Kind::equivalent ? "isometry" : "closest element", v.isometry->str().c_str(),
                      to_string(v.word).c_str(), v.word_matches ? "yes" : "no");
  if (v.words_searched) say(rc, "searched %lld words to depth %d\n", v.words_searched, v.depth);
  say(rc, "%s\n", v.agrees() ? "AGREES" : "DISAGREES");
  emit(rc, io::to_json(v, a, b));
  return v.agrees() ? ok : verification;
}

int period_cmd(const RunConfig& rc) {
  if (rc.inputs.size() != 1) throw InputError("period needs one configuration file");
  const Json j = io::read_json_file(rc.inputs[0]);
  const MonodromyCertificate cert = certificate(rc);
  const PeriodPoint p = io::is_arrangement(j) ? period_point(io::arrangement_from_json(j), cert, rc.precision)
                                               : period_point(io::point_config_from_json(j), cert, rc.precision);
  Json report = io::to_json(p);
  const double hv = cert.form().norm(p.periods.values);
  report["h_vv"] = hv;
  say(rc, "k = %d, h(v,v) = %.17g, quadrature error %.3g\n", p.cls.k, hv, p.periods.precision);
  for (int i = 0; i < 4; ++i)
    say(rc, "  v%d = %.17g %+.17gi\n", i + 1, p.point.v(i).real(), p.point.v(i).imag());
  if (p.cls.k == 0) {
    const MirrorDatum m = mirror_locus_distance(p.point, rc.height_bound, cert.form());
    report["mirror_locus"] = Json{{"root", io::to_json(m.root.r)}, {"distance", m.distance},
                                  {"height_bound", rc.height_bound}};
    say(rc, "nearest mirror %s at distance %.6g\n", to_string(m.root.r).c_str(), m.distance);
  } else if (p.mirror) {
    say(rc, "on the mirror of %s (distance %.3g)\n", to_string(p.mirror->root.r).c_str(), p.mirror->distance);
  }
  emit(rc, report);
  return hv < 0 ? ok : verification;
}

Configuration degeneration_base(const RunConfig& rc) {
  if (!rc.inputs.empty()) {
    const PointConfig c = read_points(rc.inputs[0]);
    if (stability(c).k != 0) throw InputError("degenerate needs six distinct points");
    return to_configuration(c);
  }
  Configuration z = default_base_configuration();
  for (int i = 0; i < 6; ++i) z.z[i] += cd(0.0, 0.1 * ((i * 7) % 5) - 0.2);
  return z;
}

int degenerate_cmd(const RunConfig& rc) {
  if (rc.pair.size() != 2) throw InputError("--pair takes two point indices");
  const MonodromyCertificate cert = certificate(rc);
  const DegenerationReport r =
      degeneration_report(degeneration_base(rc), {rc.pair[0], rc.pair[1]}, default_eps_schedule(), cert);
  say(rc, "%-10s %-24s %s\n", "eps", "|vanishing period|", "mirror distance");
  for (const auto& row : r.rows) say(rc, "%-10.3g %-24.17g %.17g\n", row.eps, row.vanishing, row.mirror);
  say(rc, "exponent %.6f, mirror distance decreasing: %s\nlimit vs direct k=1 point: %.3g\n", r.exponent,
      r.mirror_monotone ? "yes" : "no", r.limit_distance);
  emit(rc, io::to_json(r));
  const bool passed = std::abs(r.exponent - 1.0 / 3.0) < 0.02 && r.mirror_monotone && r.limit_distance < 1e-4;
  return passed ? ok : verification;
}

int appendix_cmd(const RunConfig& rc) {
  if (!rc.all) throw InputError("appendix-verify: pass --all to run the whole manifest");
  const Manifest m = rc.manifest.empty() ? builtin_manifest() : load_manifest(rc.manifest);
  CheckOptions opt;
  opt.seed = rc.seed;
  const ManifestReport rep = run_manifest(m, opt);
  for (const auto& row : rep.rows)
    say(rc, "%-4s %-12s %-26s %-10.3g %s\n", row.passed ? "PASS" : "FAIL", row.kind.c_str(), row.name.c_str(),
        row.max_residual, row.anchor.c_str());
  say(rc, "%s\n", rep.all_passed() ? "all checks pass" : "FAILURES");
  emit(rc, io::to_json(rep));
  return rep.all_passed() ? ok : verification;
}

int hodge_cmd(const RunConfig& rc) {
  Json rows = Json::array();
  bool passed = true;
  for (int k = 0; k <= 3; ++k) {
    if (rc.k >= 0 && k != rc.k) continue;
    const HodgeTable t = hodge_numbers(k);
    rows.push_back(io::to_json(t));
    say(rc, "k = %d: rank %d, dim_Q %d, curve omega-bar (%d,%d)", k, t.rank_eisenstein, t.dim_q,
        t.curve_omegabar.first, t.curve_omegabar.second);
    if (k == 0) say(rc, ", threefold (h30,h21) = (%d,%d)", t.threefold.first, t.threefold.second);
    say(rc, "\n");
    passed = passed && t.dim_q == 8 - 2 * k;
  }
  emit(rc, Json{{"tables", rows}});
  return passed ? ok : verification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Period map, monodromy and Torelli checks for six points on the line"};
  app.require_subcommand(1);
  RunConfig rc;

  auto common = [&rc](CLI::App* sub, bool cert = true) {
    sub->add_option("--seed", rc.seed, "random seed")->capture_default_str();
    sub->add_option("--precision", rc.precision, "quadrature precision target")->capture_default_str();
    sub->add_option("--depth", rc.depth, "word length bound for the group search")->capture_default_str();
    sub->add_option("--height-bound", rc.height_bound, "coordinate bound for short roots")->capture_default_str();
    sub->add_option("--out", rc.out, "write the JSON report here ('-' for standard output)");
    if (cert) sub->add_option("--certificate", rc.certificate, "monodromy certificate to use instead of deriving one");
  };

  auto* ga = app.add_subcommand("group-audit", "enumerate O(V,q), spinor kernel and the S6 presentation check");
  common(ga);
  ga->add_option("--verify", rc.verify, "validate a group certificate instead");

  auto* md = app.add_subcommand("monodromy-derive", "derive the five generators and the invariant form");
  common(md, false);
  md->add_flag("--scalar-check", rc.scalar_check, "also continue around the full rotation loop");
  md->add_option("--verify", rc.verify, "validate a monodromy certificate instead");

  auto* tc = app.add_subcommand("torelli-check", "compare the period points of two configurations");
  common(tc);
  tc->add_option("configs", rc.inputs, "a.json b.json")->expected(2)->required();

  auto* dg = app.add_subcommand("degenerate", "collide two points and follow the period point");
  common(dg);
  dg->add_option("config", rc.inputs, "six distinct points (optional)")->expected(0, 1);
  dg->add_option("--pair", rc.pair, "indices of the colliding points")->expected(2);

  auto* av = app.add_subcommand("appendix-verify", "run the manifest of varieties and rational maps");
  common(av, false);
  av->add_flag("--all", rc.all, "run every entry");
  av->add_option("--manifest", rc.manifest, "manifest file (default: built in)");

  auto* pp = app.add_subcommand("period", "period point of a configuration");
  common(pp);
  pp->add_option("config", rc.inputs, "configuration file")->expected(1)->required();

  auto* hd = app.add_subcommand("hodge", "rank and Hodge number table");
  common(hd, false);
  hd->add_option("--k", rc.k, "number of double points (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input;
  }

  try {
    if (*ga) return rc.command = "group-audit", group_audit(rc);
    if (*md) return rc.command = "monodromy-derive", monodromy_derive(rc);
    if (*tc) return rc.command = "torelli-check", torelli_check_cmd(rc);
    if (*dg) return rc.command = "degenerate", degenerate_cmd(rc);
    if (*av) return rc.command = "appendix-verify", appendix_cmd(rc);
    if (*pp) return rc.command = "period", period_cmd(rc);
    if (*hd) return rc.command = "hodge", hodge_cmd(rc);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::verification: return verification;
      case ErrorKind::precision: return precision;
      case ErrorKind::input: return input;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return verification;
  }
  return input;
}
