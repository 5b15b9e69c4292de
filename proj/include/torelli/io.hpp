#pragma once

// JSON documents: certificates, configurations, verdicts and reports.
// Floats are written with 17 significant digits; complex numbers as [re, im].

#include <string>
#include <vector>

#include "json.hpp"

#include "torelli/birational.hpp"
#include "torelli/moduli.hpp"
#include "torelli/residue.hpp"
#include "torelli/torelli.hpp"

namespace torelli::io {

using Json = nlohmann::ordered_json;

std::string dump(const Json& j);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const EisensteinInt& z);
EisensteinInt eisenstein_from_json(const Json& j);
Json to_json(const EisVec& v);
EisVec eisvec_from_json(const Json& j);
Json to_json(const EisensteinMatrix& m);
EisensteinMatrix matrix_from_json(const Json& j);
Json to_json(cd z);
cd complex_from_json(const Json& j);
Json to_json(const Eigen::Vector4cd& v);

// Configurations: {"points": [[num, den] | "inf" | "p/q" | {"re": x, "im": y}, ...]}
// or {"hyperplanes": [[4 rationals], ...]}.
Json to_json(const PointValue& p);
PointValue point_value_from_json(const Json& j);
Json to_json(const PointConfig& c);
Json to_json(const ArrangementConfig& a);
bool is_arrangement(const Json& j);
PointConfig point_config_from_json(const Json& j);
ArrangementConfig arrangement_from_json(const Json& j);
Json to_json(const Mobius& m);

// Monodromy certificate. Loading re-runs every exact check.
Json certificate_to_json(const MonodromyCertificate& cert);
MonodromyCertificate certificate_from_json(const Json& j);
MonodromyCertificate load_certificate(const std::string& path);

// Residue-group certificate: sorted element list with spinor norms, orders and
// the presentation check of the reduced generators.
struct GroupAudit {
  residue::ResidueForm form;
  std::vector<residue::OrthogonalElement> group;
  std::vector<int> spinor;
  std::size_t kernel_order = 0;
  std::vector<residue::OrthogonalElement> generators;
  residue::S6Report s6;
  bool scalar_trivial = false;  // omega * identity reduces to the identity
};

GroupAudit run_group_audit(const MonodromyCertificate& cert);
Json group_audit_to_json(const GroupAudit& audit);
// Throws VerificationError when any recorded fact fails to re-verify.
void validate_group_certificate(const Json& j);

Json to_json(const TorelliVerdict& v, const PointConfig& a, const PointConfig& b);
Json to_json(const PeriodPoint& p);
Json to_json(const DegenerationReport& r);
Json to_json(const CheckReport& r);
Json to_json(const ManifestReport& r);
Json to_json(const HodgeTable& t);
Json to_json(const MonodromyMatrix& m);

}  // namespace torelli::io
