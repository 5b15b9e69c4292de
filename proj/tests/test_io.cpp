#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "support/fixtures.hpp"
#include "torelli/errors.hpp"
#include "torelli/io.hpp"

using namespace torelli;
using io::Json;

TEST_CASE("floats are written with seventeen significant digits") {
  CHECK(io::dump(Json(0.1)) == "0.10000000000000001\n");
  CHECK(io::dump(Json(2.0)) == "2.0\n");
  CHECK(io::dump(Json(-1.5e-300)) == "-1.5000000000000001e-300\n");
  CHECK(io::dump(Json::array({1, 2})) == "[1, 2]\n");
  const double x = 0.1 + 0.2;
  CHECK(Json::parse(io::dump(Json(x))).get<double>() == x);
}

TEST_CASE("Eisenstein values round trip") {
  const EisensteinInt z(3, -7);
  CHECK(io::eisenstein_from_json(io::to_json(z)) == z);
  const i128 big = static_cast<i128>(1) << 90;
  const EisensteinInt huge(big, -big + 5);
  CHECK(io::to_json(huge)[0].is_string());
  CHECK(io::eisenstein_from_json(io::to_json(huge)) == huge);

  const EisensteinMatrix& m = fixture::generator(2);
  CHECK(io::matrix_from_json(io::to_json(m)) == m);
  CHECK(io::matrix_from_json(Json::parse(io::dump(io::to_json(m)))) == m);
  CHECK_THROWS_AS(io::eisenstein_from_json(Json::array({1})), InputError);
  CHECK_THROWS_AS(io::eisenstein_from_json(Json::array({1.5, 0})), InputError);
}

TEST_CASE("configurations") {
  const Json j = Json::parse(R"({"points": [[0, 1], [1, 2], "inf", "3/4", {"re": 0.5, "im": -2}, [-9, 3]]})");
  const PointConfig c = io::point_config_from_json(j);
  CHECK(c.points[1].q() == Rational(1, 2));
  CHECK(c.points[2].is_infinity());
  CHECK(c.points[3].q() == Rational(3, 4));
  CHECK(c.points[4].z() == cd(0.5, -2.0));
  CHECK(c.points[5].q() == Rational(-3));
  CHECK_FALSE(c.is_exact());

  const PointConfig back = io::point_config_from_json(io::to_json(c));
  for (int i = 0; i < 6; ++i) CHECK(back.points[i].str() == c.points[i].str());

  CHECK_THROWS_AS(io::point_config_from_json(Json::parse(R"({"points": [0.5, 1, 2, 3, 4, 5]})")), InputError);
  CHECK_THROWS_AS(io::point_config_from_json(Json::parse(R"({"points": [[0, 1], "inf"]})")), InputError);
  CHECK_THROWS_AS(io::point_config_from_json(Json::parse(R"({"points": [[1, 0], 1, 2, 3, 4, 5]})")), InputError);

  const Json arr = Json::parse(R"({"hyperplanes": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1],[1,1,1,1],[1,"2",3,[5,1]]]})");
  CHECK(io::is_arrangement(arr));
  CHECK_FALSE(io::is_arrangement(j));
  const ArrangementConfig a = io::arrangement_from_json(arr);
  CHECK(a.exact);
  CHECK(a.q[5][3] == Rational(5));
}

TEST_CASE("monodromy certificate") {
  const auto& cert = fixture::certificate();
  const Json j = io::certificate_to_json(cert);
  const MonodromyCertificate back = io::certificate_from_json(Json::parse(io::dump(j)));
  for (int i = 0; i < 5; ++i) CHECK(back.generators[i].exact == cert.generators[i].exact);
  CHECK(back.form().gram() == cert.form().gram());

  Json entry = j;
  entry["generators"][1]["matrix"][0][0] = Json::array({7, 0});
  CHECK_THROWS_AS(io::certificate_from_json(entry), VerificationError);

  Json gram = j;
  gram["gram"]["matrix"][0][0] = Json::array({2, 0});
  CHECK_THROWS_AS(io::certificate_from_json(gram), VerificationError);

  Json mult = j;
  mult["generators"][0]["multiplier"] = Json::array({0, 1});
  CHECK_THROWS_AS(io::certificate_from_json(mult), VerificationError);

  Json residual = j;
  residual["generators"][3]["float_residual"] = 1e-3;
  CHECK_THROWS_AS(io::certificate_from_json(residual), VerificationError);

  Json kind = j;
  kind["kind"] = "something else";
  CHECK_THROWS(io::certificate_from_json(kind));
}

TEST_CASE("group certificate") {
  const io::GroupAudit audit = io::run_group_audit(fixture::certificate());
  const Json j = Json::parse(io::dump(io::group_audit_to_json(audit)));
  CHECK(j["order"] == 1440);
  CHECK(j["kernel_order"] == 720);
  CHECK_NOTHROW(io::validate_group_certificate(j));
  CHECK(io::dump(io::group_audit_to_json(io::run_group_audit(fixture::certificate()))) == io::dump(j));

  Json spinor = j;
  spinor["elements"][100][1] = 1 - spinor["elements"][100][1].get<int>();
  CHECK_THROWS_AS(io::validate_group_certificate(spinor), VerificationError);

  Json missing = j;
  missing["elements"].erase(7);
  CHECK_THROWS_AS(io::validate_group_certificate(missing), VerificationError);

  Json order = j;
  order["kernel_order"] = 360;
  CHECK_THROWS_AS(io::validate_group_certificate(order), VerificationError);

  Json gens = j;
  gens["generators"][2]["matrix"] = gens["generators"][0]["matrix"];
  CHECK_THROWS_AS(io::validate_group_certificate(gens), VerificationError);
}

TEST_CASE("verdict documents") {
  const auto& cert = fixture::certificate();
  const PointConfig a = io::point_config_from_json(Json::parse(R"({"points": [0, 1, "inf", 2, 3, 4]})"));
  const PointConfig b = io::point_config_from_json(Json::parse(R"({"points": [0, 1, "inf", 2, 3, 5]})"));
  const Json eq = io::to_json(torelli_check(a, a, cert), a, a);
  CHECK(eq["verdict"] == "Equivalent");
  CHECK(eq.contains("isometry"));
  const Json ne = io::to_json(torelli_check(a, b, cert), a, b);
  CHECK(ne["verdict"] == "Distinct");
  CHECK(ne.contains("closest_element"));
}

TEST_CASE("files") {
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/file.json"), InputError);
  const auto path = std::filesystem::temp_directory_path() / "torelli_io_test.json";
  io::write_text_file(path.string(), "{ not json");
  CHECK_THROWS_AS(io::read_json_file(path.string()), InputError);
  io::write_text_file(path.string(), io::dump(Json{{"x", 1}}));
  CHECK(io::read_json_file(path.string())["x"] == 1);
  std::filesystem::remove(path);
}
