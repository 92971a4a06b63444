#include "torsionlab/errors.hpp"
#include "torsionlab/serialize.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace torsionlab;

TEST_CASE("every domain family round-trips through JSON") {
  const std::vector<DomainSpec> specs = {Disk{2.0},
                                         Rectangle{1.0, 8.0},
                                         LShape{1.0, 2.0, 0.5},
                                         Annulus{0.25, 1.0},
                                         PuncturedSquare{3, 0.05},
                                         Dumbbell{4, 0.5, 0.3, 0.25},
                                         Polygon{{{0, 0}, {1, 0}, {0.5, 1}}},
                                         Bitmap{"mask.pgm"}};
  for (const DomainSpec& s : specs) {
    const Json j = to_json(s);
    CHECK(j.at("family") == family_name(s));
    CHECK(to_json(domain_from_json(j)) == j);
  }
}

TEST_CASE("malformed domain JSON is rejected") {
  CHECK_THROWS_AS(domain_from_json(Json{{"family", "hexagon"}}), BadSpec);
  CHECK_THROWS_AS(domain_from_json(Json{{"family", "disk"}}), BadSpec);
  CHECK_THROWS_AS(domain_from_json(Json{{"family", "disk"}, {"R", "one"}}), BadSpec);
  CHECK_THROWS_AS(domain_from_json(Json{{"family", "disk"}, {"R", -1}}), BadSpec);
  CHECK_THROWS_AS(domain_from_json(Json{{"family", "annulus"}, {"r_in", 1}, {"r_out", 0.5}}), BadSpec);
  CHECK_THROWS_AS(domain_from_json(Json::array()), BadSpec);
}

TEST_CASE("report CSV has stable columns") {
  CHECK(report_csv_header() ==
        "check_id,domain,status,lhs,rhs,margin,pass,resolved,numerical_error,params,constants_snapshot_id");
  BoundReport r;
  r.check_id = "E9";
  r.domain = "disk";
  r.status = CheckStatus::Pass;
  r.pass = true;
  r.lhs = 0.5;
  r.rhs = 0.75;
  r.margin = 0.25;
  r.params = {{"h", 0.125}};
  r.constants_snapshot_id = "abc";
  CHECK(report_csv_row(r) == "E9,disk,pass,0.5,0.75,0.25,true,false,0,h=0.125,abc");
  const Json j = to_json(r);
  CHECK(j.at("status") == "pass");
  CHECK(j.at("params").at("h") == 0.125);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_double(2.404825557695773)) == 2.404825557695773);
}

TEST_CASE("constant table JSON carries the decimal strings and snapshot id") {
  const ConstantTable& t = constant_table();
  const Json j = to_json(t);
  CHECK(j.at("snapshot_id") == t.snapshot_id);
  CHECK(j.at("decimal").at("zeta3") == t.decimal.at("zeta3"));
  CHECK(j.at("bessel_zero").get<double>() == t.bessel_zero);
}

TEST_CASE("atomic writes create directories and parse back") {
  const auto dir = std::filesystem::temp_directory_path() / "torsionlab_test_serialize" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const Json j{{"a", 1}, {"b", {1.5, 2.5}}};
  write_json(dir / "x.json", j);
  CHECK(read_json(dir / "x.json") == j);
  CHECK_FALSE(std::filesystem::exists(dir / "x.json.tmp"));
  std::ofstream(dir / "bad.json") << "{not json";
  CHECK_THROWS_AS(read_json(dir / "bad.json"), BadSpec);
  CHECK_THROWS_AS(read_json(dir / "missing.json"), BadSpec);
}
