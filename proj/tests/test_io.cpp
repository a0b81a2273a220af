#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bpinn/errors.hpp"
#include "bpinn/io.hpp"
#include "support.hpp"

using namespace bpinn;

namespace {

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("metrics CSV layout") {
  TrainingHistory h;
  h.augmented = false;
  ResidualBreakdown b;
  b.r_u = 0.1;
  b.r_domain = 0.1;
  b.r_boundary = 0.2;
  b.r_total = 0.30000000000000004;
  h.records.push_back({1, b, 0.5});
  h.records.push_back({2, b, std::nullopt});
  const Provenance p{"train", nlohmann::json{{"a", 1}}, 7};
  const std::string csv = metrics_csv(h, p);
  CHECK(csv.find("# config: {\"a\":1}") != std::string::npos);
  CHECK(csv.find("# seed: 7") != std::string::npos);
  const auto lines = data_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "epoch,r_u,r_v,r_div,r_theta,r_boundary_total,r_p,r_div_x,r_div_y,r_domain,r_augm,r_total,validation_total");
  CHECK(lines[1] == "1,0.10000000000000001,0,0,0,0.20000000000000001,,,,0.10000000000000001,,0.30000000000000004,0.5");
  CHECK(lines[2].back() == ',');
  CHECK(std::stod("0.30000000000000004") == b.r_total);
}

TEST_CASE("collocation CSV round trip") {
  const CollocationSet s = hierarchical_datasets(3, DomainSpec{0, 1, -1, 1}, 5).back();
  const std::string csv = collocation_csv(s, {"sample", nlohmann::json::object(), 5});
  const CollocationSet back = parse_collocation_csv(csv);
  REQUIRE(back.domain_points.size() == s.domain_points.size());
  REQUIRE(back.boundary_points.size() == s.boundary_points.size());
  for (std::size_t i = 0; i < s.domain_points.size(); ++i) {
    CHECK(back.domain_points[i].x == s.domain_points[i].x);
    CHECK(back.domain_points[i].y == s.domain_points[i].y);
  }
  for (std::size_t i = 0; i < s.boundary_points.size(); ++i) {
    CHECK(back.boundary_points[i].edge == s.boundary_points[i].edge);
    CHECK(back.boundary_points[i].target == s.boundary_points[i].target);
  }
  const auto lines = data_lines(csv);
  CHECK(lines[0] == "x,y,kind,g_u,g_v,g_theta,g_p");
  CHECK(lines[1].find(",domain,") != std::string::npos);

  const CollocationSet minimal = parse_collocation_csv("x,y,kind,g_u,g_v,g_theta\n0.5,0.5,domain,,,\n0,-1,edge-S,1,2,3\n");
  CHECK(minimal.domain_points.size() == 1);
  REQUIRE(minimal.boundary_points.size() == 1);
  CHECK(minimal.boundary_points[0].target.theta == 3.0);
  CHECK(std::isnan(minimal.boundary_points[0].target.p));
  CHECK_THROWS_AS(parse_collocation_csv("x,y,kind,g_u,g_v,g_theta\n1,2,edge-Q,0,0,0\n"), IoError);
  CHECK_THROWS_AS(parse_collocation_csv("a,b\n"), IoError);
  CHECK_THROWS_AS(parse_collocation_csv("x,y,kind,g_u,g_v,g_theta\n1,zz,domain,,,\n"), IoError);
}

TEST_CASE("grid field CSV and error report JSON") {
  const auto grid = test_grid(DomainSpec{}, 3);
  std::array<std::vector<double>, 4> f;
  for (auto& v : f) v.assign(grid.size(), 0.25);
  const auto lines = data_lines(grid_field_csv(grid, f, {"evaluate", nlohmann::json::object(), 1}));
  CHECK(lines.size() == 10);
  CHECK(lines[0] == "x,y,u,v,p,theta");
  CHECK(lines[1] == "-1,-1,0.25,0.25,0.25,0.25");
  f[2].pop_back();
  CHECK_THROWS_AS(grid_field_csv(grid, f, {}), ArgumentError);

  ErrorReport r;
  r.fields[3].w0_inf = 0.5;
  r.n_per_side = 3;
  r.grid_points = 9;
  const auto j = error_report_json(r);
  CHECK(j["fields"]["theta"]["w0_inf"] == 0.5);
  CHECK(j["grid"]["points"] == 9);
}

TEST_CASE("file helpers name the path on failure") {
  try {
    read_text_file("/nonexistent/dir/file.txt");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/file.txt") != std::string::npos);
  }
  const auto dir = testing::scratch_dir("io");
  write_text_file(dir / "deep" / "x.txt", "hello");
  CHECK(read_text_file(dir / "deep" / "x.txt") == "hello");
}
