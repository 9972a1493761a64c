#include "doctest.h"

#include <string>

#include "shellspec/error.hpp"
#include "shellspec/report.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {

int occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

struct Sweep {
  TriMesh mesh;
  SweepRecord record;
};

Sweep ten_steps() {
  const auto d = domains::eccentric_annulus(1.0, 2.0, 0.3);
  Sweep s{build_transfinite_mesh(d, 64, 8), {}};
  const auto bc = BoundaryCondition::robin(1.0);
  const auto u = solve_first(s.mesh, bc, bc).nodal_values;
  FlowOptions o;
  o.t_end = -0.5;
  o.dt = 0.05;
  s.record = advance_fronts(s.mesh, u, o);
  return s;
}

}  // namespace

TEST_CASE("CSV numbers carry twelve significant digits") {
  CHECK(report::csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(report::csv_number(2.0) == "2");
  CHECK(report::csv_number(-1.5e-20) == "-1.5e-20");
}

TEST_CASE("JSON numbers round trip") {
  const auto bc = BoundaryCondition::robin(1.0);
  const auto r = smallest_eigenvalue(ShellProblem{2, 1.0, 2.0, bc, bc}, 1e-12);
  const auto j = report::to_json(r);
  const auto back = nlohmann::json::parse(j.dump());
  CHECK(back["lambda"].get<double>() == r.lambda);
}

TEST_CASE("ten recorded steps draw twenty front polylines") {
  const auto s = ten_steps();
  REQUIRE(s.record.steps.size() == 10);
  const std::string svg = report::svg_fronts(s.record, s.mesh);
  CHECK(occurrences(svg, "<polyline") == 20);
  CHECK(occurrences(svg, "<path") == 2);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  // identical inputs, identical bytes
  const auto again = ten_steps();
  CHECK(report::svg_fronts(again.record, again.mesh) == svg);
  CHECK(report::csv_sweep(again.record) == report::csv_sweep(s.record));
  CHECK(occurrences(report::csv_sweep(s.record), "\n") == 11);
}

TEST_CASE("empty input is a usage error") {
  try {
    report::svg_fronts(SweepRecord{}, TriMesh{});
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
  }
  CHECK_THROWS_AS(report::svg_plot({}, "x", "y"), Error);
}

TEST_CASE("max-min plot marks the crossing") {
  const auto bc = BoundaryCondition::robin(1.0);
  const ShellProblem p{2, 1.0, 2.0, bc, bc};
  const auto split = maxmin_split(p, 1e-12);
  report::Series rn{"RN", {}}, nr{"NR", {}};
  for (int i = 1; i < 20; ++i) {
    const double d = 1.0 + i / 20.0;
    rn.points.emplace_back(d, smallest_eigenvalue(ShellProblem{2, 1.0, d, bc, BoundaryCondition::neumann()}, 1e-12).lambda);
    nr.points.emplace_back(d, smallest_eigenvalue(ShellProblem{2, d, 2.0, BoundaryCondition::neumann(), bc}, 1e-12).lambda);
  }
  // the curves cross exactly once, at delta*
  int crossings = 0;
  for (std::size_t i = 1; i < rn.points.size(); ++i) {
    const double a = rn.points[i - 1].second - nr.points[i - 1].second;
    const double b = rn.points[i].second - nr.points[i].second;
    if (a * b < 0.0) {
      ++crossings;
      CHECK(split.delta_star > rn.points[i - 1].first);
      CHECK(split.delta_star < rn.points[i].first);
    }
  }
  CHECK(crossings == 1);
  const std::string svg = report::svg_plot({rn, nr}, "delta", "lambda", &split.delta_star);
  CHECK(occurrences(svg, "<polyline") == 2);
  CHECK(occurrences(svg, "stroke-dasharray") == 1);
  CHECK(svg == report::svg_plot({rn, nr}, "delta", "lambda", &split.delta_star));
}
