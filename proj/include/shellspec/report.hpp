#pragma once

// CSV, JSON and SVG emission. CSV floats use 12 significant digits; JSON uses
// the shortest representation that round-trips; SVG coordinates are fixed
// point so identical inputs give identical bytes.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shellspec/convex_geometry.hpp"
#include "shellspec/counterexample.hpp"
#include "shellspec/flow.hpp"
#include "shellspec/morse3d.hpp"
#include "shellspec/shell_radial.hpp"

namespace shellspec::report {

std::string csv_number(double x);

std::string csv_profile(const RadialProfile& profile);
std::string csv_monotonicity(const MonotonicityTable& table);
std::string csv_sweep(const SweepRecord& record);
std::string csv_counterexample(const std::vector<CounterexampleRow>& rows);
std::string csv_points(const std::vector<Vec3>& points);
std::string csv_nodal(const TriMesh& mesh, const Eigen::VectorXd& values);

nlohmann::json to_json(const RadialEigenResult& r, bool with_profile = false);
nlohmann::json to_json(const MonotonicityTable& t);
nlohmann::json to_json(const MaxMinSplit& s);
nlohmann::json to_json(const MembershipReport& m);
nlohmann::json to_json(const SteinerFit& f);
nlohmann::json to_json(const AlexandrovFenchelReport& r);
nlohmann::json to_json(const RichardsonResult& r);
nlohmann::json to_json(const HwReport& r);
nlohmann::json to_json(const CounterexampleRow& r);
nlohmann::json to_json(const CriticalPoint3D& c);
nlohmann::json to_json(const MeshQuality& q);
/// Per-step scalars only; fronts go to CSV/SVG.
nlohmann::json to_json(const SweepRecord& r);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Fronts of every recorded step (two polylines per step) over the domain
/// boundary. Throws Usage on an empty record.
std::string svg_fronts(const SweepRecord& record, const TriMesh& mesh);
/// Line plot with axes and legend; an optional vertical marker at x = marker.
std::string svg_plot(const std::vector<Series>& series, const std::string& x_label,
                     const std::string& y_label, const double* marker = nullptr);

void write_file(const std::string& path, const std::string& content);

}  // namespace shellspec::report
