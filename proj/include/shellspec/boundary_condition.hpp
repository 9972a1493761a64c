#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace shellspec {

/// Condition du/dnu + h u = 0 on one boundary component. Neumann is h = 0,
/// Dirichlet is h = +inf; Robin carries a finite positive h (units 1/length).
class BoundaryCondition {
 public:
  enum class Kind { Neumann, Robin, Dirichlet };

  static BoundaryCondition neumann() { return BoundaryCondition(Kind::Neumann, 0.0); }
  static BoundaryCondition dirichlet() {
    return BoundaryCondition(Kind::Dirichlet, std::numeric_limits<double>::infinity());
  }
  /// Throws Domain unless 0 < h < inf.
  static BoundaryCondition robin(double h);

  /// Parses "neumann", "dirichlet", "robin:H". "robin:inf" maps to Dirichlet
  /// and "robin:0" to Neumann.
  static BoundaryCondition parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double h() const noexcept { return h_; }
  bool is_neumann() const noexcept { return kind_ == Kind::Neumann; }
  bool is_robin() const noexcept { return kind_ == Kind::Robin; }
  bool is_dirichlet() const noexcept { return kind_ == Kind::Dirichlet; }

  std::string to_string() const;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;

 private:
  BoundaryCondition(Kind kind, double h) : kind_(kind), h_(h) {}

  Kind kind_;
  double h_;
};

}  // namespace shellspec
