#include "shellspec/boundary_condition.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "shellspec/error.hpp"

namespace shellspec {

BoundaryCondition BoundaryCondition::robin(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::Domain, "Robin parameter must be finite and positive");
  }
  return BoundaryCondition(Kind::Robin, h);
}

BoundaryCondition BoundaryCondition::parse(std::string_view text) {
  if (text == "neumann") return neumann();
  if (text == "dirichlet") return dirichlet();
  if (text.starts_with("robin:")) {
    const std::string value(text.substr(6));
    if (value == "inf") return dirichlet();
    char* end = nullptr;
    const double h = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
      throw Error(ErrorKind::Usage, "cannot parse Robin parameter '" + value + "'");
    }
    if (h == 0.0) return neumann();
    return robin(h);
  }
  throw Error(ErrorKind::Usage,
              "boundary condition must be neumann, dirichlet or robin:H, got '" +
                  std::string(text) + "'");
}

std::string BoundaryCondition::to_string() const {
  switch (kind_) {
    case Kind::Neumann: return "neumann";
    case Kind::Dirichlet: return "dirichlet";
    case Kind::Robin: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, h_);
      return "robin:" + std::string(buf, res.ptr);
    }
  }
  return "?";
}

}  // namespace shellspec
