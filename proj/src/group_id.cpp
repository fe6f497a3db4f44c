#include "lieosc/group_id.hpp"

#include <cmath>
#include <numbers>

#include "lieosc/errors.hpp"

namespace lieosc {

GroupId GroupId::torus(int n) {
  if (n < 1 || n > 3) throw InvalidArgument("torus dimension must be 1, 2 or 3, got " + std::to_string(n));
  return GroupId(Kind::Torus, n);
}

GroupId GroupId::parse(std::string_view name) {
  if (name == "SU2" || name == "su2") return su2();
  if (name.size() == 2 && (name[0] == 'T' || name[0] == 't') && name[1] >= '1' && name[1] <= '3')
    return torus(name[1] - '0');
  throw InvalidArgument("unknown group '" + std::string(name) + "' (expected T1, T2, T3 or SU2)");
}

double GroupId::diameter() const {
  // SU(2) is the round 3-sphere of radius 2.
  if (is_su2()) return 2.0 * std::numbers::pi;
  return 0.5 * std::sqrt(static_cast<double>(dim_));
}

std::string GroupId::name() const { return is_su2() ? "SU2" : "T" + std::to_string(dim_); }

}  // namespace lieosc
