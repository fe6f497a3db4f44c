#pragma once

#include <string>
#include <string_view>

namespace lieosc {

/// One of the supported compact Lie groups: the torus T^n (1 <= n <= 3) or SU(2).
class GroupId {
 public:
  enum class Kind { Torus, Su2 };

  static GroupId torus(int n);
  static GroupId su2() { return GroupId(Kind::Su2, 3); }

  /// Parses "T1", "T2", "T3" or "SU2".
  static GroupId parse(std::string_view name);

  Kind kind() const { return kind_; }
  bool is_torus() const { return kind_ == Kind::Torus; }
  bool is_su2() const { return kind_ == Kind::Su2; }

  /// Manifold dimension n(G): n for T^n, 3 for SU(2).
  int dimension() const { return dim_; }

  /// Geodesic diameter under the library's metric normalization.
  double diameter() const;

  std::string name() const;

  bool operator==(const GroupId&) const = default;

 private:
  GroupId(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
};

}  // namespace lieosc
