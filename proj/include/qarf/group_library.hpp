#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qarf/groups.hpp"

namespace qarf::groups {

// ---------------------------------------------------------------------------
// Finite group builders. Generator names are single letters.

FiniteGroupPtr cyclic(int n, const std::string& gen = "X", std::string name = "");
// C_n x| C_m, y x y^-1 = x^r; requires r^m = 1 mod n.
FiniteGroupPtr cyclic_semidirect(std::string name, int n, int m, int r, const std::string& x = "X",
                                 const std::string& y = "S");
// Dihedral group of order 2n.
FiniteGroupPtr dihedral(int n, const std::string& r = "R", const std::string& s = "S");
// Dicyclic group of order 4n: a^{2n} = 1, x^2 = a^n, x a x^-1 = a^-1.
FiniteGroupPtr dicyclic(int n, const std::string& a = "A", const std::string& x = "B");
// Direct product; generator names must be distinct.
FiniteGroupPtr direct_product(std::string name, const FiniteGroup& a, const FiniteGroup& b);
// A x| C_2 where the C_2 generator acts by the involutive automorphism phi
// (phi[i] = image of element index i).
FiniteGroupPtr semidirect_c2(std::string name, const FiniteGroup& a, const std::vector<int>& phi,
                             const std::string& s = "S");
// Automorphism of `a` determined by the images of its named generators.
std::vector<int> automorphism_from_generators(const FiniteGroup& a, const std::vector<int>& images);

// The 42 groups of order at most 16, one per isomorphism type.
std::vector<FiniteGroupPtr> small_groups();

// ---------------------------------------------------------------------------
// Example groups

// <X,S | X^12 = S^2 = 1, SXS = X^5>
FiniteGroupPtr order24_example();
// <X,Y,S | S^2 = (XS)^2 = Y^12 = 1, SYS = Y^5, XY = YX>
std::shared_ptr<const PullbackGroup> c2_ltimes_c_c12();
// <Y,S | S^2 = (YS)^4 = (Y^2S)^2 = 1>
std::shared_ptr<const PullbackGroup> d4_extension();
// <X,Y,S | S^2 = (XS)^2 = (YS)^2 = 1, XY = YX>
std::shared_ptr<const SemidirectZnC2> z2_semidirect_c2();

// Named descriptors accepted by the command line and the scenarios.
GroupPtr group_by_name(const std::string& name);
std::vector<std::string> group_names();

} // namespace qarf::groups
