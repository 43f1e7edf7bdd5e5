#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qarf/groups.hpp"
#include "qarf/homology.hpp"
#include "qarf/rings.hpp"

namespace qarf::cli {

// Exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnknown = 2;

// Runs one command line (without the program name). Reports go to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Group from a registry name or a JSON definition:
//   {"family": "finite-table", "name": ..., "labels": [...], "table": [[...]], "generators": {"X": 1}}
//   {"family": "finite-perm", "name": ..., "points": n, "generators": {"X": [...]}}
//   {"family": "semidirect-zn-c2", "rank": n}
//   {"family": "pullback-cyclic" | "pullback-dihedral", "name": ..., "e": {finite-table},
//    "m": m, "hom": [[k, eps], ...], "generators": {"X": [i, eps, e]}}
groups::GroupPtr load_group_json(std::string_view text);

// "Z[X,Y]", "F2[X]", "F2[X^+-1,Y^+-1]"; a variable written with ^+-1 makes
// the ring Laurent.
PolyRingPtr parse_ring_descriptor(std::string_view text, PolyInvolution inv = PolyInvolution::Trivial);

// "F2", "F3[C3]", "M2(F2[C2])"
FiniteAlgebra parse_algebra_descriptor(std::string_view text);

// Algebra from JSON: {"p": 2, "labels": [...], "unit": [...],
//   "products": [[i, j, k, c], ...], "involution": [[...], ...]}
FiniteAlgebra load_algebra_json(std::string_view text);

// Scenario files live here unless --scenario-dir is given.
std::string default_scenario_dir();

} // namespace qarf::cli
