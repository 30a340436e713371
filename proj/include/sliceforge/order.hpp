#pragma once

#include <map>
#include <string>
#include <vector>

#include "sliceforge/geometry.hpp"
#include "sliceforge/hinge.hpp"

namespace sliceforge {

/// Constrained-permutation problem over hinge assembly positions.
///
/// Hard constraints: positions form a bijection onto {0..n-1}, the backbone
/// is at position 0, and for every triple (i, j, k) hinge j precedes both i
/// and k. The objective sum(w_distance[h] * x[h]) is minimized.
struct OrderProblem {
  std::vector<int> hinge_ids;
  int backbone = 0;
  std::vector<PrecedenceTriple> triples;
  std::map<int, double> w_distance;
  /// Big-M of the mixed-integer form (n + 1); only used for LP export.
  int big_m = 1;
};

struct AssemblyPlan {
  std::vector<int> hinge_order;   // hinge ids by position
  std::map<int, int> position;    // hinge id -> position
  std::vector<int> slice_order;
  double objective = 0.0;
  bool exact = true;
  std::vector<std::string> warnings;
};

/// Builds the problem for a model. Distances are measured from each hinge
/// segment midpoint to the volume center in coordinates normalized to
/// [-1, 1] per axis.
OrderProblem make_order_problem(const std::vector<Hinge> &hinges,
                                const std::vector<Slice> &slices,
                                const Dims &dims, int backbone,
                                const std::vector<PrecedenceTriple> &triples);

/// Throws ValidationError for malformed problems (unknown ids, negative or
/// non-finite weights).
void validate(const OrderProblem &problem);

/// Exact branch and bound for n <= exact_threshold; otherwise a greedy
/// precedence-respecting order that always takes the available hinge with the
/// largest weight (the rearrangement-optimal choice without precedence),
/// flagged `exact = false`. Among optimal orders the lexicographically
/// smallest hinge sequence is returned.
///
/// Throws InfeasibleError when precedence is cyclic or forces a hinge before
/// the backbone.
AssemblyPlan solve_order(const OrderProblem &problem, int exact_threshold = 16);

/// Sum of w[h] * x[h] for a hinge sequence.
double order_objective(const OrderProblem &problem,
                       const std::vector<int> &hinge_order);

/// Slices by first appearance in hinge order (slice_a before slice_b within a
/// hinge). Slices without hinges are appended in id order with a warning.
std::vector<int> derive_slice_order(const AssemblyPlan &plan,
                                    const std::vector<Hinge> &hinges,
                                    const std::vector<Slice> &slices,
                                    std::vector<std::string> *warnings = nullptr);

struct VerificationReport {
  bool bijection_ok = true;       // positions are a permutation of 0..n-1
  std::vector<int> bijection_offenders;
  bool precedence_ok = true;      // triples
  std::vector<PrecedenceTriple> precedence_violations;
  bool backbone_ok = true;        // backbone at position 0
  int backbone_position = -1;
  double objective = 0.0;

  bool passed() const noexcept { return bijection_ok && precedence_ok && backbone_ok; }
  std::string summary() const;
};

VerificationReport verify_plan(const AssemblyPlan &plan,
                               const OrderProblem &problem);

/// CPLEX LP text of the mixed-integer form: objective, the big-M order
/// disjunction per unordered hinge pair, precedence rows and x_backbone = 0.
std::string to_lp(const OrderProblem &problem);

} // namespace sliceforge
