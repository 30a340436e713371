#include "sliceforge/order.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

constexpr const char *kStage = "order";

std::string fmt_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

/// Dense view of a problem: local index = rank of the hinge id.
struct Dense {
  std::vector<int> ids;               // local -> id, ascending
  std::map<int, int> local;           // id -> local
  std::vector<double> w;
  std::vector<std::vector<int>> preds; // local -> locals that must come first
  int backbone = 0;
};

Dense densify(const OrderProblem &p) {
  Dense d;
  d.ids = p.hinge_ids;
  std::sort(d.ids.begin(), d.ids.end());
  for (std::size_t i = 0; i < d.ids.size(); ++i)
    d.local[d.ids[i]] = static_cast<int>(i);
  d.w.resize(d.ids.size());
  for (std::size_t i = 0; i < d.ids.size(); ++i)
    d.w[i] = p.w_distance.at(d.ids[i]);
  d.preds.resize(d.ids.size());
  for (const auto &t : p.triples) {
    const int j = d.local.at(t.j);
    for (int succ : {t.i, t.k}) {
      auto &pr = d.preds[d.local.at(succ)];
      if (std::find(pr.begin(), pr.end(), j) == pr.end())
        pr.push_back(j);
    }
  }
  for (auto &pr : d.preds)
    std::sort(pr.begin(), pr.end());
  d.backbone = d.local.at(p.backbone);
  return d;
}

/// Throws InfeasibleError naming a cycle if the precedence graph has one.
void check_acyclic(const Dense &d) {
  const int n = static_cast<int>(d.ids.size());
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (int v = 0; v < n; ++v)
    for (int p : d.preds[v]) {
      succ[p].push_back(v);
      ++indeg[v];
    }
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0)
      queue.push_back(v);
  int seen = 0;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    ++seen;
    for (int s : succ[v])
      if (--indeg[s] == 0)
        queue.push_back(s);
  }
  if (seen == n)
    return;

  // Walk predecessors inside the residual graph until a vertex repeats.
  int start = 0;
  while (indeg[start] == 0)
    ++start;
  std::vector<int> path;
  std::vector<int> where(n, -1);
  int v = start;
  while (where[v] < 0) {
    where[v] = static_cast<int>(path.size());
    path.push_back(v);
    for (int p : d.preds[v])
      if (indeg[p] > 0) {
        v = p;
        break;
      }
  }
  std::ostringstream msg;
  msg << "cyclic precedence among hinges:";
  for (std::size_t i = path.size(); i-- > static_cast<std::size_t>(where[v]);)
    msg << " " << d.ids[path[i]] << " ->";
  msg << " " << d.ids[v];
  throw InfeasibleError(msg.str(), kStage);
}

class BranchAndBound {
public:
  explicit BranchAndBound(const Dense &d) : d_(d), n_(static_cast<int>(d.ids.size())) {
    by_weight_.resize(n_);
    std::iota(by_weight_.begin(), by_weight_.end(), 0);
    std::stable_sort(by_weight_.begin(), by_weight_.end(),
                     [&](int a, int b) { return d_.w[a] > d_.w[b]; });
    pred_mask_.assign(n_, 0);
    for (int v = 0; v < n_; ++v)
      for (int p : d_.preds[v])
        pred_mask_[v] |= 1u << p;
    memo_cost_.assign(std::size_t{1} << n_, std::numeric_limits<double>::infinity());
    memo_prefix_.assign(std::size_t{1} << n_, {});
    double wsum = 0;
    for (double w : d_.w)
      wsum += std::fabs(w);
    eps_ = 1e-12 * (1.0 + wsum * n_);
  }

  std::vector<int> solve() {
    seq_.clear();
    seq_.push_back(d_.backbone);
    search(1u << d_.backbone, 0.0);
    return best_seq_;
  }

private:
  double lower_bound(std::uint32_t placed, double cost) const {
    int pos = static_cast<int>(seq_.size());
    for (int v : by_weight_)
      if (!(placed & (1u << v)))
        cost += d_.w[v] * pos++;
    return cost;
  }

  // -1, 0, 1 comparing the current prefix with the incumbent's prefix.
  int compare_prefix() const {
    for (std::size_t i = 0; i < seq_.size(); ++i) {
      if (seq_[i] != best_seq_[i])
        return seq_[i] < best_seq_[i] ? -1 : 1;
    }
    return 0;
  }

  void search(std::uint32_t placed, double cost) {
    const int depth = static_cast<int>(seq_.size());
    if (depth == n_) {
      if (best_seq_.empty() || cost < best_ - eps_ ||
          (cost <= best_ + eps_ && seq_ < best_seq_)) {
        best_ = cost;
        best_seq_ = seq_;
      }
      return;
    }
    if (!best_seq_.empty()) {
      const double lb = lower_bound(placed, cost);
      if (lb > best_ + eps_)
        return;
      if (lb >= best_ - eps_ && compare_prefix() > 0)
        return;
    }
    // Dominance: same placed set reached before at lower cost, or at equal
    // cost with a lexicographically smaller prefix.
    double &mc = memo_cost_[placed];
    auto &mp = memo_prefix_[placed];
    if (cost > mc + eps_ || (cost >= mc - eps_ && !mp.empty() && mp < seq_))
      return;
    mc = std::min(mc, cost);
    if (cost <= mc + eps_)
      mp = seq_;

    for (int v : by_weight_) {
      if (placed & (1u << v))
        continue;
      if ((pred_mask_[v] & placed) != pred_mask_[v])
        continue;
      seq_.push_back(v);
      search(placed | (1u << v), cost + d_.w[v] * depth);
      seq_.pop_back();
    }
  }

  const Dense &d_;
  int n_;
  std::vector<int> by_weight_;
  std::vector<std::uint32_t> pred_mask_;
  std::vector<double> memo_cost_;
  std::vector<std::vector<int>> memo_prefix_;
  std::vector<int> seq_;
  std::vector<int> best_seq_;
  double best_ = std::numeric_limits<double>::infinity();
  double eps_ = 0;
};

std::vector<int> greedy_order(const Dense &d) {
  const int n = static_cast<int>(d.ids.size());
  std::vector<bool> placed(n, false);
  std::vector<int> seq{d.backbone};
  placed[d.backbone] = true;
  while (static_cast<int>(seq.size()) < n) {
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if (placed[v])
        continue;
      bool ready = true;
      for (int p : d.preds[v])
        ready = ready && placed[p];
      if (ready && (pick < 0 || d.w[v] > d.w[pick]))
        pick = v;
    }
    placed[pick] = true;
    seq.push_back(pick);
  }
  return seq;
}

} // namespace

OrderProblem make_order_problem(const std::vector<Hinge> &hinges,
                                const std::vector<Slice> &slices,
                                const Dims &dims, int backbone,
                                const std::vector<PrecedenceTriple> &triples) {
  OrderProblem p;
  p.backbone = backbone;
  p.triples = triples;
  for (const auto &h : hinges) {
    p.hinge_ids.push_back(h.id);
    const HingeLine line = hinge_line(h, slices);
    double sq = 0;
    for (int a = 0; a < 3; ++a) {
      const double coord = a == index(line.axis) ? 0.5 * (line.lo + line.hi)
                                                 : line.fixed[a];
      const double extent = dims[axis_from_index(a)];
      const double normalized = 2.0 * coord / extent - 1.0;
      sq += normalized * normalized;
    }
    p.w_distance[h.id] = std::sqrt(sq);
  }
  p.big_m = static_cast<int>(p.hinge_ids.size()) + 1;
  return p;
}

void validate(const OrderProblem &p) {
  if (p.hinge_ids.empty())
    throw ValidationError("order problem has no hinges", kStage);
  std::set<int> ids(p.hinge_ids.begin(), p.hinge_ids.end());
  if (ids.size() != p.hinge_ids.size())
    throw ValidationError("duplicate hinge ids in order problem", kStage);
  if (!ids.count(p.backbone))
    throw ValidationError("backbone hinge " + std::to_string(p.backbone) +
                              " is not in the hinge set",
                          kStage);
  for (int id : p.hinge_ids) {
    auto it = p.w_distance.find(id);
    if (it == p.w_distance.end())
      throw ValidationError("missing w_distance for hinge " + std::to_string(id),
                            kStage);
    if (!std::isfinite(it->second) || it->second < 0)
      throw ValidationError("w_distance of hinge " + std::to_string(id) +
                                " must be finite and >= 0",
                            kStage);
  }
  for (const auto &t : p.triples)
    for (int id : {t.i, t.j, t.k})
      if (!ids.count(id))
        throw ValidationError("triple references unknown hinge " +
                                  std::to_string(id),
                              kStage);
}

double order_objective(const OrderProblem &problem,
                       const std::vector<int> &hinge_order) {
  double obj = 0;
  for (std::size_t pos = 0; pos < hinge_order.size(); ++pos)
    obj += problem.w_distance.at(hinge_order[pos]) * static_cast<double>(pos);
  return obj;
}

AssemblyPlan solve_order(const OrderProblem &problem, int exact_threshold) {
  validate(problem);
  const Dense d = densify(problem);
  check_acyclic(d);
  if (!d.preds[d.backbone].empty()) {
    std::ostringstream msg;
    msg << "backbone hinge " << problem.backbone
        << " must follow cut-through hinge " << d.ids[d.preds[d.backbone].front()]
        << ", but it is forced to position 0";
    throw InfeasibleError(msg.str(), kStage);
  }

  const int n = static_cast<int>(d.ids.size());
  const bool exact = n <= std::min(exact_threshold, 31);
  std::vector<int> local = exact ? BranchAndBound(d).solve() : greedy_order(d);

  AssemblyPlan plan;
  plan.exact = exact;
  for (std::size_t pos = 0; pos < local.size(); ++pos) {
    const int id = d.ids[local[pos]];
    plan.hinge_order.push_back(id);
    plan.position[id] = static_cast<int>(pos);
  }
  plan.objective = order_objective(problem, plan.hinge_order);
  if (!exact)
    plan.warnings.push_back("hinge count " + std::to_string(n) +
                            " exceeds the exact threshold; order is heuristic");
  return plan;
}

std::vector<int> derive_slice_order(const AssemblyPlan &plan,
                                    const std::vector<Hinge> &hinges,
                                    const std::vector<Slice> &slices,
                                    std::vector<std::string> *warnings) {
  std::map<int, const Hinge *> by_id;
  for (const auto &h : hinges)
    by_id[h.id] = &h;
  std::vector<int> order;
  std::set<int> seen;
  for (int hid : plan.hinge_order) {
    const Hinge *h = by_id.at(hid);
    for (int s : {h->slice_a, h->slice_b})
      if (seen.insert(s).second)
        order.push_back(s);
  }
  for (const auto &s : slices) {
    if (seen.insert(s.id).second) {
      order.push_back(s.id);
      if (warnings)
        warnings->push_back("slice " + std::to_string(s.id) +
                            " has no hinge (free-floating); placed last");
    }
  }
  return order;
}

std::string VerificationReport::summary() const {
  std::ostringstream out;
  out << "bijection: " << (bijection_ok ? "pass" : "FAIL");
  if (!bijection_ok) {
    out << " (hinges:";
    for (int h : bijection_offenders)
      out << " " << h;
    out << ")";
  }
  out << "; precedence: " << (precedence_ok ? "pass" : "FAIL");
  if (!precedence_ok) {
    out << " (triples:";
    for (const auto &t : precedence_violations)
      out << " (" << t.i << "," << t.j << "," << t.k << ")";
    out << ")";
  }
  out << "; backbone: " << (backbone_ok ? "pass" : "FAIL");
  if (!backbone_ok)
    out << " (position " << backbone_position << ")";
  out << "; objective " << fmt_weight(objective);
  return out.str();
}

VerificationReport verify_plan(const AssemblyPlan &plan,
                               const OrderProblem &problem) {
  VerificationReport r;
  const int n = static_cast<int>(problem.hinge_ids.size());
  std::map<int, int> pos;
  std::vector<int> slot_owner(n, -1);
  std::set<int> offenders;
  for (std::size_t p = 0; p < plan.hinge_order.size(); ++p) {
    const int id = plan.hinge_order[p];
    if (pos.count(id))
      offenders.insert(id);
    pos[id] = static_cast<int>(p);
  }
  for (int id : problem.hinge_ids)
    if (!pos.count(id))
      offenders.insert(id);
  for (const auto &[id, p] : pos) {
    if (std::find(problem.hinge_ids.begin(), problem.hinge_ids.end(), id) ==
        problem.hinge_ids.end())
      offenders.insert(id);
    if (p >= n)
      offenders.insert(id);
  }
  if (static_cast<int>(plan.hinge_order.size()) != n && offenders.empty())
    offenders.insert(-1);
  r.bijection_ok = offenders.empty();
  r.bijection_offenders.assign(offenders.begin(), offenders.end());

  for (const auto &t : problem.triples) {
    auto get = [&](int id) {
      auto it = pos.find(id);
      return it == pos.end() ? -1 : it->second;
    };
    const int xi = get(t.i), xj = get(t.j), xk = get(t.k);
    if (xi < 0 || xj < 0 || xk < 0 || !(xj < xi) || !(xj < xk)) {
      r.precedence_ok = false;
      r.precedence_violations.push_back(t);
    }
  }

  auto bb = pos.find(problem.backbone);
  r.backbone_position = bb == pos.end() ? -1 : bb->second;
  r.backbone_ok = r.backbone_position == 0;

  double obj = 0;
  for (const auto &[id, p] : pos) {
    auto w = problem.w_distance.find(id);
    if (w != problem.w_distance.end())
      obj += w->second * p;
  }
  r.objective = obj;
  return r;
}

std::string to_lp(const OrderProblem &problem) {
  std::vector<int> ids = problem.hinge_ids;
  std::sort(ids.begin(), ids.end());
  const int n = static_cast<int>(ids.size());
  const int m = problem.big_m;
  std::ostringstream lp;
  lp << "\\ Hinge assembly order: " << n << " hinges, M = " << m << "\n";
  lp << "Minimize\n obj:";
  bool first = true;
  for (int id : ids) {
    lp << (first ? " " : " + ") << fmt_weight(problem.w_distance.at(id)) << " x"
       << id;
    first = false;
  }
  lp << "\nSubject To\n";
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const int i = ids[a], j = ids[b];
      lp << " o1a_" << i << "_" << j << ": x" << i << " - x" << j << " - " << m
         << " a" << i << "_" << j << " <= -1\n";
      lp << " o1b_" << i << "_" << j << ": x" << j << " - x" << i << " + " << m
         << " a" << i << "_" << j << " <= " << m - 1 << "\n";
    }
  for (std::size_t t = 0; t < problem.triples.size(); ++t) {
    const auto &tr = problem.triples[t];
    lp << " o2a_" << t << ": x" << tr.j << " - x" << tr.i << " <= -1\n";
    lp << " o2b_" << t << ": x" << tr.j << " - x" << tr.k << " <= -1\n";
  }
  lp << " o3: x" << problem.backbone << " = 0\n";
  lp << "Bounds\n";
  for (int id : ids)
    lp << " 0 <= x" << id << " <= " << n - 1 << "\n";
  lp << "Generals\n";
  for (int id : ids)
    lp << " x" << id << "\n";
  lp << "Binaries\n";
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      lp << " a" << ids[a] << "_" << ids[b] << "\n";
  lp << "End\n";
  return lp.str();
}

} // namespace sliceforge
