#include "lealba/gentree.hpp"

#include <algorithm>

#include "lealba/errors.hpp"

namespace lealba {

ClassSet classify(Polarity sign, const Formula& node, Mode mode, const ExpandedSignature& sig) {
  bool pos = sign == Polarity::Pos;
  switch (node.kind()) {
    case FKind::Meet:
      if (mode == Mode::Distributive) return pos ? ClassSet{NodeClass::SRA, NodeClass::SLR}
                                                 : ClassSet{NodeClass::DeltaAdjoint, NodeClass::SRR};
      return pos ? ClassSet{NodeClass::SRA} : ClassSet{NodeClass::DeltaAdjoint};
    case FKind::Join:
      if (mode == Mode::Distributive) return pos ? ClassSet{NodeClass::DeltaAdjoint, NodeClass::SRR}
                                                 : ClassSet{NodeClass::SRA, NodeClass::SLR};
      return pos ? ClassSet{NodeClass::DeltaAdjoint} : ClassSet{NodeClass::SRA};
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(node.name());
      if (d.arity == 0) throw rule_error("cannot classify nullary connective '" + node.name() + "'");
      bool is_f = d.family == Family::F;
      if ((is_f && pos) || (!is_f && !pos)) return ClassSet{NodeClass::SLR};
      return d.arity == 1 ? ClassSet{NodeClass::SRA} : ClassSet{NodeClass::SRR};
    }
    default:
      throw rule_error("cannot classify a leaf node");
  }
}

SignedTree SignedTree::build(const Formula& root, Polarity root_sign, const ExpandedSignature& sig) {
  SignedTree t;
  struct Item {
    Formula f;
    Polarity sign;
    int parent;
  };
  std::vector<Item> stack{{root, root_sign, -1}};
  // Preorder with explicit stack; children pushed in reverse to keep order.
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    int id = static_cast<int>(t.nodes_.size());
    t.nodes_.push_back(N{it.f, it.sign, it.parent, {}});
    if (it.parent >= 0) t.nodes_[static_cast<std::size_t>(it.parent)].children.push_back(id);
    const Formula& f = t.nodes_.back().formula;
    if (f.kind() == FKind::Meet || f.kind() == FKind::Join) {
      stack.push_back({f.args()[1], it.sign, id});
      stack.push_back({f.args()[0], it.sign, id});
    } else if (f.kind() == FKind::App && !f.args().empty()) {
      const ConnectiveDecl& d = sig.at(f.name());
      for (std::size_t i = f.args().size(); i-- > 0;) {
        Polarity child = d.order_type.at(i) == Polarity::Pos ? it.sign : opposite(it.sign);
        stack.push_back({f.args()[i], child, id});
      }
    }
  }
  // Children were appended in pop order; restore left-to-right order.
  for (N& n : t.nodes_) std::sort(n.children.begin(), n.children.end());
  return t;
}

std::vector<int> SignedTree::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].children.empty()) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> SignedTree::path_to(int id) const {
  std::vector<int> rev;
  int cur = id;
  while (true) {
    int parent = nodes_[static_cast<std::size_t>(cur)].parent;
    if (parent < 0) break;
    const auto& siblings = nodes_[static_cast<std::size_t>(parent)].children;
    for (std::size_t i = 0; i < siblings.size(); ++i)
      if (siblings[i] == cur) {
        rev.push_back(static_cast<int>(i));
        break;
      }
    cur = parent;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::optional<DependencyOrder> DependencyOrder::closure_of(
    const std::set<std::pair<std::string, std::string>>& constraints) {
  DependencyOrder out;
  out.pairs = constraints;
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<std::pair<std::string, std::string>> extra;
    for (const auto& [a, b] : out.pairs)
      for (const auto& [c, d] : out.pairs)
        if (b == c && !out.pairs.count({a, d})) extra.emplace(a, d);
    if (!extra.empty()) {
      out.pairs.insert(extra.begin(), extra.end());
      changed = true;
    }
  }
  for (const auto& [a, b] : out.pairs)
    if (a == b) return std::nullopt;
  return out;
}

std::string DependencyOrder::to_string() const {
  if (pairs.empty()) return "-";
  std::string s;
  for (const auto& [a, b] : pairs) {
    if (!s.empty()) s += ',';
    s += a + "<" + b;
  }
  return s;
}

namespace {

void branches_of_tree(const SignedTree& tree, bool in_lhs, std::vector<Branch>& out) {
  for (int leaf : tree.leaves()) {
    const SignedTree::N& n = tree.node(leaf);
    if (n.formula.kind() != FKind::Var) continue;
    Branch b;
    b.var = n.formula.name();
    b.leaf_sign = n.sign;
    b.in_lhs = in_lhs;
    b.leaf_id = leaf;
    for (int cur = n.parent; cur >= 0; cur = tree.node(cur).parent) b.nodes.push_back(cur);
    out.push_back(std::move(b));
  }
}

bool is_critical(const Branch& b, const VarOrderType& eps) {
  auto it = eps.find(b.var);
  if (it == eps.end()) return false;
  return (b.leaf_sign == Polarity::Pos && it->second == Polarity::Pos) ||
         (b.leaf_sign == Polarity::Neg && it->second == Polarity::Neg);
}

// Index of the first node (counting from the leaf) of the shortest all-
// Skeleton-admissible suffix of the branch.
std::size_t minimal_split(const SignedTree& tree, const Branch& b, Mode mode,
                          const ExpandedSignature& sig) {
  std::size_t k = 0;
  for (std::size_t i = b.nodes.size(); i-- > 0;) {
    ClassSet cs = classify(tree.node(b.nodes[i]).sign, tree.node(b.nodes[i]).formula, mode, sig);
    if (!cs.skeleton_admissible()) {
      k = i + 1;
      break;
    }
  }
  return k;
}

// A signed subtree agrees with eps^d when every variable leaf in it is
// eps^d-critical; top/bot leaves are exempt.
bool agrees_with_eps_opposite(const SignedTree& tree, int root_id, const VarOrderType& eps) {
  std::vector<int> stack{root_id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const SignedTree::N& n = tree.node(id);
    if (n.formula.kind() == FKind::Var) {
      auto it = eps.find(n.formula.name());
      Polarity e = it == eps.end() ? Polarity::Pos : it->second;
      // eps^d-critical: +p with eps(p)=d, or -p with eps(p)=1.
      bool crit = (n.sign == Polarity::Pos && e == Polarity::Neg) ||
                  (n.sign == Polarity::Neg && e == Polarity::Pos);
      if (!crit) return false;
    }
    for (int c : n.children) stack.push_back(c);
  }
  return true;
}

void vars_below(const SignedTree& tree, int root_id, std::vector<std::string>& out) {
  std::vector<int> stack{root_id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const SignedTree::N& n = tree.node(id);
    if (n.formula.kind() == FKind::Var) out.push_back(n.formula.name());
    for (int c : n.children) stack.push_back(c);
  }
}

struct BranchCheck {
  bool good = false;
  bool excellent = false;
  // Constraints (x < leaf-var) required by SRR nodes in the PIA segment;
  // meaningful only when good.
  std::set<std::pair<std::string, std::string>> omega_constraints;
  bool srr_conditions_ok = true;  // condition (a) on every PIA-segment SRR node
};

BranchCheck check_branch(const SignedTree& tree, const Branch& b, Mode mode, const VarOrderType& eps,
                         const ExpandedSignature& sig) {
  BranchCheck out;
  std::size_t k = minimal_split(tree, b, mode, sig);
  out.good = true;
  out.excellent = true;
  int below = b.leaf_id;
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    int id = b.nodes[i];
    const SignedTree::N& n = tree.node(id);
    if (i < k) {
      ClassSet cs = classify(n.sign, n.formula, mode, sig);
      if (!cs.pia_admissible()) {
        out.good = false;
        out.excellent = false;
        break;
      }
      if (!cs.contains(NodeClass::SRA)) out.excellent = false;
      if (cs.contains(NodeClass::SRR)) {
        // Side conditions on the children other than the one the branch follows.
        for (int child : n.children) {
          if (child == below) continue;
          if (!agrees_with_eps_opposite(tree, child, eps)) out.srr_conditions_ok = false;
          std::vector<std::string> vs;
          vars_below(tree, child, vs);
          for (const std::string& v : vs) out.omega_constraints.emplace(v, b.var);
        }
      }
    }
    below = id;
  }
  return out;
}

std::vector<std::string> eps_domain(const Inequality& ineq) { return variables_of(ineq); }

}  // namespace

std::vector<Branch> all_branches(const Inequality& ineq, const ExpandedSignature& sig,
                                 SignedTree& lhs_tree, SignedTree& rhs_tree) {
  lhs_tree = SignedTree::build(ineq.lhs, Polarity::Pos, sig);
  rhs_tree = SignedTree::build(ineq.rhs, Polarity::Neg, sig);
  std::vector<Branch> out;
  branches_of_tree(lhs_tree, true, out);
  branches_of_tree(rhs_tree, false, out);
  return out;
}

std::vector<Branch> critical_branches(const Inequality& ineq, const VarOrderType& eps,
                                      const ExpandedSignature& sig, SignedTree& lhs_tree,
                                      SignedTree& rhs_tree) {
  std::vector<Branch> out;
  for (Branch& b : all_branches(ineq, sig, lhs_tree, rhs_tree))
    if (is_critical(b, eps)) out.push_back(std::move(b));
  return out;
}

BranchQuality branch_quality(const SignedTree& tree, const Branch& branch, Mode mode,
                             const ExpandedSignature& sig) {
  BranchCheck c = check_branch(tree, branch, mode, {}, sig);
  if (!c.good) return BranchQuality::NotGood;
  return c.excellent ? BranchQuality::Excellent : BranchQuality::GoodNotExcellent;
}

bool is_inductive(const Inequality& ineq, const DependencyOrder& omega, const VarOrderType& eps,
                  Mode mode, const ExpandedSignature& sig) {
  SignedTree lt, rt;
  for (const Branch& b : critical_branches(ineq, eps, sig, lt, rt)) {
    const SignedTree& tree = b.in_lhs ? lt : rt;
    BranchCheck c = check_branch(tree, b, mode, eps, sig);
    if (!c.good || !c.srr_conditions_ok) return false;
    for (const auto& [a, v] : c.omega_constraints)
      if (!omega.less(a, v)) return false;
  }
  return true;
}

bool is_sahlqvist(const Inequality& ineq, const VarOrderType& eps, Mode mode,
                  const ExpandedSignature& sig) {
  SignedTree lt, rt;
  for (const Branch& b : critical_branches(ineq, eps, sig, lt, rt)) {
    const SignedTree& tree = b.in_lhs ? lt : rt;
    if (branch_quality(tree, b, mode, sig) != BranchQuality::Excellent) return false;
  }
  return true;
}

namespace {

template <typename Fn>
void enumerate_eps(const std::vector<std::string>& vars, Fn&& fn) {
  std::size_t n = vars.size();
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    VarOrderType eps;
    for (std::size_t i = 0; i < n; ++i)
      eps[vars[i]] = (mask >> (n - 1 - i)) & 1 ? Polarity::Neg : Polarity::Pos;
    if (fn(eps)) return;
  }
}

}  // namespace

std::optional<std::pair<DependencyOrder, VarOrderType>> find_inductive(const Inequality& ineq,
                                                                       Mode mode,
                                                                       const ExpandedSignature& sig) {
  std::vector<std::string> vars = eps_domain(ineq);
  if (vars.size() > kMaxSearchVariables)
    throw rule_error("too many variables for order-type search");
  std::optional<std::pair<DependencyOrder, VarOrderType>> result;
  enumerate_eps(vars, [&](const VarOrderType& eps) {
    SignedTree lt, rt;
    std::set<std::pair<std::string, std::string>> constraints;
    for (const Branch& b : critical_branches(ineq, eps, sig, lt, rt)) {
      const SignedTree& tree = b.in_lhs ? lt : rt;
      BranchCheck c = check_branch(tree, b, mode, eps, sig);
      if (!c.good || !c.srr_conditions_ok) return false;
      constraints.insert(c.omega_constraints.begin(), c.omega_constraints.end());
    }
    auto omega = DependencyOrder::closure_of(constraints);
    if (!omega) return false;
    result = {std::move(*omega), eps};
    return true;
  });
  return result;
}

std::optional<VarOrderType> find_sahlqvist(const Inequality& ineq, Mode mode,
                                           const ExpandedSignature& sig) {
  std::vector<std::string> vars = eps_domain(ineq);
  if (vars.size() > kMaxSearchVariables)
    throw rule_error("too many variables for order-type search");
  std::optional<VarOrderType> result;
  enumerate_eps(vars, [&](const VarOrderType& eps) {
    if (!is_sahlqvist(ineq, eps, mode, sig)) return false;
    result = eps;
    return true;
  });
  return result;
}

Formula project_pi(const Formula& f, const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Meet:
      return Formula::meet(project_pi(f.args()[0], sig), project_pi(f.args()[1], sig));
    case FKind::Join:
      return Formula::join(project_pi(f.args()[0], sig), project_pi(f.args()[1], sig));
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(f.name());
      if (d.arity == 2 && d.order_type == OrderType({Polarity::Pos, Polarity::Pos})) {
        Formula a = project_pi(f.args()[0], sig);
        Formula b = project_pi(f.args()[1], sig);
        return d.family == Family::F ? Formula::meet(std::move(a), std::move(b))
                                     : Formula::join(std::move(a), std::move(b));
      }
      if (d.arity == 1) {
        std::vector<Formula> args{project_pi(f.args()[0], sig)};
        return Formula::app(f.name(), std::move(args));
      }
      throw rule_error("connective '" + f.name() + "' has no distributive projection");
    }
    default:
      return f;
  }
}

Inequality project_pi(const Inequality& i, const ExpandedSignature& sig) {
  return Inequality{project_pi(i.lhs, sig), project_pi(i.rhs, sig)};
}

std::string eps_to_string(const VarOrderType& eps, const std::vector<std::string>& order) {
  std::string s;
  for (const std::string& v : order) {
    auto it = eps.find(v);
    if (it == eps.end()) continue;
    if (!s.empty()) s += ',';
    s += v + ":" + polarity_char(it->second);
  }
  return s;
}

}  // namespace lealba
