#ifndef LEALBA_GENTREE_HPP
#define LEALBA_GENTREE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lealba/syntax.hpp"

namespace lealba {

enum class NodeClass : std::uint8_t { DeltaAdjoint = 1, SRA = 2, SLR = 4, SRR = 8, Leaf = 16 };

// Small set of NodeClass values.
class ClassSet {
 public:
  ClassSet() = default;
  ClassSet(std::initializer_list<NodeClass> cs) {
    for (NodeClass c : cs) bits_ |= static_cast<std::uint8_t>(c);
  }
  bool contains(NodeClass c) const { return bits_ & static_cast<std::uint8_t>(c); }
  bool skeleton_admissible() const { return contains(NodeClass::DeltaAdjoint) || contains(NodeClass::SLR); }
  bool pia_admissible() const { return contains(NodeClass::SRA) || contains(NodeClass::SRR); }
  bool operator==(const ClassSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// Classification of a signed internal node per the Skeleton/PIA tables; the
// distributive table lets +/- meet and join carry two admissible classes.
// Throws rule_error on leaves.
ClassSet classify(Polarity sign, const Formula& node, Mode mode, const ExpandedSignature& sig);

// Signed generation tree, flattened in preorder.
class SignedTree {
 public:
  struct N {
    Formula formula;
    Polarity sign;
    int parent;                 // -1 at root
    std::vector<int> children;  // node ids
  };

  static SignedTree build(const Formula& root, Polarity root_sign, const ExpandedSignature& sig);

  const std::vector<N>& nodes() const { return nodes_; }
  const N& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::vector<int> leaves() const;  // preorder
  // Path of child indices from the root to a node.
  std::vector<int> path_to(int id) const;

 private:
  std::vector<N> nodes_;
};

// Leaf-to-root branch of a variable leaf. `nodes` lists the internal ancestors
// from the leaf's parent up to the root.
struct Branch {
  std::string var;
  Polarity leaf_sign = Polarity::Pos;
  bool in_lhs = true;
  int leaf_id = 0;
  std::vector<int> nodes;
};

enum class BranchQuality : std::uint8_t { Excellent, GoodNotExcellent, NotGood };

// epsilon of Def 3.4: a polarity per variable. Ordered map for determinism.
using VarOrderType = std::map<std::string, Polarity>;

// Strict partial order Omega on variable names, kept transitively closed.
struct DependencyOrder {
  std::set<std::pair<std::string, std::string>> pairs;

  bool less(const std::string& a, const std::string& b) const { return pairs.count({a, b}) > 0; }
  // Transitive closure; nullopt when the constraints are cyclic or reflexive.
  static std::optional<DependencyOrder> closure_of(
      const std::set<std::pair<std::string, std::string>>& constraints);
  std::string to_string() const;  // "p<q,r<s" or "-"
};

// All leaf-to-root branches of variable leaves in (+lhs, -rhs).
std::vector<Branch> all_branches(const Inequality& ineq, const ExpandedSignature& sig,
                                 SignedTree& lhs_tree, SignedTree& rhs_tree);

// Branches from epsilon-critical leaves: +p with eps(p)=1 or -p with eps(p)=d.
std::vector<Branch> critical_branches(const Inequality& ineq, const VarOrderType& eps,
                                      const ExpandedSignature& sig, SignedTree& lhs_tree,
                                      SignedTree& rhs_tree);

BranchQuality branch_quality(const SignedTree& tree, const Branch& branch, Mode mode,
                             const ExpandedSignature& sig);

bool is_inductive(const Inequality& ineq, const DependencyOrder& omega, const VarOrderType& eps,
                  Mode mode, const ExpandedSignature& sig);
bool is_sahlqvist(const Inequality& ineq, const VarOrderType& eps, Mode mode,
                  const ExpandedSignature& sig);

inline constexpr int kMaxSearchVariables = 12;

// Exhaustive order-type search (1 before d, variables in first-occurrence
// order); Omega is the transitive closure of exactly the SRR side-condition
// constraints. Throws rule_error beyond kMaxSearchVariables.
std::optional<std::pair<DependencyOrder, VarOrderType>> find_inductive(const Inequality& ineq,
                                                                       Mode mode,
                                                                       const ExpandedSignature& sig);
std::optional<VarOrderType> find_sahlqvist(const Inequality& ineq, Mode mode,
                                           const ExpandedSignature& sig);

// Projection onto the distributive signature: binary F (1,1) connectives
// become meets, binary G (1,1) connectives become joins; unary connectives
// are kept. Throws rule_error on anything else.
Formula project_pi(const Formula& f, const ExpandedSignature& sig);
Inequality project_pi(const Inequality& i, const ExpandedSignature& sig);

std::string eps_to_string(const VarOrderType& eps, const std::vector<std::string>& order);

}  // namespace lealba

#endif
