#ifndef LEALBA_ORACLE_HPP
#define LEALBA_ORACLE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lealba/syntax.hpp"

namespace lealba {

// Finite bounded lattice over elements 0..n-1 (canonical order = index order).
class FiniteLattice {
 public:
  // Builds from a set of order pairs; takes the reflexive-transitive closure,
  // checks antisymmetry, boundedness and existence of joins/meets.
  static FiniteLattice from_order(std::vector<std::string> names,
                                  const std::vector<std::pair<std::string, std::string>>& below);

  static FiniteLattice chain(int k);      // 0 < 1 < ... < k-1
  static FiniteLattice diamond4();        // 2x2
  static FiniteLattice pentagon();        // N5
  static FiniteLattice m3();              // three atoms
  static FiniteLattice two_atom5();       // 0 < x,y < a < 1

  int size() const { return n_; }
  const std::string& name(int e) const { return names_[static_cast<std::size_t>(e)]; }
  int index_of(const std::string& name) const;  // -1 when absent
  bool leq(int a, int b) const { return leq_[static_cast<std::size_t>(a * n_ + b)]; }
  int join(int a, int b) const { return join_[static_cast<std::size_t>(a * n_ + b)]; }
  int meet(int a, int b) const { return meet_[static_cast<std::size_t>(a * n_ + b)]; }
  int bot() const { return bot_; }
  int top() const { return top_; }
  const std::vector<int>& join_irreducibles() const { return jirr_; }
  const std::vector<int>& meet_irreducibles() const { return mirr_; }

 private:
  int n_ = 0;
  std::vector<std::string> names_;
  std::vector<char> leq_;
  std::vector<int> join_, meet_;
  int bot_ = 0, top_ = 0;
  std::vector<int> jirr_, mirr_;
};

// Total operation table; cells indexed by the argument tuple in lexicographic
// (row-major) order.
struct OpTable {
  int arity = 0;
  std::vector<int> cells;

  int at(const std::vector<int>& args, int n) const {
    std::size_t idx = 0;
    for (int a : args) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    return cells[idx];
  }
};

// Checks the normality equations of a declared connective against a table.
bool normality_check(const FiniteLattice& lat, const ConnectiveDecl& decl, const OpTable& table);
// Independent route: every unary section preserves arbitrary finite joins
// (meets) of subsets in the coordinate, per the family and order type.
bool normality_check_scan(const FiniteLattice& lat, const ConnectiveDecl& decl, const OpTable& table);

// Finite normal lattice expansion: tables for every base connective; residual
// tables are derived from the adjunctions at construction.
class FiniteLE {
 public:
  static FiniteLE make(FiniteLattice lat, const ExpandedSignature& sig,
                       std::map<std::string, OpTable> base_tables);

  const FiniteLattice& lattice() const { return lat_; }
  const ExpandedSignature& signature() const { return *sig_; }
  const OpTable& table(const std::string& name) const;

 private:
  FiniteLattice lat_;
  const ExpandedSignature* sig_ = nullptr;
  std::map<std::string, OpTable> tables_;
};

struct Assignment {
  std::map<std::string, int> vars;
  std::map<std::string, int> nominals;    // must be join-irreducible elements
  std::map<std::string, int> conominals;  // must be meet-irreducible elements
};

int eval(const Formula& f, const FiniteLE& m, const Assignment& a);

inline constexpr int kMaxBruteForceVars = 6;

// Validity under all assignments of the propositional variables; refuses more
// than kMaxBruteForceVars variables on lattices larger than 5 elements.
bool valid(const Inequality& ineq, const FiniteLE& m);
// Pure quasi-inequality: nominals range over join-irreducibles, co-nominals
// over meet-irreducibles.
bool valid_quasi(const QuasiInequality& q, const FiniteLE& m);
// Quantifies variables, nominals and co-nominals together (used to compare
// systems before/after a rule application).
bool valid_system(const std::vector<Inequality>& premises, const Inequality& conclusion,
                  const FiniteLE& m);

bool check_equivalence(const Inequality& ineq, const std::vector<QuasiInequality>& outputs,
                       const FiniteLE& m);

// Streams normal models over a lattice in deterministic order: per-connective
// normal tables enumerated by backtracking (up to per_connective_cap each),
// combined in mixed-radix order.
class ModelEnumerator {
 public:
  ModelEnumerator(FiniteLattice lat, const ExpandedSignature& sig, int per_connective_cap = 256);
  std::optional<FiniteLE> next();

 private:
  FiniteLattice lat_;
  const ExpandedSignature* sig_;
  std::vector<std::string> names_;
  std::vector<std::vector<OpTable>> tables_;
  std::vector<std::size_t> idx_;
  bool done_ = false;
  bool first_ = true;
};

std::vector<std::pair<std::string, FiniteLattice>> builtin_lattices();

// First `per_lattice` enumerated models on every builtin lattice.
std::vector<std::pair<std::string, FiniteLE>> builtin_suite(const ExpandedSignature& sig,
                                                            int per_lattice = 2);

// Model file, line based:
//   elements: a b c ...
//   leq: a<=b b<=c ...
//   op <name>: <args> = <value>     (one line per cell; every cell required)
FiniteLE parse_model_text(const std::string& text, const ExpandedSignature& sig);
FiniteLE load_model_file(const std::string& path, const ExpandedSignature& sig);

}  // namespace lealba

#endif
