#ifndef LEALBA_FOL_HPP
#define LEALBA_FOL_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lealba/syntax.hpp"

namespace lealba {

enum class FOSort : std::uint8_t { X, Y, Z };

struct FOVar {
  FOSort sort = FOSort::X;
  int id = 0;  // unique within a sentence
  bool operator==(const FOVar&) const = default;
};

enum class FOKind : std::uint8_t {
  Rel,      // R_<base>(args) or coordinate-swapped R_<base>^-<i>(args)
  Leq,      // x <= y (X against Y)
  EAtom,    // E(z, z')
  Eq, Neq,  // same-sort equality
  Pred,     // P1_p(x) / P2_p(y) / P_p(z)
  Not, And, Implies,
  Forall, Exists,
};

class FOFormula {
 public:
  FOFormula();

  static FOFormula rel(std::string base, int inv, std::vector<FOVar> args);
  static FOFormula leq(FOVar x, FOVar y);
  static FOFormula eatom(FOVar a, FOVar b);
  static FOFormula eq(FOVar a, FOVar b);
  static FOFormula neq(FOVar a, FOVar b);
  static FOFormula pred(char kind, std::string prop, FOVar v);  // kind: '1','2','P'
  static FOFormula lnot(FOFormula a);
  static FOFormula land(FOFormula a, FOFormula b);
  static FOFormula implies(FOFormula a, FOFormula b);
  static FOFormula forall(FOVar v, FOFormula body);
  static FOFormula exists(FOVar v, FOFormula body);

  FOKind kind() const;
  const std::string& rel_name() const;
  int inv() const;
  char pred_kind() const;
  const std::vector<FOVar>& vars() const;
  const std::vector<FOFormula>& kids() const;
  FOVar binder() const;

 private:
  struct Node;
  explicit FOFormula(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

// Maps nominal / co-nominal names to the individual variables of the sentence.
struct IndividualContext {
  std::map<std::string, FOVar> nominals;
  std::map<std::string, FOVar> conominals;
};

// Fresh-variable source shared across a sentence.
struct FOVarGen {
  int next_id = 0;
  FOVar fresh(FOSort s) { return FOVar{s, next_id++}; }
};

// Two-sorted standard translation over RS structures, one clause pair per
// connective; residual connectives use the parent relation with coordinates
// swapped. Propositional variables translate to P1/P2 predicates.
FOFormula st_x(const Formula& f, FOVar x, const IndividualContext& idx, FOVarGen& gen,
               const ExpandedSignature& sig);
FOFormula st_y(const Formula& f, FOVar y, const IndividualContext& idx, FOVarGen& gen,
               const ExpandedSignature& sig);

// One-sorted translation over TiRS graphs; {dia,box,meet,join,top,bot}
// fragment with nominals and co-nominals. Throws signature_error otherwise.
FOFormula st_plus(const Formula& f, FOVar z, const IndividualContext& idx, FOVarGen& gen,
                  const ExpandedSignature& sig);
FOFormula st_minus(const Formula& f, FOVar z, const IndividualContext& idx, FOVarGen& gen,
                   const ExpandedSignature& sig);

// Frame sentences for pure quasi-inequalities (throws rule_error on impure
// input). The prefix quantifies nominals, then co-nominals, in
// first-occurrence order.
FOFormula translate_quasi_rs(const QuasiInequality& q, const ExpandedSignature& sig);
FOFormula translate_quasi_tirs(const QuasiInequality& q, const ExpandedSignature& sig);

// Deterministic cleanup: pushes negations inward, then contraposition of
// negated implications, drops tautological v=v conjuncts and antecedents, and
// narrows forall over implications when the bound variable is absent from the
// antecedent.
FOFormula simplify_fo(const FOFormula& f);

// Canonical ASCII printing; bound variables are renumbered per sort in binder
// order, so alpha-equivalent sentences print identically.
std::string print_fo(const FOFormula& f);
bool alpha_equal(const FOFormula& a, const FOFormula& b);

// Validates sort discipline of every atom; throws rule_error on violation.
void sort_check(const FOFormula& f, const ExpandedSignature& sig);

}  // namespace lealba

#endif
