#ifndef LEALBA_SYNTAX_HPP
#define LEALBA_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lealba/signature.hpp"

namespace lealba {

enum class FKind : std::uint8_t { Var, Top, Bot, Meet, Join, App, Nominal, Conominal };

// Immutable term over the base or expanded language. Cheap to copy (shared node).
class Formula {
 public:
  Formula() : Formula(top()) {}

  static Formula var(std::string name);
  static Formula top();
  static Formula bot();
  static Formula meet(Formula a, Formula b);
  static Formula join(Formula a, Formula b);
  static Formula app(std::string name, std::vector<Formula> args);
  static Formula nominal(std::string name);
  static Formula conominal(std::string name);

  FKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& args() const { return node_->args; }
  std::size_t hash() const { return node_->hash; }
  bool is_leaf() const { return node_->args.empty(); }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  struct Node {
    FKind kind;
    std::string name;
    std::vector<Formula> args;
    std::size_t hash;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(FKind k, std::string name, std::vector<Formula> args);
  std::shared_ptr<const Node> node_;
};

struct Inequality {
  Formula lhs, rhs;
  bool operator==(const Inequality& o) const { return lhs == o.lhs && rhs == o.rhs; }
  bool operator!=(const Inequality& o) const { return !(*this == o); }
};

struct QuasiInequality {
  std::vector<Inequality> premises;
  Inequality conclusion;
  bool operator==(const QuasiInequality&) const = default;
};

struct ParseOptions {
  // When false, reject nominals, co-nominals and expanded (residual) connectives.
  bool allow_expanded = true;
};

// Concrete grammar (ASCII): top, bot, /\, \/, prefix name(a1,...,an), #j, @m,
// <=, quasi-inequalities "i1 & i2 => i". Meet binds tighter than join;
// application tightest; /\ and \/ are left-associative.
Formula parse_formula(std::string_view text, const ExpandedSignature& sig, ParseOptions opts = {});
Inequality parse_inequality(std::string_view text, const ExpandedSignature& sig, ParseOptions opts = {});
QuasiInequality parse_quasi(std::string_view text, const ExpandedSignature& sig, ParseOptions opts = {});

std::string print_formula(const Formula& f);
std::string print_inequality(const Inequality& i);
std::string print_quasi(const QuasiInequality& q);  // no premises prints as a bare inequality

bool is_pure(const Formula& f);
bool is_pure(const Inequality& i);
bool is_pure(const QuasiInequality& q);

Formula substitute(const Formula& f, const std::string& var, const Formula& repl);
Inequality substitute(const Inequality& i, const std::string& var, const Formula& repl);

// Signed leaf occurrences of propositional variables in the generation tree of
// f rooted with sign `root`, in preorder. Meet/Join preserve the sign; a
// connective flips the sign at coordinate i iff its order type has d there.
std::vector<std::pair<std::string, Polarity>> occurrences(const Formula& f, Polarity root,
                                                          const ExpandedSignature& sig);

// Term-level polarity: positive in p iff every p-occurrence in +f is positive.
bool positive_in(const Formula& f, const std::string& p, const ExpandedSignature& sig);
bool negative_in(const Formula& f, const std::string& p, const ExpandedSignature& sig);

bool contains_var(const Formula& f, const std::string& p);
bool contains_var(const Inequality& i, const std::string& p);

// Propositional variables in first-occurrence order.
std::vector<std::string> variables_of(const Formula& f);
std::vector<std::string> variables_of(const Inequality& i);

// All nominal and co-nominal names occurring anywhere (first-occurrence order).
std::vector<std::string> nominals_of(const Formula& f);
std::vector<std::string> conominals_of(const Formula& f);

// Validates App arities against the signature; throws signature_error.
void validate(const Formula& f, const ExpandedSignature& sig);

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

}  // namespace lealba

#endif
