#ifndef LEALBA_ALBA_HPP
#define LEALBA_ALBA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lealba/gentree.hpp"
#include "lealba/syntax.hpp"

namespace lealba {

// ALBA state: the premise set S and the working inequality.
struct System {
  std::vector<Inequality> s;
  Inequality ineq;
  bool operator==(const System&) const = default;
};

std::string print_system(const System& sys);

struct SystemHash {
  std::size_t operator()(const System& sys) const;
};

enum class RuleId : std::uint8_t {
  EliminateMonotone,
  Distribute,
  Split,
  ApproxLPos,
  ApproxLNeg,
  ApproxRPos,
  ApproxRNeg,
  ResiduateF,
  ResiduateG,
  AckermannRight,
  AckermannLeft,
};

std::string rule_name(RuleId r);

struct Position {
  enum class Target : std::uint8_t { Pre, Ineq, SMember, Variable };
  Target target = Target::Ineq;
  int index = -1;          // worklist / S index
  bool lhs = true;         // side, where relevant
  std::vector<int> path;   // child indices into the side formula
  int coordinate = 0;      // residuation coordinate, 1-based
  std::string var;         // Ackermann / monotone elimination
  std::string to_string() const;
};

// One preprocessing step over the worklist of inequalities.
struct PreStep {
  RuleId rule = RuleId::Split;
  Position pos;
  Formula replacement;  // EliminateMonotone only (top or bot)
  std::vector<Inequality> before, after;
};

// One reduction step on a system.
struct TraceStep {
  RuleId rule = RuleId::Split;
  Position pos;
  System before, after;
  std::string fresh;  // (co)nominal introduced by approximation, if any
  bool pivotal = true;
};

// ------------------------------------------------------------------ stage 1

// Monotone-variable elimination, normality distribution, top-level splitting.
std::vector<Inequality> preprocess(const Inequality& ineq, const ExpandedSignature& sig,
                                   std::vector<PreStep>* trace = nullptr);

// ------------------------------------------------------------------ stage 2 rules

// Approximation at the hole reached by `path` into the lhs (L rules) or rhs
// (R rules) of Ineq. Introduces `fresh` and adds the side constraint.
// Preconditions: sign at the hole matches the rule; every proper ancestor on
// the branch is SLR; the extracted subformula is in the base language or is a
// single (co)nominal. When check_pivotal, the hole itself must not be SLR.
System apply_approx(const System& sys, RuleId rule, const std::vector<int>& path,
                    const std::string& fresh, Mode mode, const ExpandedSignature& sig,
                    bool check_pivotal = true);

// Residuation of the S-member at s_index in the given coordinate (1-based).
// ResiduateF needs an f-headed lhs, ResiduateG a g-headed rhs (base heads).
System apply_residuation(const System& sys, RuleId rule, int s_index, int coordinate,
                         const ExpandedSignature& sig);

// Splits s[s_index]: a join on the left or a meet on the right.
System apply_split(const System& sys, int s_index);

// Ackermann elimination of `var`; `right` selects the Right rule (lower
// bounds, eps=1) vs the Left rule (upper bounds, eps=d).
System apply_ackermann(const System& sys, const std::string& var, bool right,
                       const ExpandedSignature& sig);

// Uniform dispatcher used by the engine and by trace replay.
System apply_step(const System& sys, const TraceStep& step, Mode mode, const ExpandedSignature& sig);

// ------------------------------------------------------------------ shape

bool syntactically_closed(const Formula& f, const ExpandedSignature& sig);
bool syntactically_open(const Formula& f, const ExpandedSignature& sig);

struct ShapeEntry {
  int s_index = -1;  // -1: the working inequality
  Inequality ineq;
  bool lhs_closed = false;
  bool rhs_open = false;
};

struct ShapeReport {
  std::vector<ShapeEntry> entries;  // non-pure inequalities only
  bool all_ok() const;
};

ShapeReport shape_check(const System& sys, const ExpandedSignature& sig);

// ------------------------------------------------------------------ runs

enum class Strategy : std::uint8_t { Auto, Guided, Search };
enum class FailureReason : std::uint8_t { None, Stuck, Budget, NoWitness };

struct RunOptions {
  Mode mode = Mode::GeneralLattice;
  Strategy strategy = Strategy::Auto;
  int max_steps = 10000;
  std::optional<std::pair<DependencyOrder, VarOrderType>> witness;
};

struct AlbaResult {
  bool success = false;
  FailureReason failure = FailureReason::None;
  std::string failure_detail;
  std::vector<QuasiInequality> outputs;         // one per purified system
  std::vector<System> stuck;                    // sample of dead ends on failure
  std::vector<PreStep> pre_trace;
  std::vector<Inequality> initial;              // initial Ineq of each system
  std::vector<std::vector<TraceStep>> traces;   // per system
  bool pivotal = false;
  bool canonical_certificate = false;
  std::optional<std::pair<DependencyOrder, VarOrderType>> witness;
};

AlbaResult run(const Inequality& input, const RunOptions& opts, const ExpandedSignature& sig);

// Re-applies a recorded trace and checks every snapshot; throws rule_error on
// divergence. Returns the final state.
std::vector<Inequality> replay_pre(const Inequality& input, const std::vector<PreStep>& steps,
                                   const ExpandedSignature& sig);
System replay_system(const Inequality& initial, const std::vector<TraceStep>& steps, Mode mode,
                     const ExpandedSignature& sig);

// Post-processing of a pure quasi-inequality: discharges premises of the form
// t <= @m / #j <= t against the conclusion by isolating the (co)nominal with
// residuation steps. Returns an Inequality when everything discharges,
// otherwise the input unchanged.
std::variant<QuasiInequality, Inequality> simplify_output(const QuasiInequality& q,
                                                          const ExpandedSignature& sig);

}  // namespace lealba

#endif
