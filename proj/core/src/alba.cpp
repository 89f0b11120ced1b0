#include "lealba/alba.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include "lealba/errors.hpp"

namespace lealba {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string print_system(const System& sys) {
  std::string out = "S={";
  for (std::size_t i = 0; i < sys.s.size(); ++i) {
    if (i) out += "; ";
    out += print_inequality(sys.s[i]);
  }
  out += "} | Ineq=";
  out += print_inequality(sys.ineq);
  return out;
}

std::size_t SystemHash::operator()(const System& sys) const {
  std::size_t h = hash_combine(sys.ineq.lhs.hash(), sys.ineq.rhs.hash());
  for (const Inequality& i : sys.s) h = hash_combine(h, hash_combine(i.lhs.hash(), i.rhs.hash()));
  return h;
}

std::string rule_name(RuleId r) {
  switch (r) {
    case RuleId::EliminateMonotone: return "EliminateMonotone";
    case RuleId::Distribute: return "Distribute";
    case RuleId::Split: return "Split";
    case RuleId::ApproxLPos: return "ApproxLPos";
    case RuleId::ApproxLNeg: return "ApproxLNeg";
    case RuleId::ApproxRPos: return "ApproxRPos";
    case RuleId::ApproxRNeg: return "ApproxRNeg";
    case RuleId::ResiduateF: return "ResiduateF";
    case RuleId::ResiduateG: return "ResiduateG";
    case RuleId::AckermannRight: return "AckermannRight";
    case RuleId::AckermannLeft: return "AckermannLeft";
  }
  return "?";
}

std::string Position::to_string() const {
  std::string out;
  switch (target) {
    case Target::Pre: out = "pre[" + std::to_string(index) + "]"; break;
    case Target::Ineq: out = "ineq"; break;
    case Target::SMember: out = "s[" + std::to_string(index) + "]"; break;
    case Target::Variable: return "var:" + var;
  }
  if (target != Target::SMember) out += lhs ? ".lhs" : ".rhs";
  for (int i : path) out += "." + std::to_string(i);
  if (coordinate > 0) out += "@" + std::to_string(coordinate);
  if (!var.empty() && target == Target::Pre) out += ":" + var;
  return out;
}

// ------------------------------------------------------------------ helpers

namespace {

const Formula& subformula_at(const Formula& root, const std::vector<int>& path) {
  const Formula* cur = &root;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->args().size())
      throw rule_error("bad path into formula");
    cur = &cur->args()[static_cast<std::size_t>(i)];
  }
  return *cur;
}

Formula replace_at(const Formula& root, const std::vector<int>& path, std::size_t depth,
                   const Formula& repl) {
  if (depth == path.size()) return repl;
  int idx = path[depth];
  std::vector<Formula> args = root.args();
  if (idx < 0 || static_cast<std::size_t>(idx) >= args.size())
    throw rule_error("bad path into formula");
  args[static_cast<std::size_t>(idx)] = replace_at(args[static_cast<std::size_t>(idx)], path, depth + 1, repl);
  switch (root.kind()) {
    case FKind::Meet: return Formula::meet(args[0], args[1]);
    case FKind::Join: return Formula::join(args[0], args[1]);
    case FKind::App: return Formula::app(root.name(), std::move(args));
    default: throw rule_error("bad path into formula");
  }
}

Polarity sign_at(const Formula& root, Polarity root_sign, const std::vector<int>& path,
                 const ExpandedSignature& sig) {
  const Formula* cur = &root;
  Polarity s = root_sign;
  for (int i : path) {
    if (cur->kind() == FKind::App) {
      const ConnectiveDecl& d = sig.at(cur->name());
      if (d.order_type.at(static_cast<std::size_t>(i)) == Polarity::Neg) s = opposite(s);
    }
    cur = &cur->args()[static_cast<std::size_t>(i)];
  }
  return s;
}

bool slr_classifiable(Polarity sign, const Formula& f, Mode mode, const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Meet:
    case FKind::Join:
      break;
    case FKind::App:
      if (f.args().empty()) return false;
      break;
    default:
      return false;
  }
  return classify(sign, f, mode, sig).contains(NodeClass::SLR);
}

bool base_language(const Formula& f, const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Nominal:
    case FKind::Conominal:
      return false;
    case FKind::App:
      if (!sig.at(f.name()).is_base()) return false;
      break;
    default:
      break;
  }
  for (const Formula& a : f.args())
    if (!base_language(a, sig)) return false;
  return true;
}

}  // namespace

// ------------------------------------------------------------------ stage 1

namespace {

// One distribution/absorption rewrite at the first applicable node in
// preorder. Applies at f-nodes of positive sign and g-nodes of negative sign.
// Returns the rewritten node's replacement via out parameters.
bool find_distribution(const Formula& f, Polarity sign, const ExpandedSignature& sig,
                       std::vector<int>& path, Formula& replacement) {
  if (f.kind() == FKind::App && !f.args().empty()) {
    const ConnectiveDecl& d = sig.at(f.name());
    bool active = (d.family == Family::F && sign == Polarity::Pos) ||
                  (d.family == Family::G && sign == Polarity::Neg);
    if (active) {
      bool is_f = d.family == Family::F;
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        const Formula& child = f.args()[i];
        Polarity ei = d.order_type.at(i);
        FKind split_kind, unit_kind;
        if (is_f) {
          split_kind = ei == Polarity::Pos ? FKind::Join : FKind::Meet;
          unit_kind = ei == Polarity::Pos ? FKind::Bot : FKind::Top;
        } else {
          split_kind = ei == Polarity::Pos ? FKind::Meet : FKind::Join;
          unit_kind = ei == Polarity::Pos ? FKind::Top : FKind::Bot;
        }
        if (child.kind() == split_kind) {
          std::vector<Formula> a1 = f.args(), a2 = f.args();
          a1[i] = child.args()[0];
          a2[i] = child.args()[1];
          Formula l = Formula::app(f.name(), std::move(a1));
          Formula r = Formula::app(f.name(), std::move(a2));
          replacement = is_f ? Formula::join(std::move(l), std::move(r))
                             : Formula::meet(std::move(l), std::move(r));
          return true;
        }
        if (child.kind() == unit_kind) {
          replacement = is_f ? Formula::bot() : Formula::top();
          return true;
        }
      }
    }
  }
  if (f.kind() == FKind::Meet || f.kind() == FKind::Join) {
    for (std::size_t i = 0; i < 2; ++i) {
      path.push_back(static_cast<int>(i));
      if (find_distribution(f.args()[i], sign, sig, path, replacement)) return true;
      path.pop_back();
    }
  } else if (f.kind() == FKind::App) {
    const ConnectiveDecl& d = sig.at(f.name());
    for (std::size_t i = 0; i < f.args().size(); ++i) {
      Polarity child = d.order_type.at(i) == Polarity::Pos ? sign : opposite(sign);
      path.push_back(static_cast<int>(i));
      if (find_distribution(f.args()[i], child, sig, path, replacement)) return true;
      path.pop_back();
    }
  }
  return false;
}

void record_pre(std::vector<PreStep>* trace, RuleId rule, Position pos, Formula repl,
                const std::vector<Inequality>& before, const std::vector<Inequality>& after) {
  if (!trace) return;
  trace->push_back(PreStep{rule, std::move(pos), std::move(repl), before, after});
}

}  // namespace

std::vector<Inequality> preprocess(const Inequality& ineq, const ExpandedSignature& sig,
                                   std::vector<PreStep>* trace) {
  std::vector<Inequality> work{ineq};

  // 1. Eliminate variables uniform in (+lhs, -rhs), to fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < work.size() && !changed; ++k) {
      auto occ_l = occurrences(work[k].lhs, Polarity::Pos, sig);
      auto occ_r = occurrences(work[k].rhs, Polarity::Neg, sig);
      for (const std::string& v : variables_of(work[k])) {
        bool all_pos = true, all_neg = true;
        for (const auto& [name, s] : occ_l)
          if (name == v) (s == Polarity::Pos ? all_neg : all_pos) = false;
        for (const auto& [name, s] : occ_r)
          if (name == v) (s == Polarity::Pos ? all_neg : all_pos) = false;
        if (!all_pos && !all_neg) continue;
        Formula repl = all_pos ? Formula::top() : Formula::bot();
        auto before = work;
        work[k] = substitute(work[k], v, repl);
        Position pos;
        pos.target = Position::Target::Pre;
        pos.index = static_cast<int>(k);
        pos.var = v;
        record_pre(trace, RuleId::EliminateMonotone, std::move(pos), repl, before, work);
        changed = true;
        break;
      }
    }
  }

  // 2. Normality rewrites: distribute f over surfacing joins / g over meets,
  //    with bottom/top absorption, exhaustively.
  changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < work.size() && !changed; ++k) {
      for (int side = 0; side < 2 && !changed; ++side) {
        bool lhs = side == 0;
        const Formula& root = lhs ? work[k].lhs : work[k].rhs;
        std::vector<int> path;
        Formula repl;
        if (!find_distribution(root, lhs ? Polarity::Pos : Polarity::Neg, sig, path, repl)) continue;
        auto before = work;
        Formula new_side = replace_at(root, path, 0, repl);
        if (lhs)
          work[k].lhs = new_side;
        else
          work[k].rhs = new_side;
        Position pos;
        pos.target = Position::Target::Pre;
        pos.index = static_cast<int>(k);
        pos.lhs = lhs;
        pos.path = path;
        record_pre(trace, RuleId::Distribute, std::move(pos), {}, before, work);
        changed = true;
      }
    }
  }

  // 3. Top-level splitting, exhaustively.
  changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < work.size(); ++k) {
      bool lhs_join = work[k].lhs.kind() == FKind::Join;
      bool rhs_meet = work[k].rhs.kind() == FKind::Meet;
      if (!lhs_join && !rhs_meet) continue;
      auto before = work;
      Inequality cur = work[k];
      std::vector<Inequality> two;
      if (lhs_join) {
        two = {Inequality{cur.lhs.args()[0], cur.rhs}, Inequality{cur.lhs.args()[1], cur.rhs}};
      } else {
        two = {Inequality{cur.lhs, cur.rhs.args()[0]}, Inequality{cur.lhs, cur.rhs.args()[1]}};
      }
      work.erase(work.begin() + static_cast<std::ptrdiff_t>(k));
      work.insert(work.begin() + static_cast<std::ptrdiff_t>(k), two.begin(), two.end());
      Position pos;
      pos.target = Position::Target::Pre;
      pos.index = static_cast<int>(k);
      pos.lhs = lhs_join;
      record_pre(trace, RuleId::Split, std::move(pos), {}, before, work);
      changed = true;
      break;
    }
  }
  return work;
}

// ------------------------------------------------------------------ stage 2 rules

System apply_approx(const System& sys, RuleId rule, const std::vector<int>& path,
                    const std::string& fresh, Mode mode, const ExpandedSignature& sig,
                    bool check_pivotal) {
  bool on_lhs = rule == RuleId::ApproxLPos || rule == RuleId::ApproxLNeg;
  bool positive_hole = rule == RuleId::ApproxLPos || rule == RuleId::ApproxRPos;
  if (!on_lhs && rule != RuleId::ApproxRPos && rule != RuleId::ApproxRNeg)
    throw rule_error("not an approximation rule");
  const Formula& side = on_lhs ? sys.ineq.lhs : sys.ineq.rhs;
  Polarity root_sign = on_lhs ? Polarity::Pos : Polarity::Neg;

  // Every proper ancestor of the hole must be SLR.
  const Formula* cur = &side;
  Polarity s = root_sign;
  for (int idx : path) {
    if (!slr_classifiable(s, *cur, mode, sig))
      throw rule_error("approximation branch is not SLR at " + print_formula(*cur));
    if (cur->kind() == FKind::App) {
      const ConnectiveDecl& d = sig.at(cur->name());
      if (d.order_type.at(static_cast<std::size_t>(idx)) == Polarity::Neg) s = opposite(s);
    }
    if (static_cast<std::size_t>(idx) >= cur->args().size()) throw rule_error("bad approximation path");
    cur = &cur->args()[static_cast<std::size_t>(idx)];
  }
  if ((s == Polarity::Pos) != positive_hole)
    throw rule_error("hole sign does not match approximation rule");
  const Formula& gamma = *cur;
  bool single_atom = gamma.kind() == FKind::Nominal || gamma.kind() == FKind::Conominal;
  if (!single_atom && !base_language(gamma, sig))
    throw rule_error("extracted formula is not in the base language: " + print_formula(gamma));
  if (check_pivotal && slr_classifiable(s, gamma, mode, sig))
    throw rule_error("non-pivotal approximation: hole node is SLR");

  Formula atom = positive_hole ? Formula::nominal(fresh) : Formula::conominal(fresh);
  Inequality constraint = positive_hole ? Inequality{atom, gamma} : Inequality{gamma, atom};
  System out = sys;
  out.s.push_back(constraint);
  Formula new_side = replace_at(side, path, 0, atom);
  if (on_lhs)
    out.ineq.lhs = new_side;
  else
    out.ineq.rhs = new_side;
  return out;
}

System apply_residuation(const System& sys, RuleId rule, int s_index, int coordinate,
                         const ExpandedSignature& sig) {
  if (s_index < 0 || static_cast<std::size_t>(s_index) >= sys.s.size())
    throw rule_error("bad S index");
  const Inequality& member = sys.s[static_cast<std::size_t>(s_index)];
  Inequality result;
  if (rule == RuleId::ResiduateF) {
    const Formula& head = member.lhs;
    if (head.kind() != FKind::App) throw rule_error("lhs is not an f-application");
    const ConnectiveDecl& d = sig.at(head.name());
    if (!d.is_base() || d.family != Family::F) throw rule_error("lhs head is not a base f-connective");
    if (coordinate < 1 || coordinate > d.arity) throw rule_error("bad residuation coordinate");
    const ConnectiveDecl& r = sig.residual_of(head.name(), coordinate);
    std::vector<Formula> args = head.args();
    Formula phi_i = args[static_cast<std::size_t>(coordinate - 1)];
    args[static_cast<std::size_t>(coordinate - 1)] = member.rhs;
    Formula res = Formula::app(r.name, std::move(args));
    if (d.order_type.at(static_cast<std::size_t>(coordinate - 1)) == Polarity::Pos)
      result = Inequality{phi_i, res};
    else
      result = Inequality{res, phi_i};
  } else if (rule == RuleId::ResiduateG) {
    const Formula& head = member.rhs;
    if (head.kind() != FKind::App) throw rule_error("rhs is not a g-application");
    const ConnectiveDecl& d = sig.at(head.name());
    if (!d.is_base() || d.family != Family::G) throw rule_error("rhs head is not a base g-connective");
    if (coordinate < 1 || coordinate > d.arity) throw rule_error("bad residuation coordinate");
    const ConnectiveDecl& r = sig.residual_of(head.name(), coordinate);
    std::vector<Formula> args = head.args();
    Formula phi_i = args[static_cast<std::size_t>(coordinate - 1)];
    args[static_cast<std::size_t>(coordinate - 1)] = member.lhs;
    Formula res = Formula::app(r.name, std::move(args));
    if (d.order_type.at(static_cast<std::size_t>(coordinate - 1)) == Polarity::Pos)
      result = Inequality{res, phi_i};
    else
      result = Inequality{phi_i, res};
  } else {
    throw rule_error("not a residuation rule");
  }
  System out = sys;
  out.s[static_cast<std::size_t>(s_index)] = result;
  return out;
}

System apply_split(const System& sys, int s_index) {
  if (s_index < 0 || static_cast<std::size_t>(s_index) >= sys.s.size())
    throw rule_error("bad S index");
  const Inequality& member = sys.s[static_cast<std::size_t>(s_index)];
  std::vector<Inequality> two;
  if (member.lhs.kind() == FKind::Join) {
    two = {Inequality{member.lhs.args()[0], member.rhs}, Inequality{member.lhs.args()[1], member.rhs}};
  } else if (member.rhs.kind() == FKind::Meet) {
    two = {Inequality{member.lhs, member.rhs.args()[0]}, Inequality{member.lhs, member.rhs.args()[1]}};
  } else {
    throw rule_error("splitting not applicable to " + print_inequality(member));
  }
  System out = sys;
  out.s.erase(out.s.begin() + s_index);
  out.s.insert(out.s.begin() + s_index, two.begin(), two.end());
  return out;
}

System apply_ackermann(const System& sys, const std::string& var, bool right,
                       const ExpandedSignature& sig) {
  if (contains_var(sys.ineq, var))
    throw rule_error("Ackermann: variable occurs in Ineq " + print_inequality(sys.ineq));
  std::vector<Formula> bounds;
  std::vector<Inequality> rest;
  for (const Inequality& m : sys.s) {
    if (right && m.rhs.kind() == FKind::Var && m.rhs.name() == var && !contains_var(m.lhs, var)) {
      bounds.push_back(m.lhs);
      continue;
    }
    if (!right && m.lhs.kind() == FKind::Var && m.lhs.name() == var && !contains_var(m.rhs, var)) {
      bounds.push_back(m.rhs);
      continue;
    }
    bool ok = right ? (positive_in(m.lhs, var, sig) && negative_in(m.rhs, var, sig))
                    : (negative_in(m.lhs, var, sig) && positive_in(m.rhs, var, sig));
    if (!ok)
      throw rule_error("Ackermann side condition fails on " + print_inequality(m));
    rest.push_back(m);
  }
  Formula alpha = right ? Formula::bot() : Formula::top();
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (i == 0)
      alpha = bounds[0];
    else
      alpha = right ? Formula::join(alpha, bounds[i]) : Formula::meet(alpha, bounds[i]);
  }
  System out;
  out.ineq = sys.ineq;
  for (const Inequality& m : rest) out.s.push_back(substitute(m, var, alpha));
  return out;
}

System apply_step(const System& sys, const TraceStep& step, Mode mode, const ExpandedSignature& sig) {
  switch (step.rule) {
    case RuleId::ApproxLPos:
    case RuleId::ApproxLNeg:
    case RuleId::ApproxRPos:
    case RuleId::ApproxRNeg:
      return apply_approx(sys, step.rule, step.pos.path, step.fresh, mode, sig, step.pivotal);
    case RuleId::ResiduateF:
    case RuleId::ResiduateG:
      return apply_residuation(sys, step.rule, step.pos.index, step.pos.coordinate, sig);
    case RuleId::Split:
      return apply_split(sys, step.pos.index);
    case RuleId::AckermannRight:
      return apply_ackermann(sys, step.pos.var, true, sig);
    case RuleId::AckermannLeft:
      return apply_ackermann(sys, step.pos.var, false, sig);
    default:
      throw rule_error("rule not applicable to a system");
  }
}

// ------------------------------------------------------------------ shape

namespace {

bool shape_scan(const Formula& f, Polarity sign, const ExpandedSignature& sig, bool closed) {
  // closed: nominals/F*-residuals positive, co-nominals/G*-residuals negative.
  // open: the mirror image.
  switch (f.kind()) {
    case FKind::Nominal:
      return closed ? sign == Polarity::Pos : sign == Polarity::Neg;
    case FKind::Conominal:
      return closed ? sign == Polarity::Neg : sign == Polarity::Pos;
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(f.name());
      if (!d.is_base()) {
        bool want_pos = (d.family == Family::F) == closed;
        if ((sign == Polarity::Pos) != want_pos) return false;
      }
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        Polarity child = d.order_type.at(i) == Polarity::Pos ? sign : opposite(sign);
        if (!shape_scan(f.args()[i], child, sig, closed)) return false;
      }
      return true;
    }
    case FKind::Meet:
    case FKind::Join:
      return shape_scan(f.args()[0], sign, sig, closed) && shape_scan(f.args()[1], sign, sig, closed);
    default:
      return true;
  }
}

}  // namespace

bool syntactically_closed(const Formula& f, const ExpandedSignature& sig) {
  return shape_scan(f, Polarity::Pos, sig, true);
}

bool syntactically_open(const Formula& f, const ExpandedSignature& sig) {
  return shape_scan(f, Polarity::Pos, sig, false);
}

bool ShapeReport::all_ok() const {
  for (const ShapeEntry& e : entries)
    if (!e.lhs_closed || !e.rhs_open) return false;
  return true;
}

ShapeReport shape_check(const System& sys, const ExpandedSignature& sig) {
  ShapeReport report;
  auto add = [&](int idx, const Inequality& i) {
    if (is_pure(i) && idx >= 0) return;  // pure members are skipped
    ShapeEntry e;
    e.s_index = idx;
    e.ineq = i;
    e.lhs_closed = syntactically_closed(i.lhs, sig);
    e.rhs_open = syntactically_open(i.rhs, sig);
    report.entries.push_back(std::move(e));
  };
  add(-1, sys.ineq);
  for (std::size_t i = 0; i < sys.s.size(); ++i) add(static_cast<int>(i), sys.s[i]);
  return report;
}

// ------------------------------------------------------------------ engine

namespace {

class FreshNames {
 public:
  void note(const Formula& f) {
    for (const std::string& n : nominals_of(f)) used_.insert(n);
    for (const std::string& n : conominals_of(f)) used_.insert(n);
  }
  void note(const Inequality& i) {
    note(i.lhs);
    note(i.rhs);
  }
  std::string nominal() { return next("j", next_j_); }
  std::string conominal() { return next("m", next_m_); }

 private:
  std::string next(const char* stem, int& counter) {
    while (true) {
      std::string name = stem + std::to_string(counter++);
      if (used_.insert(name).second) return name;
    }
  }
  std::set<std::string> used_;
  int next_j_ = 1;
  int next_m_ = 1;
};

struct EngineState {
  System sys;
  std::vector<TraceStep> trace;
  int steps_left;
};

void push_step(EngineState& st, RuleId rule, Position pos, const System& before, System after,
               std::string fresh = {}, bool pivotal = true) {
  if (st.steps_left-- <= 0) throw rule_error("budget");
  st.trace.push_back(TraceStep{rule, std::move(pos), before, after, std::move(fresh), pivotal});
  st.sys = std::move(after);
}

// Preorder path to the first occurrence of `var`, or nullopt.
std::optional<std::vector<int>> path_to_var(const Formula& f, const std::string& var) {
  if (f.kind() == FKind::Var && f.name() == var) return std::vector<int>{};
  for (std::size_t i = 0; i < f.args().size(); ++i) {
    if (auto sub = path_to_var(f.args()[i], var)) {
      sub->insert(sub->begin(), static_cast<int>(i));
      return sub;
    }
  }
  return std::nullopt;
}

struct GuidedContext {
  const ExpandedSignature& sig;
  Mode mode;
  FreshNames& fresh;
};

// Stage 2a: extract, at the first non-SLR node toward each occurrence of
// `var`, until Ineq no longer mentions it.
void strip_variable(EngineState& st, const std::string& var, GuidedContext& cx) {
  while (true) {
    bool on_lhs = contains_var(st.sys.ineq.lhs, var);
    if (!on_lhs && !contains_var(st.sys.ineq.rhs, var)) return;
    const Formula& side = on_lhs ? st.sys.ineq.lhs : st.sys.ineq.rhs;
    Polarity root_sign = on_lhs ? Polarity::Pos : Polarity::Neg;
    std::vector<int> full = *path_to_var(side, var);
    // Find the first node on the root-to-leaf path that is not SLR.
    std::vector<int> hole;
    const Formula* cur = &side;
    Polarity s = root_sign;
    for (std::size_t d = 0;; ++d) {
      if (!slr_classifiable(s, *cur, cx.mode, cx.sig)) break;
      int idx = full[d];
      hole.push_back(idx);
      if (cur->kind() == FKind::App &&
          cx.sig.at(cur->name()).order_type.at(static_cast<std::size_t>(idx)) == Polarity::Neg)
        s = opposite(s);
      cur = &cur->args()[static_cast<std::size_t>(idx)];
    }
    bool positive_hole = s == Polarity::Pos;
    RuleId rule = on_lhs ? (positive_hole ? RuleId::ApproxLPos : RuleId::ApproxLNeg)
                         : (positive_hole ? RuleId::ApproxRPos : RuleId::ApproxRNeg);
    std::string name = positive_hole ? cx.fresh.nominal() : cx.fresh.conominal();
    System before = st.sys;
    System after = apply_approx(before, rule, hole, name, cx.mode, cx.sig, true);
    Position pos;
    pos.target = Position::Target::Ineq;
    pos.lhs = on_lhs;
    pos.path = hole;
    push_step(st, rule, std::move(pos), before, std::move(after), name);
  }
}

bool critical_leaf_present(const Inequality& member, const std::string& var, Polarity eps_v,
                           const ExpandedSignature& sig) {
  // Critical leaves: +var when eps=1, -var when eps=d, in (-lhs, +rhs).
  for (const auto& [v, s] : occurrences(member.lhs, Polarity::Neg, sig))
    if (v == var && s == eps_v) return true;
  for (const auto& [v, s] : occurrences(member.rhs, Polarity::Pos, sig))
    if (v == var && s == eps_v) return true;
  return false;
}

// Stage 2b: residuate/split members until the system is Ackermann-ready for
// `var`. Critical occurrences are displayed into `pure <= var` / `var <= pure`.
void display_variable(EngineState& st, const std::string& var, Polarity eps_v, GuidedContext& cx) {
  std::size_t idx = 0;
  while (idx < st.sys.s.size()) {
    const Inequality member = st.sys.s[idx];
    bool bound_form = eps_v == Polarity::Pos
                          ? (member.rhs.kind() == FKind::Var && member.rhs.name() == var &&
                             !contains_var(member.lhs, var))
                          : (member.lhs.kind() == FKind::Var && member.lhs.name() == var &&
                             !contains_var(member.rhs, var));
    if (bound_form || !critical_leaf_present(member, var, eps_v, cx.sig)) {
      ++idx;
      continue;
    }
    // The critical occurrence lives on the non-pure side; peel one layer.
    bool in_rhs = [&] {
      for (const auto& [v, s] : occurrences(member.rhs, Polarity::Pos, cx.sig))
        if (v == var && s == eps_v) return true;
      return false;
    }();
    System before = st.sys;
    if (in_rhs) {
      const Formula& head = member.rhs;
      if (head.kind() == FKind::Meet) {
        Position pos;
        pos.target = Position::Target::SMember;
        pos.index = static_cast<int>(idx);
        push_step(st, RuleId::Split, std::move(pos), before, apply_split(before, static_cast<int>(idx)));
        continue;
      }
      if (head.kind() != FKind::App) throw rule_error("cannot display " + print_inequality(member));
      const ConnectiveDecl& d = cx.sig.at(head.name());
      if (!d.is_base() || d.family != Family::G)
        throw rule_error("cannot display " + print_inequality(member));
      int coord = 0;
      for (std::size_t i = 0; i < head.args().size(); ++i) {
        Polarity child = d.order_type.at(i) == Polarity::Pos ? Polarity::Pos : Polarity::Neg;
        for (const auto& [v, s] : occurrences(head.args()[i], child, cx.sig))
          if (v == var && s == eps_v) {
            coord = static_cast<int>(i) + 1;
            break;
          }
        if (coord) break;
      }
      if (!coord) throw rule_error("no critical coordinate in " + print_inequality(member));
      Position pos;
      pos.target = Position::Target::SMember;
      pos.index = static_cast<int>(idx);
      pos.coordinate = coord;
      push_step(st, RuleId::ResiduateG, std::move(pos), before,
                apply_residuation(before, RuleId::ResiduateG, static_cast<int>(idx), coord, cx.sig));
      continue;
    }
    const Formula& head = member.lhs;
    if (head.kind() == FKind::Join) {
      Position pos;
      pos.target = Position::Target::SMember;
      pos.index = static_cast<int>(idx);
      push_step(st, RuleId::Split, std::move(pos), before, apply_split(before, static_cast<int>(idx)));
      continue;
    }
    if (head.kind() != FKind::App) throw rule_error("cannot display " + print_inequality(member));
    const ConnectiveDecl& d = cx.sig.at(head.name());
    if (!d.is_base() || d.family != Family::F)
      throw rule_error("cannot display " + print_inequality(member));
    int coord = 0;
    for (std::size_t i = 0; i < head.args().size(); ++i) {
      Polarity child = d.order_type.at(i) == Polarity::Pos ? Polarity::Neg : Polarity::Pos;
      for (const auto& [v, s] : occurrences(head.args()[i], child, cx.sig))
        if (v == var && s == eps_v) {
          coord = static_cast<int>(i) + 1;
          break;
        }
      if (coord) break;
    }
    if (!coord) throw rule_error("no critical coordinate in " + print_inequality(member));
    Position pos;
    pos.target = Position::Target::SMember;
    pos.index = static_cast<int>(idx);
    pos.coordinate = coord;
    push_step(st, RuleId::ResiduateF, std::move(pos), before,
              apply_residuation(before, RuleId::ResiduateF, static_cast<int>(idx), coord, cx.sig));
  }
}

bool system_pure(const System& sys) {
  if (!is_pure(sys.ineq)) return false;
  for (const Inequality& i : sys.s)
    if (!is_pure(i)) return false;
  return true;
}

std::vector<std::string> system_variables(const System& sys) {
  std::vector<std::string> out;
  auto add = [&](const std::vector<std::string>& vs) {
    for (const std::string& v : vs)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  add(variables_of(sys.ineq));
  for (const Inequality& i : sys.s) add(variables_of(i));
  return out;
}

// Guided reduction of one system per the inductive strategy: strip, then
// display and eliminate the Omega-minimal variables in turn.
void guided_system(EngineState& st, const DependencyOrder& omega, const VarOrderType& eps,
                   GuidedContext& cx) {
  std::vector<std::string> order = variables_of(st.sys.ineq);
  while (true) {
    std::vector<std::string> remaining = system_variables(st.sys);
    if (remaining.empty()) break;
    // Omega-minimal among remaining, first-occurrence tie-break.
    std::string var;
    for (const std::string& v : order) {
      if (std::find(remaining.begin(), remaining.end(), v) == remaining.end()) continue;
      bool minimal = true;
      for (const std::string& u : remaining)
        if (u != v && omega.less(u, v)) minimal = false;
      if (minimal) {
        var = v;
        break;
      }
    }
    if (var.empty()) throw rule_error("no Omega-minimal variable");
    auto it = eps.find(var);
    Polarity ev = it == eps.end() ? Polarity::Pos : it->second;
    strip_variable(st, var, cx);
    display_variable(st, var, ev, cx);
    System before = st.sys;
    bool right = ev == Polarity::Pos;
    Position pos;
    pos.target = Position::Target::Variable;
    pos.var = var;
    push_step(st, right ? RuleId::AckermannRight : RuleId::AckermannLeft, std::move(pos), before,
              apply_ackermann(before, var, right, cx.sig));
  }
  if (!system_pure(st.sys)) throw rule_error("guided run left an impure system");
}

// ------------------------------------------------------------------ search

struct SearchNode {
  System sys;
  int parent = -1;
  TraceStep step;  // step applied to parent
};

struct Move {
  RuleId rule;
  Position pos;
  std::string fresh;
};

void enumerate_approx_moves(const System& sys, Mode mode, const ExpandedSignature& sig,
                            std::vector<Move>& out) {
  for (int side = 0; side < 2; ++side) {
    bool on_lhs = side == 0;
    const Formula& root = on_lhs ? sys.ineq.lhs : sys.ineq.rhs;
    Polarity root_sign = on_lhs ? Polarity::Pos : Polarity::Neg;
    SignedTree tree = SignedTree::build(root, root_sign, sig);
    for (std::size_t id = 0; id < tree.nodes().size(); ++id) {
      const SignedTree::N& n = tree.node(static_cast<int>(id));
      if (variables_of(n.formula).empty()) continue;  // no progress toward purity
      if (slr_classifiable(n.sign, n.formula, mode, sig)) continue;  // pivotality
      bool ancestors_ok = true;
      for (int cur = n.parent; cur >= 0; cur = tree.node(cur).parent)
        if (!slr_classifiable(tree.node(cur).sign, tree.node(cur).formula, mode, sig)) {
          ancestors_ok = false;
          break;
        }
      if (!ancestors_ok) continue;
      if (!base_language(n.formula, sig)) continue;
      Move m;
      bool positive_hole = n.sign == Polarity::Pos;
      m.rule = on_lhs ? (positive_hole ? RuleId::ApproxLPos : RuleId::ApproxLNeg)
                      : (positive_hole ? RuleId::ApproxRPos : RuleId::ApproxRNeg);
      m.pos.target = Position::Target::Ineq;
      m.pos.lhs = on_lhs;
      m.pos.path = tree.path_to(static_cast<int>(id));
      out.push_back(std::move(m));
    }
  }
}

void enumerate_moves(const System& sys, Mode mode, const ExpandedSignature& sig,
                     std::vector<Move>& out) {
  enumerate_approx_moves(sys, mode, sig, out);
  for (std::size_t i = 0; i < sys.s.size(); ++i) {
    const Inequality& m = sys.s[i];
    if (m.lhs.kind() == FKind::App) {
      const ConnectiveDecl& d = sig.at(m.lhs.name());
      if (d.is_base() && d.family == Family::F)
        for (int c = 1; c <= d.arity; ++c) {
          Move mv;
          mv.rule = RuleId::ResiduateF;
          mv.pos.target = Position::Target::SMember;
          mv.pos.index = static_cast<int>(i);
          mv.pos.coordinate = c;
          out.push_back(std::move(mv));
        }
    }
    if (m.rhs.kind() == FKind::App) {
      const ConnectiveDecl& d = sig.at(m.rhs.name());
      if (d.is_base() && d.family == Family::G)
        for (int c = 1; c <= d.arity; ++c) {
          Move mv;
          mv.rule = RuleId::ResiduateG;
          mv.pos.target = Position::Target::SMember;
          mv.pos.index = static_cast<int>(i);
          mv.pos.coordinate = c;
          out.push_back(std::move(mv));
        }
    }
    if (m.lhs.kind() == FKind::Join || m.rhs.kind() == FKind::Meet) {
      Move mv;
      mv.rule = RuleId::Split;
      mv.pos.target = Position::Target::SMember;
      mv.pos.index = static_cast<int>(i);
      out.push_back(std::move(mv));
    }
  }
  for (const std::string& v : system_variables(sys)) {
    for (bool right : {true, false}) {
      Move mv;
      mv.rule = right ? RuleId::AckermannRight : RuleId::AckermannLeft;
      mv.pos.target = Position::Target::Variable;
      mv.pos.var = v;
      out.push_back(std::move(mv));
    }
  }
}

struct SearchOutcome {
  bool success = false;
  bool budget_exhausted = false;
  System final;
  std::vector<TraceStep> steps;
  std::vector<System> dead_ends;
};

SearchOutcome search_system(const System& initial, Mode mode, const ExpandedSignature& sig,
                            FreshNames& fresh, int max_steps) {
  SearchOutcome out;
  std::vector<SearchNode> nodes{SearchNode{initial, -1, {}}};
  std::unordered_set<System, SystemHash> visited{initial};
  std::deque<int> queue{0};
  int budget = max_steps;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    System sys = nodes[static_cast<std::size_t>(cur)].sys;
    if (system_pure(sys)) {
      out.success = true;
      out.final = sys;
      std::vector<TraceStep> steps;
      for (int n = cur; n > 0; n = nodes[static_cast<std::size_t>(n)].parent)
        steps.push_back(nodes[static_cast<std::size_t>(n)].step);
      std::reverse(steps.begin(), steps.end());
      out.steps = std::move(steps);
      return out;
    }
    std::vector<Move> moves;
    enumerate_moves(sys, mode, sig, moves);
    int applied = 0;
    for (Move& mv : moves) {
      if (budget-- <= 0) {
        out.budget_exhausted = true;
        return out;
      }
      TraceStep step;
      step.rule = mv.rule;
      step.pos = mv.pos;
      step.before = sys;
      try {
        switch (mv.rule) {
          case RuleId::ApproxLPos:
          case RuleId::ApproxRPos:
            step.fresh = fresh.nominal();
            step.after = apply_approx(sys, mv.rule, mv.pos.path, step.fresh, mode, sig, true);
            break;
          case RuleId::ApproxLNeg:
          case RuleId::ApproxRNeg:
            step.fresh = fresh.conominal();
            step.after = apply_approx(sys, mv.rule, mv.pos.path, step.fresh, mode, sig, true);
            break;
          case RuleId::ResiduateF:
          case RuleId::ResiduateG:
            step.after = apply_residuation(sys, mv.rule, mv.pos.index, mv.pos.coordinate, sig);
            break;
          case RuleId::Split:
            step.after = apply_split(sys, mv.pos.index);
            break;
          case RuleId::AckermannRight:
            step.after = apply_ackermann(sys, mv.pos.var, true, sig);
            break;
          case RuleId::AckermannLeft:
            step.after = apply_ackermann(sys, mv.pos.var, false, sig);
            break;
          default:
            continue;
        }
      } catch (const rule_error&) {
        continue;  // move not applicable
      }
      ++applied;
      if (visited.insert(step.after).second) {
        nodes.push_back(SearchNode{step.after, cur, step});
        queue.push_back(static_cast<int>(nodes.size()) - 1);
      }
    }
    if (applied == 0 && out.dead_ends.size() < 5) out.dead_ends.push_back(sys);
  }
  return out;
}

}  // namespace

AlbaResult run(const Inequality& input, const RunOptions& opts, const ExpandedSignature& sig) {
  AlbaResult result;
  validate(input.lhs, sig);
  validate(input.rhs, sig);

  std::optional<std::pair<DependencyOrder, VarOrderType>> witness = opts.witness;
  Strategy strategy = opts.strategy;
  if (strategy != Strategy::Search && !witness) witness = find_inductive(input, opts.mode, sig);
  if (strategy == Strategy::Auto) strategy = witness ? Strategy::Guided : Strategy::Search;
  if (strategy == Strategy::Guided && !witness) {
    result.failure = FailureReason::NoWitness;
    result.failure_detail = "guided strategy requires an inductive witness";
    return result;
  }
  result.witness = witness;

  std::vector<Inequality> systems = preprocess(input, sig, &result.pre_trace);
  result.initial = systems;

  FreshNames fresh;
  fresh.note(input);

  bool all_ok = true;
  for (const Inequality& start : systems) {
    EngineState st{System{{}, start}, {}, opts.max_steps};
    if (strategy == Strategy::Guided) {
      GuidedContext cx{sig, opts.mode, fresh};
      try {
        guided_system(st, witness->first, witness->second, cx);
        result.traces.push_back(st.trace);
        result.outputs.push_back(QuasiInequality{st.sys.s, st.sys.ineq});
      } catch (const rule_error& e) {
        all_ok = false;
        result.traces.push_back(st.trace);
        result.failure = std::string(e.what()) == "budget" ? FailureReason::Budget : FailureReason::Stuck;
        result.failure_detail = e.what();
        result.stuck.push_back(st.sys);
      }
    } else {
      SearchOutcome so = search_system(System{{}, start}, opts.mode, sig, fresh, opts.max_steps);
      result.traces.push_back(so.steps);
      if (so.success) {
        result.outputs.push_back(QuasiInequality{so.final.s, so.final.ineq});
      } else {
        all_ok = false;
        result.failure = so.budget_exhausted ? FailureReason::Budget : FailureReason::Stuck;
        result.failure_detail = so.budget_exhausted ? "step budget exhausted" : "no applicable rule";
        for (System& d : so.dead_ends) result.stuck.push_back(std::move(d));
      }
    }
  }

  result.success = all_ok;
  result.pivotal = true;
  for (const auto& trace : result.traces)
    for (const TraceStep& s : trace)
      if (!s.pivotal) result.pivotal = false;
  result.canonical_certificate = result.pivotal && result.success;
  return result;
}

std::vector<Inequality> replay_pre(const Inequality& input, const std::vector<PreStep>& steps,
                                   const ExpandedSignature& sig) {
  std::vector<Inequality> work{input};
  for (const PreStep& st : steps) {
    if (work != st.before) throw rule_error("pre-trace replay: before-state mismatch");
    std::size_t k = static_cast<std::size_t>(st.pos.index);
    if (k >= work.size()) throw rule_error("pre-trace replay: bad index");
    switch (st.rule) {
      case RuleId::EliminateMonotone:
        work[k] = substitute(work[k], st.pos.var, st.replacement);
        break;
      case RuleId::Distribute: {
        const Formula& root = st.pos.lhs ? work[k].lhs : work[k].rhs;
        Polarity sign = sign_at(root, st.pos.lhs ? Polarity::Pos : Polarity::Neg, st.pos.path, sig);
        // Recompute the first applicable rewrite at the recorded node.
        std::vector<int> sub_path;
        Formula repl;
        const Formula& node = subformula_at(root, st.pos.path);
        if (!find_distribution(node, sign, sig, sub_path, repl) || !sub_path.empty())
          throw rule_error("pre-trace replay: no distribution at recorded path");
        Formula new_side = replace_at(root, st.pos.path, 0, repl);
        if (st.pos.lhs)
          work[k].lhs = new_side;
        else
          work[k].rhs = new_side;
        break;
      }
      case RuleId::Split: {
        Inequality cur = work[k];
        std::vector<Inequality> two;
        if (st.pos.lhs) {
          if (cur.lhs.kind() != FKind::Join) throw rule_error("pre-trace replay: lhs is not a join");
          two = {Inequality{cur.lhs.args()[0], cur.rhs}, Inequality{cur.lhs.args()[1], cur.rhs}};
        } else {
          if (cur.rhs.kind() != FKind::Meet) throw rule_error("pre-trace replay: rhs is not a meet");
          two = {Inequality{cur.lhs, cur.rhs.args()[0]}, Inequality{cur.lhs, cur.rhs.args()[1]}};
        }
        work.erase(work.begin() + static_cast<std::ptrdiff_t>(k));
        work.insert(work.begin() + static_cast<std::ptrdiff_t>(k), two.begin(), two.end());
        break;
      }
      default:
        throw rule_error("pre-trace replay: unexpected rule");
    }
    if (work != st.after) throw rule_error("pre-trace replay: after-state mismatch");
  }
  return work;
}

System replay_system(const Inequality& initial, const std::vector<TraceStep>& steps, Mode mode,
                     const ExpandedSignature& sig) {
  System sys{{}, initial};
  for (const TraceStep& st : steps) {
    if (!(sys == st.before)) throw rule_error("trace replay: before-state mismatch");
    sys = apply_step(sys, st, mode, sig);
    if (!(sys == st.after)) throw rule_error("trace replay: after-state mismatch");
  }
  return sys;
}

// ------------------------------------------------------------------ output simplifier

namespace {

int count_atom(const Formula& f, FKind kind, const std::string& name) {
  int n = (f.kind() == kind && f.name() == name) ? 1 : 0;
  for (const Formula& a : f.args()) n += count_atom(a, kind, name);
  return n;
}

int count_atom(const Inequality& i, FKind kind, const std::string& name) {
  return count_atom(i.lhs, kind, name) + count_atom(i.rhs, kind, name);
}

// Residuates the conclusion until the (co)nominal atom sits alone on one
// side. Returns the isolated inequality, or nullopt if blocked.
std::optional<Inequality> isolate_atom(Inequality concl, const Formula& atom,
                                       const ExpandedSignature& sig) {
  auto contains_atom = [&](const Formula& f) { return count_atom(f, atom.kind(), atom.name()) > 0; };
  for (int guard = 0; guard < 64; ++guard) {
    if (concl.lhs == atom || concl.rhs == atom) return concl;
    if (contains_atom(concl.lhs)) {
      const Formula& head = concl.lhs;
      if (head.kind() != FKind::App) return std::nullopt;
      const ConnectiveDecl& d = sig.at(head.name());
      if (!d.is_base() || d.family != Family::F) return std::nullopt;
      int coord = 0;
      for (std::size_t i = 0; i < head.args().size(); ++i)
        if (contains_atom(head.args()[i])) coord = static_cast<int>(i) + 1;
      System tmp{{concl}, concl};
      concl = apply_residuation(tmp, RuleId::ResiduateF, 0, coord, sig).s[0];
    } else {
      const Formula& head = concl.rhs;
      if (head.kind() != FKind::App) return std::nullopt;
      const ConnectiveDecl& d = sig.at(head.name());
      if (!d.is_base() || d.family != Family::G) return std::nullopt;
      int coord = 0;
      for (std::size_t i = 0; i < head.args().size(); ++i)
        if (contains_atom(head.args()[i])) coord = static_cast<int>(i) + 1;
      System tmp{{concl}, concl};
      concl = apply_residuation(tmp, RuleId::ResiduateG, 0, coord, sig).s[0];
    }
  }
  return std::nullopt;
}

}  // namespace

std::variant<QuasiInequality, Inequality> simplify_output(const QuasiInequality& q,
                                                          const ExpandedSignature& sig) {
  QuasiInequality cur = q;
  bool progress = true;
  while (progress && !cur.premises.empty()) {
    progress = false;
    for (std::size_t k = 0; k < cur.premises.size(); ++k) {
      const Inequality& prem = cur.premises[k];
      Formula atom;
      bool conominal_case;
      if (prem.rhs.kind() == FKind::Conominal) {
        atom = prem.rhs;
        conominal_case = true;
      } else if (prem.lhs.kind() == FKind::Nominal) {
        atom = prem.lhs;
        conominal_case = false;
      } else {
        continue;
      }
      const Formula& bound = conominal_case ? prem.lhs : prem.rhs;
      if (count_atom(bound, atom.kind(), atom.name()) != 0) continue;
      if (count_atom(cur.conclusion, atom.kind(), atom.name()) != 1) continue;
      bool elsewhere = false;
      for (std::size_t j = 0; j < cur.premises.size(); ++j)
        if (j != k && count_atom(cur.premises[j], atom.kind(), atom.name()) > 0) elsewhere = true;
      if (elsewhere) continue;
      auto isolated = isolate_atom(cur.conclusion, atom, sig);
      if (!isolated) continue;
      // forall m: (t <= m => t' <= m) iff t' <= t;
      // forall j: (j <= t => j <= t') iff t <= t'.
      Inequality new_concl;
      if (conominal_case) {
        if (!(isolated->rhs == atom)) continue;
        new_concl = Inequality{isolated->lhs, bound};
      } else {
        if (!(isolated->lhs == atom)) continue;
        new_concl = Inequality{bound, isolated->rhs};
      }
      cur.conclusion = new_concl;
      cur.premises.erase(cur.premises.begin() + static_cast<std::ptrdiff_t>(k));
      progress = true;
      break;
    }
  }
  if (cur.premises.empty()) return cur.conclusion;
  return q;
}

}  // namespace lealba
