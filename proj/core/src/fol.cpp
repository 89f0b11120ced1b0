#include "lealba/fol.hpp"

#include <algorithm>
#include <map>

#include "lealba/errors.hpp"

namespace lealba {

struct FOFormula::Node {
  FOKind kind;
  std::string rel;
  int inv = 0;
  char pred_kind = 'P';
  std::vector<FOVar> vars;
  std::vector<FOFormula> kids;
  FOVar binder;
};

FOFormula::FOFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
FOFormula::FOFormula() : node_(std::make_shared<Node>(Node{FOKind::Eq, "", 0, 'P', {}, {}, {}})) {}

FOFormula FOFormula::rel(std::string base, int inv, std::vector<FOVar> args) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Rel, std::move(base), inv, 'P', std::move(args), {}, {}}));
}
FOFormula FOFormula::leq(FOVar x, FOVar y) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Leq, "", 0, 'P', {x, y}, {}, {}}));
}
FOFormula FOFormula::eatom(FOVar a, FOVar b) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::EAtom, "", 0, 'P', {a, b}, {}, {}}));
}
FOFormula FOFormula::eq(FOVar a, FOVar b) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Eq, "", 0, 'P', {a, b}, {}, {}}));
}
FOFormula FOFormula::neq(FOVar a, FOVar b) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Neq, "", 0, 'P', {a, b}, {}, {}}));
}
FOFormula FOFormula::pred(char kind, std::string prop, FOVar v) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Pred, std::move(prop), 0, kind, {v}, {}, {}}));
}
FOFormula FOFormula::lnot(FOFormula a) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Not, "", 0, 'P', {}, {std::move(a)}, {}}));
}
FOFormula FOFormula::land(FOFormula a, FOFormula b) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::And, "", 0, 'P', {}, {std::move(a), std::move(b)}, {}}));
}
FOFormula FOFormula::implies(FOFormula a, FOFormula b) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Implies, "", 0, 'P', {}, {std::move(a), std::move(b)}, {}}));
}
FOFormula FOFormula::forall(FOVar v, FOFormula body) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Forall, "", 0, 'P', {}, {std::move(body)}, v}));
}
FOFormula FOFormula::exists(FOVar v, FOFormula body) {
  return FOFormula(std::make_shared<Node>(Node{FOKind::Exists, "", 0, 'P', {}, {std::move(body)}, v}));
}

FOKind FOFormula::kind() const { return node_->kind; }
const std::string& FOFormula::rel_name() const { return node_->rel; }
int FOFormula::inv() const { return node_->inv; }
char FOFormula::pred_kind() const { return node_->pred_kind; }
const std::vector<FOVar>& FOFormula::vars() const { return node_->vars; }
const std::vector<FOFormula>& FOFormula::kids() const { return node_->kids; }
FOVar FOFormula::binder() const { return node_->binder; }

// ------------------------------------------------------------------ RS translation

namespace {

FOVar lookup(const std::map<std::string, FOVar>& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) throw rule_error(std::string("unbound ") + what + " '" + name + "'");
  return it->second;
}

struct RelSpec {
  std::string base;
  int inv = 0;
  Family family = Family::F;        // family of the relation's base connective
  const OrderType* order = nullptr; // base connective's order type
};

RelSpec relation_of(const ConnectiveDecl& d, const ExpandedSignature& sig) {
  RelSpec r;
  if (d.is_base()) {
    r.base = d.name;
    r.inv = 0;
    r.family = d.family;
    r.order = &d.order_type;
  } else {
    const ConnectiveDecl& parent = sig.at(d.origin->parent);
    r.base = parent.name;
    r.inv = d.origin->coordinate;
    r.family = parent.family;
    r.order = &parent.order_type;
  }
  return r;
}

}  // namespace

FOFormula st_x(const Formula& f, FOVar x, const IndividualContext& idx, FOVarGen& gen,
               const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Top: return FOFormula::eq(x, x);
    case FKind::Bot: return FOFormula::neq(x, x);
    case FKind::Var: return FOFormula::pred('1', f.name(), x);
    case FKind::Nominal: {
      FOVar j = lookup(idx.nominals, f.name(), "nominal");
      FOVar y = gen.fresh(FOSort::Y);
      return FOFormula::forall(y, FOFormula::implies(FOFormula::leq(j, y), FOFormula::leq(x, y)));
    }
    case FKind::Conominal: return FOFormula::leq(x, lookup(idx.conominals, f.name(), "co-nominal"));
    case FKind::Meet:
      return FOFormula::land(st_x(f.args()[0], x, idx, gen, sig), st_x(f.args()[1], x, idx, gen, sig));
    case FKind::Join: {
      FOVar y = gen.fresh(FOSort::Y);
      return FOFormula::forall(y, FOFormula::implies(st_y(f, y, idx, gen, sig), FOFormula::leq(x, y)));
    }
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(f.name());
      if (d.family == Family::F) {
        FOVar y = gen.fresh(FOSort::Y);
        return FOFormula::forall(y, FOFormula::implies(st_y(f, y, idx, gen, sig), FOFormula::leq(x, y)));
      }
      // Direct clause for g-type connectives: R(x, z_1..z_n) guarded by the
      // translations of the arguments at their sorts.
      std::vector<FOVar> zs;
      for (std::size_t i = 0; i < f.args().size(); ++i)
        zs.push_back(gen.fresh(d.order_type.at(i) == Polarity::Pos ? FOSort::Y : FOSort::X));
      RelSpec r = relation_of(d, sig);
      std::vector<FOVar> args{x};
      args.insert(args.end(), zs.begin(), zs.end());
      FOFormula body = FOFormula::rel(r.base, r.inv, std::move(args));
      if (!f.args().empty()) {
        FOFormula ante;
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          FOFormula part = zs[i].sort == FOSort::Y ? st_y(f.args()[i], zs[i], idx, gen, sig)
                                                   : st_x(f.args()[i], zs[i], idx, gen, sig);
          ante = i == 0 ? part : FOFormula::land(std::move(ante), std::move(part));
        }
        body = FOFormula::implies(std::move(ante), std::move(body));
      }
      for (std::size_t i = zs.size(); i-- > 0;) body = FOFormula::forall(zs[i], std::move(body));
      return body;
    }
  }
  throw rule_error("unreachable");
}

FOFormula st_y(const Formula& f, FOVar y, const IndividualContext& idx, FOVarGen& gen,
               const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Top: return FOFormula::neq(y, y);
    case FKind::Bot: return FOFormula::eq(y, y);
    case FKind::Var: return FOFormula::pred('2', f.name(), y);
    case FKind::Nominal: return FOFormula::leq(lookup(idx.nominals, f.name(), "nominal"), y);
    case FKind::Conominal: {
      FOVar m = lookup(idx.conominals, f.name(), "co-nominal");
      FOVar x = gen.fresh(FOSort::X);
      return FOFormula::forall(x, FOFormula::implies(FOFormula::leq(x, m), FOFormula::leq(x, y)));
    }
    case FKind::Join:
      return FOFormula::land(st_y(f.args()[0], y, idx, gen, sig), st_y(f.args()[1], y, idx, gen, sig));
    case FKind::Meet: {
      FOVar x = gen.fresh(FOSort::X);
      return FOFormula::forall(x, FOFormula::implies(st_x(f, x, idx, gen, sig), FOFormula::leq(x, y)));
    }
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(f.name());
      if (d.family == Family::G) {
        FOVar x = gen.fresh(FOSort::X);
        return FOFormula::forall(x, FOFormula::implies(st_x(f, x, idx, gen, sig), FOFormula::leq(x, y)));
      }
      std::vector<FOVar> zs;
      for (std::size_t i = 0; i < f.args().size(); ++i)
        zs.push_back(gen.fresh(d.order_type.at(i) == Polarity::Pos ? FOSort::X : FOSort::Y));
      RelSpec r = relation_of(d, sig);
      std::vector<FOVar> args{y};
      args.insert(args.end(), zs.begin(), zs.end());
      FOFormula body = FOFormula::rel(r.base, r.inv, std::move(args));
      if (!f.args().empty()) {
        FOFormula ante;
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          FOFormula part = zs[i].sort == FOSort::X ? st_x(f.args()[i], zs[i], idx, gen, sig)
                                                   : st_y(f.args()[i], zs[i], idx, gen, sig);
          ante = i == 0 ? part : FOFormula::land(std::move(ante), std::move(part));
        }
        body = FOFormula::implies(std::move(ante), std::move(body));
      }
      for (std::size_t i = zs.size(); i-- > 0;) body = FOFormula::forall(zs[i], std::move(body));
      return body;
    }
  }
  throw rule_error("unreachable");
}

// ------------------------------------------------------------------ TiRS translation

namespace {

enum class TirsOp { Dia, Box };

TirsOp tirs_op(const Formula& f, const ExpandedSignature& sig) {
  const ConnectiveDecl& d = sig.at(f.name());
  if (d.is_base() && d.arity == 1 && d.order_type == OrderType({Polarity::Pos}))
    return d.family == Family::F ? TirsOp::Dia : TirsOp::Box;
  throw signature_error("connective '" + f.name() + "' is outside the TiRS fragment");
}

}  // namespace

FOFormula st_plus(const Formula& f, FOVar z, const IndividualContext& idx, FOVarGen& gen,
                  const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Bot: return FOFormula::neq(z, z);
    case FKind::Top: return FOFormula::eq(z, z);
    case FKind::Var: return FOFormula::pred('P', f.name(), z);
    case FKind::Nominal: {
      FOVar i = lookup(idx.nominals, f.name(), "nominal");
      FOVar zp = gen.fresh(FOSort::Z);
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::lnot(FOFormula::eatom(i, zp)),
                                                      FOFormula::lnot(FOFormula::eatom(z, zp))));
    }
    case FKind::Conominal: {
      FOVar zp = gen.fresh(FOSort::Z);
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::eatom(z, zp),
                                                      FOFormula::lnot(st_minus(f, zp, idx, gen, sig))));
    }
    case FKind::Meet:
      return FOFormula::land(st_plus(f.args()[0], z, idx, gen, sig), st_plus(f.args()[1], z, idx, gen, sig));
    case FKind::Join: {
      FOVar zp = gen.fresh(FOSort::Z);
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::eatom(z, zp),
                                                      FOFormula::lnot(st_minus(f, zp, idx, gen, sig))));
    }
    case FKind::App: {
      FOVar zp = gen.fresh(FOSort::Z);
      if (tirs_op(f, sig) == TirsOp::Dia)
        return FOFormula::forall(zp, FOFormula::implies(FOFormula::eatom(z, zp),
                                                        FOFormula::lnot(st_minus(f, zp, idx, gen, sig))));
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::rel(f.name(), 0, {z, zp}),
                                                      FOFormula::lnot(st_minus(f.args()[0], zp, idx, gen, sig))));
    }
  }
  throw rule_error("unreachable");
}

FOFormula st_minus(const Formula& f, FOVar z, const IndividualContext& idx, FOVarGen& gen,
                   const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FKind::Bot: return FOFormula::eq(z, z);
    case FKind::Top: return FOFormula::neq(z, z);
    case FKind::Var:
    case FKind::Nominal:
    case FKind::Meet: {
      FOVar zp = gen.fresh(FOSort::Z);
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::eatom(zp, z),
                                                      FOFormula::lnot(st_plus(f, zp, idx, gen, sig))));
    }
    case FKind::Conominal:
      return FOFormula::lnot(FOFormula::eatom(z, lookup(idx.conominals, f.name(), "co-nominal")));
    case FKind::Join:
      return FOFormula::land(st_minus(f.args()[0], z, idx, gen, sig), st_minus(f.args()[1], z, idx, gen, sig));
    case FKind::App: {
      FOVar zp = gen.fresh(FOSort::Z);
      if (tirs_op(f, sig) == TirsOp::Dia)
        return FOFormula::forall(zp, FOFormula::implies(FOFormula::rel(f.name(), 0, {z, zp}),
                                                        FOFormula::lnot(st_plus(f.args()[0], zp, idx, gen, sig))));
      return FOFormula::forall(zp, FOFormula::implies(FOFormula::eatom(zp, z),
                                                      FOFormula::lnot(st_plus(f, zp, idx, gen, sig))));
    }
  }
  throw rule_error("unreachable");
}

// ------------------------------------------------------------------ sentences

namespace {

void collect_atoms(const QuasiInequality& q, std::vector<std::string>& noms,
                   std::vector<std::string>& conoms) {
  auto add = [](std::vector<std::string>& out, const std::vector<std::string>& in) {
    for (const std::string& s : in)
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  auto both = [&](const Inequality& i) {
    add(noms, nominals_of(i.lhs));
    add(noms, nominals_of(i.rhs));
    add(conoms, conominals_of(i.lhs));
    add(conoms, conominals_of(i.rhs));
  };
  for (const Inequality& p : q.premises) both(p);
  both(q.conclusion);
}

}  // namespace

FOFormula translate_quasi_rs(const QuasiInequality& q, const ExpandedSignature& sig) {
  if (!is_pure(q)) throw rule_error("RS translation requires a pure quasi-inequality");
  std::vector<std::string> noms, conoms;
  collect_atoms(q, noms, conoms);
  FOVarGen gen;
  IndividualContext idx;
  for (const std::string& n : noms) idx.nominals.emplace(n, gen.fresh(FOSort::X));
  for (const std::string& n : conoms) idx.conominals.emplace(n, gen.fresh(FOSort::Y));

  auto ineq_sentence = [&](const Inequality& i) {
    FOVar x = gen.fresh(FOSort::X);
    FOVar y = gen.fresh(FOSort::Y);
    FOFormula body = FOFormula::implies(
        FOFormula::land(st_x(i.lhs, x, idx, gen, sig), st_y(i.rhs, y, idx, gen, sig)),
        FOFormula::leq(x, y));
    return FOFormula::forall(x, FOFormula::forall(y, std::move(body)));
  };

  FOFormula concl = ineq_sentence(q.conclusion);
  FOFormula body;
  if (q.premises.empty()) {
    body = std::move(concl);
  } else {
    FOFormula prem;
    for (std::size_t i = 0; i < q.premises.size(); ++i) {
      FOFormula part = ineq_sentence(q.premises[i]);
      prem = i == 0 ? part : FOFormula::land(std::move(prem), std::move(part));
    }
    body = FOFormula::implies(std::move(prem), std::move(concl));
  }
  for (std::size_t i = conoms.size(); i-- > 0;) body = FOFormula::forall(idx.conominals.at(conoms[i]), std::move(body));
  for (std::size_t i = noms.size(); i-- > 0;) body = FOFormula::forall(idx.nominals.at(noms[i]), std::move(body));
  return body;
}

FOFormula translate_quasi_tirs(const QuasiInequality& q, const ExpandedSignature& sig) {
  if (!is_pure(q)) throw rule_error("TiRS translation requires a pure quasi-inequality");
  std::vector<std::string> noms, conoms;
  collect_atoms(q, noms, conoms);
  FOVarGen gen;
  IndividualContext idx;
  for (const std::string& n : noms) idx.nominals.emplace(n, gen.fresh(FOSort::Z));
  for (const std::string& n : conoms) idx.conominals.emplace(n, gen.fresh(FOSort::Z));

  auto ineq_sentence = [&](const Inequality& i) {
    FOVar z = gen.fresh(FOSort::Z);
    FOVar zp = gen.fresh(FOSort::Z);
    FOFormula body = FOFormula::implies(
        FOFormula::land(st_plus(i.lhs, z, idx, gen, sig), st_minus(i.rhs, zp, idx, gen, sig)),
        FOFormula::lnot(FOFormula::eatom(z, zp)));
    return FOFormula::forall(z, FOFormula::forall(zp, std::move(body)));
  };

  FOFormula concl = ineq_sentence(q.conclusion);
  FOFormula body;
  if (q.premises.empty()) {
    body = std::move(concl);
  } else {
    FOFormula prem;
    for (std::size_t i = 0; i < q.premises.size(); ++i) {
      FOFormula part = ineq_sentence(q.premises[i]);
      prem = i == 0 ? part : FOFormula::land(std::move(prem), std::move(part));
    }
    body = FOFormula::implies(std::move(prem), std::move(concl));
  }
  for (std::size_t i = conoms.size(); i-- > 0;) body = FOFormula::forall(idx.conominals.at(conoms[i]), std::move(body));
  for (std::size_t i = noms.size(); i-- > 0;) body = FOFormula::forall(idx.nominals.at(noms[i]), std::move(body));
  return body;
}

// ------------------------------------------------------------------ simplifier

namespace {

bool occurs_free(const FOFormula& f, FOVar v) {
  switch (f.kind()) {
    case FOKind::Forall:
    case FOKind::Exists:
      if (f.binder() == v) return false;
      return occurs_free(f.kids()[0], v);
    default:
      for (const FOVar& u : f.vars())
        if (u == v) return true;
      for (const FOFormula& k : f.kids())
        if (occurs_free(k, v)) return true;
      return false;
  }
}

bool is_taut_eq(const FOFormula& f) {
  return f.kind() == FOKind::Eq && f.vars()[0] == f.vars()[1];
}

// Phase 1: push negations through forall / implication / double negation.
FOFormula push_not(const FOFormula& f) {
  std::vector<FOFormula> kids;
  for (const FOFormula& k : f.kids()) kids.push_back(push_not(k));
  switch (f.kind()) {
    case FOKind::Not: {
      const FOFormula& a = kids[0];
      if (a.kind() == FOKind::Not) return a.kids()[0];
      if (a.kind() == FOKind::Forall) return FOFormula::exists(a.binder(), push_not(FOFormula::lnot(a.kids()[0])));
      if (a.kind() == FOKind::Implies)
        return FOFormula::land(a.kids()[0], push_not(FOFormula::lnot(a.kids()[1])));
      return FOFormula::lnot(a);
    }
    case FOKind::And: return FOFormula::land(kids[0], kids[1]);
    case FOKind::Implies: return FOFormula::implies(kids[0], kids[1]);
    case FOKind::Forall: return FOFormula::forall(f.binder(), kids[0]);
    case FOKind::Exists: return FOFormula::exists(f.binder(), kids[0]);
    default: return f;
  }
}

// Phase 2: contraposition and tautology cleanup.
FOFormula tidy(const FOFormula& f, bool& changed) {
  std::vector<FOFormula> kids;
  for (const FOFormula& k : f.kids()) kids.push_back(tidy(k, changed));
  switch (f.kind()) {
    case FOKind::Not: return FOFormula::lnot(kids[0]);
    case FOKind::And:
      if (is_taut_eq(kids[0])) { changed = true; return kids[1]; }
      if (is_taut_eq(kids[1])) { changed = true; return kids[0]; }
      return FOFormula::land(kids[0], kids[1]);
    case FOKind::Implies:
      if (is_taut_eq(kids[0])) { changed = true; return kids[1]; }
      if (kids[0].kind() == FOKind::Not && kids[1].kind() == FOKind::Not) {
        changed = true;
        return FOFormula::implies(kids[1].kids()[0], kids[0].kids()[0]);
      }
      return FOFormula::implies(kids[0], kids[1]);
    case FOKind::Forall:
      if (kids[0].kind() == FOKind::Implies && !occurs_free(kids[0].kids()[0], f.binder())) {
        changed = true;
        return FOFormula::implies(kids[0].kids()[0], FOFormula::forall(f.binder(), kids[0].kids()[1]));
      }
      return FOFormula::forall(f.binder(), kids[0]);
    case FOKind::Exists: return FOFormula::exists(f.binder(), kids[0]);
    default: return f;
  }
}

}  // namespace

FOFormula simplify_fo(const FOFormula& f) {
  FOFormula cur = push_not(f);
  bool changed = true;
  while (changed) {
    changed = false;
    cur = tidy(cur, changed);
  }
  return cur;
}

// ------------------------------------------------------------------ printing

namespace {

struct PrintEnv {
  std::map<int, std::string> names;
  int nx = 0, ny = 0, nz = 0;

  std::string bind(FOVar v) {
    std::string stem;
    int n = 0;
    switch (v.sort) {
      case FOSort::X: stem = "x"; n = nx++; break;
      case FOSort::Y: stem = "y"; n = ny++; break;
      case FOSort::Z: stem = "z"; n = nz++; break;
    }
    std::string name = stem + std::to_string(n);
    names[v.id] = name;
    return name;
  }
  std::string name_of(FOVar v) const {
    auto it = names.find(v.id);
    if (it != names.end()) return it->second;
    return "?" + std::to_string(v.id);
  }
};

const char* sort_name(FOSort s) {
  switch (s) {
    case FOSort::X: return "X";
    case FOSort::Y: return "Y";
    case FOSort::Z: return "Z";
  }
  return "?";
}

void print_rec(const FOFormula& f, PrintEnv& env, std::string& out) {
  switch (f.kind()) {
    case FOKind::Rel: {
      out += "R_" + f.rel_name();
      if (f.inv() > 0) out += "^-" + std::to_string(f.inv());
      out += '(';
      for (std::size_t i = 0; i < f.vars().size(); ++i) {
        if (i) out += ", ";
        out += env.name_of(f.vars()[i]);
      }
      out += ')';
      break;
    }
    case FOKind::Leq:
      out += env.name_of(f.vars()[0]) + " <= " + env.name_of(f.vars()[1]);
      break;
    case FOKind::EAtom:
      out += "E(" + env.name_of(f.vars()[0]) + ", " + env.name_of(f.vars()[1]) + ")";
      break;
    case FOKind::Eq:
      out += env.name_of(f.vars()[0]) + " = " + env.name_of(f.vars()[1]);
      break;
    case FOKind::Neq:
      out += env.name_of(f.vars()[0]) + " != " + env.name_of(f.vars()[1]);
      break;
    case FOKind::Pred:
      out += 'P';
      if (f.pred_kind() != 'P') out += f.pred_kind();
      out += '_' + f.rel_name() + '(' + env.name_of(f.vars()[0]) + ')';
      break;
    case FOKind::Not:
      out += '~';
      out += '(';
      print_rec(f.kids()[0], env, out);
      out += ')';
      break;
    case FOKind::And:
      out += '(';
      print_rec(f.kids()[0], env, out);
      out += " & ";
      print_rec(f.kids()[1], env, out);
      out += ')';
      break;
    case FOKind::Implies:
      out += '(';
      print_rec(f.kids()[0], env, out);
      out += " -> ";
      print_rec(f.kids()[1], env, out);
      out += ')';
      break;
    case FOKind::Forall:
    case FOKind::Exists: {
      out += f.kind() == FOKind::Forall ? "forall " : "exists ";
      std::string name = env.bind(f.binder());
      out += name;
      out += ':';
      out += sort_name(f.binder().sort);
      out += ". ";
      print_rec(f.kids()[0], env, out);
      break;
    }
  }
}

}  // namespace

std::string print_fo(const FOFormula& f) {
  PrintEnv env;
  std::string out;
  print_rec(f, env, out);
  return out;
}

bool alpha_equal(const FOFormula& a, const FOFormula& b) { return print_fo(a) == print_fo(b); }

// ------------------------------------------------------------------ sort checking

namespace {

std::vector<FOSort> relation_profile(const std::string& base, int inv, std::size_t arity,
                                     const ExpandedSignature& sig) {
  const ConnectiveDecl* d = sig.find(base);
  if (d && d->is_base()) {
    std::vector<FOSort> prof;
    // f: Y x prod X^eps; g: X x prod Y^eps.
    bool is_f = d->family == Family::F;
    prof.push_back(is_f ? FOSort::Y : FOSort::X);
    for (int i = 0; i < d->arity; ++i) {
      bool pos = d->order_type.at(static_cast<std::size_t>(i)) == Polarity::Pos;
      if (is_f)
        prof.push_back(pos ? FOSort::X : FOSort::Y);
      else
        prof.push_back(pos ? FOSort::Y : FOSort::X);
    }
    if (inv > 0 && static_cast<std::size_t>(inv) < prof.size())
      std::swap(prof[0], prof[static_cast<std::size_t>(inv)]);
    if (prof.size() != arity) throw rule_error("relation arity mismatch for R_" + base);
    return prof;
  }
  // TiRS relations of the dia/box fragment are homogeneous over Z.
  return std::vector<FOSort>(arity, FOSort::Z);
}

void sort_check_rec(const FOFormula& f, const ExpandedSignature& sig) {
  switch (f.kind()) {
    case FOKind::Rel: {
      auto prof = relation_profile(f.rel_name(), f.inv(), f.vars().size(), sig);
      for (std::size_t i = 0; i < prof.size(); ++i)
        if (f.vars()[i].sort != prof[i]) throw rule_error("sort error in R_" + f.rel_name());
      break;
    }
    case FOKind::Leq:
      if (f.vars()[0].sort != FOSort::X || f.vars()[1].sort != FOSort::Y)
        throw rule_error("sort error in <= atom");
      break;
    case FOKind::EAtom:
      if (f.vars()[0].sort != FOSort::Z || f.vars()[1].sort != FOSort::Z)
        throw rule_error("sort error in E atom");
      break;
    case FOKind::Eq:
    case FOKind::Neq:
      if (f.vars()[0].sort != f.vars()[1].sort) throw rule_error("sort error in equality");
      break;
    case FOKind::Pred: {
      FOSort want = f.pred_kind() == '1' ? FOSort::X : f.pred_kind() == '2' ? FOSort::Y : FOSort::Z;
      if (f.vars()[0].sort != want) throw rule_error("sort error in predicate atom");
      break;
    }
    default: break;
  }
  for (const FOFormula& k : f.kids()) sort_check_rec(k, sig);
}

}  // namespace

void sort_check(const FOFormula& f, const ExpandedSignature& sig) { sort_check_rec(f, sig); }

}  // namespace lealba
