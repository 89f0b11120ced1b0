#include "lealba/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "lealba/errors.hpp"

namespace lealba {

// ------------------------------------------------------------------ lattice

FiniteLattice FiniteLattice::from_order(std::vector<std::string> names,
                                        const std::vector<std::pair<std::string, std::string>>& below) {
  FiniteLattice lat;
  lat.n_ = static_cast<int>(names.size());
  lat.names_ = std::move(names);
  if (lat.n_ == 0) throw model_error("empty lattice");
  int n = lat.n_;
  lat.leq_.assign(static_cast<std::size_t>(n * n), 0);
  auto at = [&](int a, int b) -> char& { return lat.leq_[static_cast<std::size_t>(a * n + b)]; };
  for (int i = 0; i < n; ++i) at(i, i) = 1;
  for (const auto& [a, b] : below) {
    int ia = lat.index_of(a), ib = lat.index_of(b);
    if (ia < 0 || ib < 0) throw model_error("unknown element in order pair " + a + "<=" + b);
    at(ia, ib) = 1;
  }
  // transitive closure
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (at(i, k))
        for (int j = 0; j < n; ++j)
          if (at(k, j)) at(i, j) = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (at(i, j) && at(j, i)) throw model_error("order is not antisymmetric");

  lat.join_.assign(static_cast<std::size_t>(n * n), -1);
  lat.meet_.assign(static_cast<std::size_t>(n * n), -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int lub = -1, glb = -1;
      for (int c = 0; c < n; ++c) {
        if (at(a, c) && at(b, c) && (lub < 0 || at(c, lub))) lub = c;
        if (at(c, a) && at(c, b) && (glb < 0 || at(glb, c))) glb = c;
      }
      // verify minimality/maximality (existence of a least upper bound)
      if (lub < 0 || glb < 0) throw model_error("not a lattice: missing bound");
      for (int c = 0; c < n; ++c) {
        if (at(a, c) && at(b, c) && !at(lub, c)) throw model_error("not a lattice: joins not unique");
        if (at(c, a) && at(c, b) && !at(c, glb)) throw model_error("not a lattice: meets not unique");
      }
      lat.join_[static_cast<std::size_t>(a * n + b)] = lub;
      lat.meet_[static_cast<std::size_t>(a * n + b)] = glb;
    }
  lat.bot_ = 0;
  lat.top_ = 0;
  for (int c = 0; c < n; ++c) {
    bool is_bot = true, is_top = true;
    for (int d = 0; d < n; ++d) {
      if (!at(c, d)) is_top = false;  // note: names swapped below
      if (!at(d, c)) is_bot = false;
    }
    if (is_top) lat.bot_ = c;  // c below everything
    if (is_bot) lat.top_ = c;
  }
  if (!at(lat.bot_, lat.top_)) throw model_error("lattice is not bounded");

  // join-irreducible: exactly one lower cover, bottom excluded (dual for meet).
  auto covers_below = [&](int x) {
    std::vector<int> out;
    for (int c = 0; c < n; ++c) {
      if (c == x || !at(c, x)) continue;
      bool cover = true;
      for (int d = 0; d < n; ++d)
        if (d != c && d != x && at(c, d) && at(d, x)) cover = false;
      if (cover) out.push_back(c);
    }
    return out;
  };
  auto covers_above = [&](int x) {
    std::vector<int> out;
    for (int c = 0; c < n; ++c) {
      if (c == x || !at(x, c)) continue;
      bool cover = true;
      for (int d = 0; d < n; ++d)
        if (d != c && d != x && at(x, d) && at(d, c)) cover = false;
      if (cover) out.push_back(c);
    }
    return out;
  };
  for (int x = 0; x < n; ++x) {
    if (x != lat.bot_ && covers_below(x).size() == 1) lat.jirr_.push_back(x);
    if (x != lat.top_ && covers_above(x).size() == 1) lat.mirr_.push_back(x);
  }
  return lat;
}

int FiniteLattice::index_of(const std::string& name) const {
  for (int i = 0; i < n_; ++i)
    if (names_[static_cast<std::size_t>(i)] == name) return i;
  return -1;
}

FiniteLattice FiniteLattice::chain(int k) {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> below;
  for (int i = 0; i < k; ++i) names.push_back("e" + std::to_string(i));
  for (int i = 0; i + 1 < k; ++i) below.emplace_back(names[static_cast<std::size_t>(i)],
                                                     names[static_cast<std::size_t>(i + 1)]);
  return from_order(std::move(names), below);
}

FiniteLattice FiniteLattice::diamond4() {
  return from_order({"0", "a", "b", "1"}, {{"0", "a"}, {"0", "b"}, {"a", "1"}, {"b", "1"}});
}

FiniteLattice FiniteLattice::pentagon() {
  return from_order({"0", "a", "b", "c", "1"},
                    {{"0", "a"}, {"a", "1"}, {"0", "b"}, {"b", "c"}, {"c", "1"}});
}

FiniteLattice FiniteLattice::m3() {
  return from_order({"0", "a", "b", "c", "1"},
                    {{"0", "a"}, {"0", "b"}, {"0", "c"}, {"a", "1"}, {"b", "1"}, {"c", "1"}});
}

FiniteLattice FiniteLattice::two_atom5() {
  return from_order({"0", "x", "y", "a", "1"},
                    {{"0", "x"}, {"0", "y"}, {"x", "a"}, {"y", "a"}, {"a", "1"}});
}

// ------------------------------------------------------------------ normality

namespace {

// Iterate all argument tuples of the given arity.
void for_each_tuple(int n, int arity, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> args(static_cast<std::size_t>(arity), 0);
  while (true) {
    fn(args);
    int i = arity - 1;
    while (i >= 0 && ++args[static_cast<std::size_t>(i)] == n) {
      args[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
}

}  // namespace

bool normality_check(const FiniteLattice& lat, const ConnectiveDecl& decl, const OpTable& table) {
  int n = lat.size();
  bool ok = true;
  bool is_f = decl.family == Family::F;
  for (int i = 0; i < decl.arity && ok; ++i) {
    bool pos = decl.order_type.at(static_cast<std::size_t>(i)) == Polarity::Pos;
    for_each_tuple(n, decl.arity, [&](const std::vector<int>& args) {
      if (!ok) return;
      // unit law
      std::vector<int> u = args;
      u[static_cast<std::size_t>(i)] = (is_f == pos) ? lat.bot() : lat.top();
      int unit = is_f ? lat.bot() : lat.top();
      if (table.at(u, n) != unit) {
        ok = false;
        return;
      }
      // binary law over all pairs in coordinate i
      for (int a = 0; a < n && ok; ++a)
        for (int b = 0; b < n && ok; ++b) {
          std::vector<int> ta = args, tb = args, tc = args;
          ta[static_cast<std::size_t>(i)] = a;
          tb[static_cast<std::size_t>(i)] = b;
          int combined = (is_f == pos) ? lat.join(a, b) : lat.meet(a, b);
          tc[static_cast<std::size_t>(i)] = combined;
          int lhs = table.at(tc, n);
          int rhs = is_f ? lat.join(table.at(ta, n), table.at(tb, n))
                         : lat.meet(table.at(ta, n), table.at(tb, n));
          if (lhs != rhs) ok = false;
        }
    });
  }
  return ok;
}

bool normality_check_scan(const FiniteLattice& lat, const ConnectiveDecl& decl, const OpTable& table) {
  int n = lat.size();
  if (n > 16) throw model_error("scan route limited to small lattices");
  bool ok = true;
  bool is_f = decl.family == Family::F;
  for (int i = 0; i < decl.arity && ok; ++i) {
    bool pos = decl.order_type.at(static_cast<std::size_t>(i)) == Polarity::Pos;
    for_each_tuple(n, decl.arity, [&](const std::vector<int>& args) {
      if (!ok) return;
      // f at eps=1 turns arbitrary finite joins in the coordinate into joins;
      // the other three cases are the evident variants.
      for (std::uint32_t mask = 0; mask < (1u << n) && ok; ++mask) {
        int combined = (is_f == pos) ? lat.bot() : lat.top();
        int image = is_f ? lat.bot() : lat.top();
        for (int e = 0; e < n; ++e) {
          if (!(mask & (1u << e))) continue;
          combined = (is_f == pos) ? lat.join(combined, e) : lat.meet(combined, e);
          std::vector<int> t = args;
          t[static_cast<std::size_t>(i)] = e;
          image = is_f ? lat.join(image, table.at(t, n)) : lat.meet(image, table.at(t, n));
        }
        std::vector<int> tc = args;
        tc[static_cast<std::size_t>(i)] = combined;
        if (table.at(tc, n) != image) ok = false;
      }
    });
  }
  return ok;
}

// ------------------------------------------------------------------ expansion

namespace {

// Residual tables from the adjunctions, e.g. for eps_f(i)=1:
//   f_sharp_i(.., b@i, ..) = join{ c : f(.., c@i, ..) <= b }.
OpTable residual_table(const FiniteLattice& lat, const ConnectiveDecl& parent, int coord,
                       const OpTable& parent_table) {
  int n = lat.size();
  OpTable out;
  out.arity = parent.arity;
  std::size_t cells = 1;
  for (int i = 0; i < out.arity; ++i) cells *= static_cast<std::size_t>(n);
  out.cells.assign(cells, 0);
  bool is_f = parent.family == Family::F;
  bool pos = parent.order_type.at(static_cast<std::size_t>(coord - 1)) == Polarity::Pos;
  for_each_tuple(n, parent.arity, [&](const std::vector<int>& args) {
    int b = args[static_cast<std::size_t>(coord - 1)];
    // f, eps=1: join of solutions; f, eps=d: meet; g, eps=1: meet; g, eps=d: join.
    bool join_mode = is_f == pos;
    int acc = join_mode ? lat.bot() : lat.top();
    for (int c = 0; c < n; ++c) {
      std::vector<int> t = args;
      t[static_cast<std::size_t>(coord - 1)] = c;
      bool solves = is_f ? lat.leq(parent_table.at(t, n), b) : lat.leq(b, parent_table.at(t, n));
      if (!solves) continue;
      acc = join_mode ? lat.join(acc, c) : lat.meet(acc, c);
    }
    std::size_t idx = 0;
    for (int a : args) idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(a);
    out.cells[idx] = acc;
  });
  return out;
}

}  // namespace

FiniteLE FiniteLE::make(FiniteLattice lat, const ExpandedSignature& sig,
                        std::map<std::string, OpTable> base_tables) {
  FiniteLE m;
  m.lat_ = std::move(lat);
  m.sig_ = &sig;
  for (const ConnectiveDecl& d : sig.base().declarations()) {
    auto it = base_tables.find(d.name);
    if (it == base_tables.end()) throw model_error("missing operation table for '" + d.name + "'");
    std::size_t want = 1;
    for (int i = 0; i < d.arity; ++i) want *= static_cast<std::size_t>(m.lat_.size());
    if (it->second.arity != d.arity || it->second.cells.size() != want)
      throw model_error("operation table for '" + d.name + "' has the wrong shape");
    for (int v : it->second.cells)
      if (v < 0 || v >= m.lat_.size()) throw model_error("table cell out of range for '" + d.name + "'");
    if (!normality_check(m.lat_, d, it->second))
      throw model_error("operation table for '" + d.name + "' violates normality");
    m.tables_.emplace(d.name, it->second);
  }
  for (const ConnectiveDecl& r : sig.residuals()) {
    const ConnectiveDecl& parent = sig.at(r.origin->parent);
    m.tables_.emplace(r.name, residual_table(m.lat_, parent, r.origin->coordinate,
                                             m.tables_.at(parent.name)));
  }
  return m;
}

const OpTable& FiniteLE::table(const std::string& name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw model_error("no operation table for '" + name + "'");
  return it->second;
}

// ------------------------------------------------------------------ evaluation

int eval(const Formula& f, const FiniteLE& m, const Assignment& a) {
  const FiniteLattice& lat = m.lattice();
  switch (f.kind()) {
    case FKind::Top: return lat.top();
    case FKind::Bot: return lat.bot();
    case FKind::Var: {
      auto it = a.vars.find(f.name());
      if (it == a.vars.end()) throw model_error("unassigned variable '" + f.name() + "'");
      return it->second;
    }
    case FKind::Nominal: {
      auto it = a.nominals.find(f.name());
      if (it == a.nominals.end()) throw model_error("unassigned nominal '" + f.name() + "'");
      return it->second;
    }
    case FKind::Conominal: {
      auto it = a.conominals.find(f.name());
      if (it == a.conominals.end()) throw model_error("unassigned co-nominal '" + f.name() + "'");
      return it->second;
    }
    case FKind::Meet: return lat.meet(eval(f.args()[0], m, a), eval(f.args()[1], m, a));
    case FKind::Join: return lat.join(eval(f.args()[0], m, a), eval(f.args()[1], m, a));
    case FKind::App: {
      std::vector<int> args;
      args.reserve(f.args().size());
      for (const Formula& arg : f.args()) args.push_back(eval(arg, m, a));
      return m.table(f.name()).at(args, lat.size());
    }
  }
  throw model_error("unreachable");
}

namespace {

bool holds(const Inequality& i, const FiniteLE& m, const Assignment& a) {
  return m.lattice().leq(eval(i.lhs, m, a), eval(i.rhs, m, a));
}

// Iterate maps name -> value over the given ranges, lexicographically.
bool all_assignments(const std::vector<std::string>& names, const std::vector<int>& range,
                     Assignment& a, std::map<std::string, int> Assignment::*field,
                     const std::function<bool()>& fn) {
  if (names.empty()) return fn();
  if (range.empty()) return true;  // empty range: vacuously true
  std::vector<std::size_t> pick(names.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < names.size(); ++i) (a.*field)[names[i]] = range[pick[i]];
    if (!fn()) return false;
    std::size_t i = names.size();
    while (i-- > 0) {
      if (++pick[i] < range.size()) break;
      pick[i] = 0;
      if (i == 0) return true;
    }
  }
}

std::vector<int> full_range(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

void guard_vars(std::size_t vars, int n) {
  if (n > 5 && vars > static_cast<std::size_t>(kMaxBruteForceVars))
    throw model_error("too many propositional variables for brute force on this lattice");
}

std::vector<std::string> collect_all_vars(const std::vector<Inequality>& premises,
                                          const Inequality& concl) {
  std::vector<std::string> out;
  auto add = [&](const std::vector<std::string>& in) {
    for (const std::string& s : in)
      if (std::find(out.begin(), out.end(), s) == std::end(out)) out.push_back(s);
  };
  for (const Inequality& p : premises) add(variables_of(p));
  add(variables_of(concl));
  return out;
}

std::vector<std::string> collect_sorted_atoms(const std::vector<Inequality>& premises,
                                              const Inequality& concl, bool nominal) {
  std::vector<std::string> out;
  auto add = [&](const Formula& f) {
    for (const std::string& s : nominal ? nominals_of(f) : conominals_of(f))
      if (std::find(out.begin(), out.end(), s) == std::end(out)) out.push_back(s);
  };
  for (const Inequality& p : premises) {
    add(p.lhs);
    add(p.rhs);
  }
  add(concl.lhs);
  add(concl.rhs);
  return out;
}

}  // namespace

bool valid(const Inequality& ineq, const FiniteLE& m) {
  std::vector<std::string> vars = variables_of(ineq);
  guard_vars(vars.size(), m.lattice().size());
  Assignment a;
  return all_assignments(vars, full_range(m.lattice().size()), a, &Assignment::vars,
                         [&] { return holds(ineq, m, a); });
}

bool valid_quasi(const QuasiInequality& q, const FiniteLE& m) {
  if (!is_pure(q)) throw model_error("valid_quasi expects a pure quasi-inequality");
  std::vector<std::string> noms = collect_sorted_atoms(q.premises, q.conclusion, true);
  std::vector<std::string> conoms = collect_sorted_atoms(q.premises, q.conclusion, false);
  Assignment a;
  return all_assignments(noms, m.lattice().join_irreducibles(), a, &Assignment::nominals, [&] {
    return all_assignments(conoms, m.lattice().meet_irreducibles(), a, &Assignment::conominals, [&] {
      for (const Inequality& p : q.premises)
        if (!holds(p, m, a)) return true;  // premises not met: instance holds
      return holds(q.conclusion, m, a);
    });
  });
}

bool valid_system(const std::vector<Inequality>& premises, const Inequality& conclusion,
                  const FiniteLE& m) {
  std::vector<std::string> vars = collect_all_vars(premises, conclusion);
  guard_vars(vars.size(), m.lattice().size());
  std::vector<std::string> noms = collect_sorted_atoms(premises, conclusion, true);
  std::vector<std::string> conoms = collect_sorted_atoms(premises, conclusion, false);
  Assignment a;
  return all_assignments(vars, full_range(m.lattice().size()), a, &Assignment::vars, [&] {
    return all_assignments(noms, m.lattice().join_irreducibles(), a, &Assignment::nominals, [&] {
      return all_assignments(conoms, m.lattice().meet_irreducibles(), a, &Assignment::conominals, [&] {
        for (const Inequality& p : premises)
          if (!holds(p, m, a)) return true;
        return holds(conclusion, m, a);
      });
    });
  });
}

bool check_equivalence(const Inequality& ineq, const std::vector<QuasiInequality>& outputs,
                       const FiniteLE& m) {
  bool in_valid = valid(ineq, m);
  bool out_valid = true;
  for (const QuasiInequality& q : outputs)
    if (!valid_quasi(q, m)) {
      out_valid = false;
      break;
    }
  return in_valid == out_valid;
}

// ------------------------------------------------------------------ enumeration

namespace {

// Backtracking enumeration of normal tables for one connective; deterministic
// cell order, values tried in increasing order.
class TableSearch {
 public:
  TableSearch(const FiniteLattice& lat, const ConnectiveDecl& decl, int cap)
      : lat_(lat), decl_(decl), cap_(cap) {
    cells_ = 1;
    for (int i = 0; i < decl.arity; ++i) cells_ *= static_cast<std::size_t>(lat.size());
    tuples_.reserve(cells_);
    std::vector<int> args(static_cast<std::size_t>(decl.arity), 0);
    for (std::size_t c = 0; c < cells_; ++c) {
      tuples_.push_back(args);
      int i = decl.arity - 1;
      while (i >= 0 && ++args[static_cast<std::size_t>(i)] == lat.size()) {
        args[static_cast<std::size_t>(i)] = 0;
        --i;
      }
    }
  }

  std::vector<OpTable> run() {
    OpTable t;
    t.arity = decl_.arity;
    t.cells.assign(cells_, -1);
    rec(t, 0);
    return std::move(found_);
  }

 private:
  // forced value by the unit laws, or -1
  int forced(const std::vector<int>& args) const {
    bool is_f = decl_.family == Family::F;
    for (int i = 0; i < decl_.arity; ++i) {
      bool pos = decl_.order_type.at(static_cast<std::size_t>(i)) == Polarity::Pos;
      int unit_arg = (is_f == pos) ? lat_.bot() : lat_.top();
      if (args[static_cast<std::size_t>(i)] == unit_arg) return is_f ? lat_.bot() : lat_.top();
    }
    return -1;
  }

  bool monotone_ok(const OpTable& t, std::size_t upto) const {
    // eps-monotonicity against earlier cells
    const std::vector<int>& cur = tuples_[upto];
    for (std::size_t o = 0; o < upto; ++o) {
      const std::vector<int>& other = tuples_[o];
      bool le = true, ge = true;
      for (int i = 0; i < decl_.arity; ++i) {
        bool pos = decl_.order_type.at(static_cast<std::size_t>(i)) == Polarity::Pos;
        int a = other[static_cast<std::size_t>(i)], b = cur[static_cast<std::size_t>(i)];
        bool ab = pos ? lat_.leq(a, b) : lat_.leq(b, a);
        bool ba = pos ? lat_.leq(b, a) : lat_.leq(a, b);
        le &= ab;
        ge &= ba;
      }
      int vo = t.cells[static_cast<std::size_t>(
          [&] {
            std::size_t idx = 0;
            for (int a : other) idx = idx * static_cast<std::size_t>(lat_.size()) + static_cast<std::size_t>(a);
            return idx;
          }())];
      int vc = t.cells[static_cast<std::size_t>(
          [&] {
            std::size_t idx = 0;
            for (int a : cur) idx = idx * static_cast<std::size_t>(lat_.size()) + static_cast<std::size_t>(a);
            return idx;
          }())];
      bool is_f = decl_.family == Family::F;
      // f is monotone w.r.t. the eps-order; g antitone-free: both are
      // eps-monotone as maps into the lattice (f) or into it as well (g).
      (void)is_f;
      if (le && !lat_.leq(vo, vc)) return false;
      if (ge && !lat_.leq(vc, vo)) return false;
    }
    return true;
  }

  void rec(OpTable& t, std::size_t cell) {
    if (static_cast<int>(found_.size()) >= cap_) return;
    if (cell == cells_) {
      if (normality_check(lat_, decl_, t)) found_.push_back(t);
      return;
    }
    const std::vector<int>& args = tuples_[cell];
    std::size_t idx = 0;
    for (int a : args) idx = idx * static_cast<std::size_t>(lat_.size()) + static_cast<std::size_t>(a);
    int f = forced(args);
    for (int v = 0; v < lat_.size(); ++v) {
      if (f >= 0 && v != f) continue;
      t.cells[idx] = v;
      if (monotone_ok(t, cell)) rec(t, cell + 1);
      if (static_cast<int>(found_.size()) >= cap_) break;
    }
    t.cells[idx] = -1;
  }

  const FiniteLattice& lat_;
  const ConnectiveDecl& decl_;
  int cap_;
  std::size_t cells_ = 0;
  std::vector<std::vector<int>> tuples_;
  std::vector<OpTable> found_;
};

}  // namespace

ModelEnumerator::ModelEnumerator(FiniteLattice lat, const ExpandedSignature& sig,
                                 int per_connective_cap)
    : lat_(std::move(lat)), sig_(&sig) {
  for (const ConnectiveDecl& d : sig.base().declarations()) {
    names_.push_back(d.name);
    TableSearch search(lat_, d, per_connective_cap);
    tables_.push_back(search.run());
    if (tables_.back().empty()) done_ = true;
  }
  idx_.assign(tables_.size(), 0);
}

std::optional<FiniteLE> ModelEnumerator::next() {
  if (done_) return std::nullopt;
  if (!first_) {
    // advance mixed-radix counter, last connective fastest
    std::size_t i = idx_.size();
    if (i == 0) {
      done_ = true;  // nullary signature: single empty model already produced
      return std::nullopt;
    }
    while (i-- > 0) {
      if (++idx_[i] < tables_[i].size()) break;
      idx_[i] = 0;
      if (i == 0) {
        done_ = true;
        return std::nullopt;
      }
    }
  }
  first_ = false;
  std::map<std::string, OpTable> base;
  for (std::size_t i = 0; i < names_.size(); ++i) base.emplace(names_[i], tables_[i][idx_[i]]);
  return FiniteLE::make(lat_, *sig_, std::move(base));
}

std::vector<std::pair<std::string, FiniteLattice>> builtin_lattices() {
  return {
      {"chain2", FiniteLattice::chain(2)},   {"chain3", FiniteLattice::chain(3)},
      {"diamond4", FiniteLattice::diamond4()}, {"pentagon", FiniteLattice::pentagon()},
      {"m3", FiniteLattice::m3()},           {"two_atom5", FiniteLattice::two_atom5()},
  };
}

std::vector<std::pair<std::string, FiniteLE>> builtin_suite(const ExpandedSignature& sig,
                                                            int per_lattice) {
  std::vector<std::pair<std::string, FiniteLE>> out;
  for (auto& [name, lat] : builtin_lattices()) {
    ModelEnumerator en(lat, sig, 64);
    for (int k = 0; k < per_lattice; ++k) {
      auto m = en.next();
      if (!m) break;
      out.emplace_back(name + "#" + std::to_string(k), std::move(*m));
    }
  }
  return out;
}

// ------------------------------------------------------------------ model files

FiniteLE parse_model_text(const std::string& text, const ExpandedSignature& sig) {
  std::stringstream in(text);
  std::string line;
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> below;
  struct Cell {
    std::string op;
    std::vector<std::string> args;
    std::string value;
  };
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "elements:") {
      std::string e;
      while (ls >> e) elements.push_back(e);
    } else if (tok == "leq:") {
      std::string pair;
      while (ls >> pair) {
        auto pos = pair.find("<=");
        if (pos == std::string::npos) throw parse_error("bad leq token: " + pair);
        below.emplace_back(pair.substr(0, pos), pair.substr(pos + 2));
      }
    } else if (tok == "op") {
      std::string name;
      if (!(ls >> name) || name.empty() || name.back() != ':')
        throw parse_error("bad op line: " + line);
      name.pop_back();
      Cell c;
      c.op = name;
      std::string t;
      bool seen_eq = false;
      while (ls >> t) {
        if (t == "=") {
          seen_eq = true;
        } else if (seen_eq) {
          if (!c.value.empty()) throw parse_error("bad op line: " + line);
          c.value = t;
        } else {
          c.args.push_back(t);
        }
      }
      if (!seen_eq || c.value.empty()) throw parse_error("bad op line: " + line);
      cells.push_back(std::move(c));
    } else {
      throw parse_error("bad model line: " + line);
    }
  }
  if (elements.empty()) throw model_error("model file declares no elements");
  FiniteLattice lat = FiniteLattice::from_order(elements, below);
  int n = lat.size();
  std::map<std::string, OpTable> tables;
  for (const ConnectiveDecl& d : sig.base().declarations()) {
    OpTable t;
    t.arity = d.arity;
    std::size_t want = 1;
    for (int i = 0; i < d.arity; ++i) want *= static_cast<std::size_t>(n);
    t.cells.assign(want, -1);
    tables.emplace(d.name, std::move(t));
  }
  for (const Cell& c : cells) {
    auto it = tables.find(c.op);
    if (it == tables.end()) throw model_error("unknown operation '" + c.op + "'");
    if (static_cast<int>(c.args.size()) != it->second.arity)
      throw model_error("wrong argument count for op '" + c.op + "'");
    std::size_t idx = 0;
    for (const std::string& a : c.args) {
      int e = lat.index_of(a);
      if (e < 0) throw model_error("unknown element '" + a + "'");
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(e);
    }
    int v = lat.index_of(c.value);
    if (v < 0) throw model_error("unknown element '" + c.value + "'");
    it->second.cells[idx] = v;
  }
  for (auto& [name, t] : tables)
    for (int v : t.cells)
      if (v < 0) throw model_error("missing table cell for operation '" + name + "'");
  return FiniteLE::make(std::move(lat), sig, std::move(tables));
}

FiniteLE load_model_file(const std::string& path, const ExpandedSignature& sig) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), sig);
}

}  // namespace lealba
