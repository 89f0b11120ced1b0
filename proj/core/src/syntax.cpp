#include "lealba/syntax.hpp"

#include <cctype>
#include <functional>
#include <sstream>

#include "lealba/errors.hpp"

namespace lealba {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula Formula::make(FKind k, std::string name, std::vector<Formula> args) {
  std::size_t h = hash_combine(static_cast<std::size_t>(k) + 1, std::hash<std::string>{}(name));
  for (const Formula& a : args) h = hash_combine(h, a.hash());
  auto node = std::make_shared<Node>(Node{k, std::move(name), std::move(args), h});
  return Formula(std::move(node));
}

Formula Formula::var(std::string name) { return make(FKind::Var, std::move(name), {}); }
Formula Formula::top() { return make(FKind::Top, "", {}); }
Formula Formula::bot() { return make(FKind::Bot, "", {}); }
Formula Formula::meet(Formula a, Formula b) { return make(FKind::Meet, "", {std::move(a), std::move(b)}); }
Formula Formula::join(Formula a, Formula b) { return make(FKind::Join, "", {std::move(a), std::move(b)}); }
Formula Formula::app(std::string name, std::vector<Formula> args) {
  return make(FKind::App, std::move(name), std::move(args));
}
Formula Formula::nominal(std::string name) { return make(FKind::Nominal, std::move(name), {}); }
Formula Formula::conominal(std::string name) { return make(FKind::Conominal, std::move(name), {}); }

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  if (node_->hash != o.node_->hash) return false;
  if (node_->kind != o.node_->kind || node_->name != o.node_->name) return false;
  if (node_->args.size() != o.node_->args.size()) return false;
  for (std::size_t i = 0; i < node_->args.size(); ++i)
    if (node_->args[i] != o.node_->args[i]) return false;
  return true;
}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Nominal, Conominal, Top, Bot, Meet, Join, LPar, RPar, Comma, Leq, Amp, Arrow, End };

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  Tok tok = Tok::End;
  std::string text;

  explicit Lexer(std::string_view s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg + " at offset " + std::to_string(pos) + " in: " + std::string(src));
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    text.clear();
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = src[pos];
    if (c == '#' || c == '@') {
      // '#' followed by an identifier is a nominal; otherwise it starts a comment.
      if (c == '#' && (pos + 1 >= src.size() || !ident_start(src[pos + 1]))) {
        pos = src.size();
        tok = Tok::End;
        return;
      }
      ++pos;
      if (pos >= src.size() || !ident_start(src[pos])) fail("expected identifier after sigil");
      std::size_t b = pos;
      while (pos < src.size() && ident_char(src[pos])) ++pos;
      text = std::string(src.substr(b, pos - b));
      tok = c == '#' ? Tok::Nominal : Tok::Conominal;
      return;
    }
    if (ident_start(c)) {
      std::size_t b = pos;
      while (pos < src.size() && ident_char(src[pos])) ++pos;
      text = std::string(src.substr(b, pos - b));
      if (text == "top")
        tok = Tok::Top;
      else if (text == "bot")
        tok = Tok::Bot;
      else
        tok = Tok::Ident;
      return;
    }
    auto two = src.substr(pos, 2);
    if (two == "/\\") { tok = Tok::Meet; pos += 2; return; }
    if (two == "\\/") { tok = Tok::Join; pos += 2; return; }
    if (two == "<=") { tok = Tok::Leq; pos += 2; return; }
    if (two == "=>") { tok = Tok::Arrow; pos += 2; return; }
    switch (c) {
      case '(': tok = Tok::LPar; ++pos; return;
      case ')': tok = Tok::RPar; ++pos; return;
      case ',': tok = Tok::Comma; ++pos; return;
      case '&': tok = Tok::Amp; ++pos; return;
      default: fail(std::string("unexpected character '") + c + "'");
    }
  }
};

struct Parser {
  Lexer lex;
  const ExpandedSignature& sig;
  ParseOptions opts;

  Parser(std::string_view s, const ExpandedSignature& g, ParseOptions o) : lex(s), sig(g), opts(o) {}

  void expect(Tok t, const char* what) {
    if (lex.tok != t) lex.fail(std::string("expected ") + what);
    lex.next();
  }

  Formula atom() {
    switch (lex.tok) {
      case Tok::Top: lex.next(); return Formula::top();
      case Tok::Bot: lex.next(); return Formula::bot();
      case Tok::LPar: {
        lex.next();
        Formula f = formula();
        expect(Tok::RPar, "')'");
        return f;
      }
      case Tok::Nominal: {
        if (!opts.allow_expanded) lex.fail("nominal not allowed in base-language context");
        std::string n = lex.text;
        lex.next();
        return Formula::nominal(n);
      }
      case Tok::Conominal: {
        if (!opts.allow_expanded) lex.fail("co-nominal not allowed in base-language context");
        std::string n = lex.text;
        lex.next();
        return Formula::conominal(n);
      }
      case Tok::Ident: {
        std::string n = lex.text;
        lex.next();
        const ConnectiveDecl* d = sig.find(n);
        if (lex.tok == Tok::LPar) {
          if (!d) lex.fail("unknown connective '" + n + "'");
          if (!opts.allow_expanded && !d->is_base())
            lex.fail("expanded connective '" + n + "' not allowed in base-language context");
          lex.next();
          std::vector<Formula> args;
          if (lex.tok != Tok::RPar) {
            args.push_back(formula());
            while (lex.tok == Tok::Comma) {
              lex.next();
              args.push_back(formula());
            }
          }
          expect(Tok::RPar, "')'");
          if (static_cast<int>(args.size()) != d->arity)
            lex.fail("connective '" + n + "' expects " + std::to_string(d->arity) + " arguments, got " +
                     std::to_string(args.size()));
          return Formula::app(n, std::move(args));
        }
        if (d) {
          if (d->arity == 0) {
            if (!opts.allow_expanded && !d->is_base())
              lex.fail("expanded connective '" + n + "' not allowed in base-language context");
            return Formula::app(n, {});
          }
          lex.fail("connective '" + n + "' used without arguments");
        }
        return Formula::var(n);
      }
      default: lex.fail("expected a formula");
    }
  }

  Formula meet_level() {
    Formula f = atom();
    while (lex.tok == Tok::Meet) {
      lex.next();
      f = Formula::meet(std::move(f), atom());
    }
    return f;
  }

  Formula formula() {
    Formula f = meet_level();
    while (lex.tok == Tok::Join) {
      lex.next();
      f = Formula::join(std::move(f), meet_level());
    }
    return f;
  }

  Inequality inequality() {
    Formula l = formula();
    expect(Tok::Leq, "'<='");
    Formula r = formula();
    return Inequality{std::move(l), std::move(r)};
  }

  QuasiInequality quasi() {
    std::vector<Inequality> items;
    items.push_back(inequality());
    while (lex.tok == Tok::Amp) {
      lex.next();
      items.push_back(inequality());
    }
    QuasiInequality q;
    if (lex.tok == Tok::Arrow) {
      lex.next();
      q.premises = std::move(items);
      q.conclusion = inequality();
    } else {
      if (items.size() != 1) lex.fail("expected '=>' after premises");
      q.conclusion = std::move(items.front());
    }
    return q;
  }

  void done() {
    if (lex.tok != Tok::End) lex.fail("trailing input");
  }
};

}  // namespace

Formula parse_formula(std::string_view text, const ExpandedSignature& sig, ParseOptions opts) {
  Parser p(text, sig, opts);
  Formula f = p.formula();
  p.done();
  return f;
}

Inequality parse_inequality(std::string_view text, const ExpandedSignature& sig, ParseOptions opts) {
  Parser p(text, sig, opts);
  Inequality i = p.inequality();
  p.done();
  return i;
}

QuasiInequality parse_quasi(std::string_view text, const ExpandedSignature& sig, ParseOptions opts) {
  Parser p(text, sig, opts);
  QuasiInequality q = p.quasi();
  p.done();
  return q;
}

// ---------------------------------------------------------------- printer

namespace {

// precedence: join 1, meet 2, atoms 3
int prec(const Formula& f) {
  switch (f.kind()) {
    case FKind::Join: return 1;
    case FKind::Meet: return 2;
    default: return 3;
  }
}

void print_rec(const Formula& f, int parent_prec, bool right_child, std::string& out) {
  int p = prec(f);
  bool need = p < parent_prec || (p == parent_prec && right_child && p < 3);
  if (need) out += '(';
  switch (f.kind()) {
    case FKind::Var: out += f.name(); break;
    case FKind::Top: out += "top"; break;
    case FKind::Bot: out += "bot"; break;
    case FKind::Nominal: out += '#'; out += f.name(); break;
    case FKind::Conominal: out += '@'; out += f.name(); break;
    case FKind::Meet:
      print_rec(f.args()[0], 2, false, out);
      out += " /\\ ";
      print_rec(f.args()[1], 2, true, out);
      break;
    case FKind::Join:
      print_rec(f.args()[0], 1, false, out);
      out += " \\/ ";
      print_rec(f.args()[1], 1, true, out);
      break;
    case FKind::App:
      out += f.name();
      out += '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) out += ", ";
        print_rec(f.args()[i], 0, false, out);
      }
      out += ')';
      break;
  }
  if (need) out += ')';
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  print_rec(f, 0, false, out);
  return out;
}

std::string print_inequality(const Inequality& i) {
  return print_formula(i.lhs) + " <= " + print_formula(i.rhs);
}

std::string print_quasi(const QuasiInequality& q) {
  std::string out;
  for (std::size_t i = 0; i < q.premises.size(); ++i) {
    if (i) out += " & ";
    out += print_inequality(q.premises[i]);
  }
  if (!q.premises.empty()) out += " => ";
  out += print_inequality(q.conclusion);
  return out;
}

// ---------------------------------------------------------------- utilities

bool is_pure(const Formula& f) {
  if (f.kind() == FKind::Var) return false;
  for (const Formula& a : f.args())
    if (!is_pure(a)) return false;
  return true;
}

bool is_pure(const Inequality& i) { return is_pure(i.lhs) && is_pure(i.rhs); }

bool is_pure(const QuasiInequality& q) {
  for (const Inequality& p : q.premises)
    if (!is_pure(p)) return false;
  return is_pure(q.conclusion);
}

Formula substitute(const Formula& f, const std::string& var, const Formula& repl) {
  switch (f.kind()) {
    case FKind::Var: return f.name() == var ? repl : f;
    case FKind::Top:
    case FKind::Bot:
    case FKind::Nominal:
    case FKind::Conominal: return f;
    case FKind::Meet:
      return Formula::meet(substitute(f.args()[0], var, repl), substitute(f.args()[1], var, repl));
    case FKind::Join:
      return Formula::join(substitute(f.args()[0], var, repl), substitute(f.args()[1], var, repl));
    case FKind::App: {
      std::vector<Formula> args;
      args.reserve(f.args().size());
      for (const Formula& a : f.args()) args.push_back(substitute(a, var, repl));
      return Formula::app(f.name(), std::move(args));
    }
  }
  return f;
}

Inequality substitute(const Inequality& i, const std::string& var, const Formula& repl) {
  return Inequality{substitute(i.lhs, var, repl), substitute(i.rhs, var, repl)};
}

namespace {

void walk_signed(const Formula& f, Polarity sign, const ExpandedSignature& sig,
                 const std::function<void(const Formula&, Polarity)>& visit) {
  visit(f, sign);
  switch (f.kind()) {
    case FKind::Meet:
    case FKind::Join:
      walk_signed(f.args()[0], sign, sig, visit);
      walk_signed(f.args()[1], sign, sig, visit);
      break;
    case FKind::App: {
      const ConnectiveDecl& d = sig.at(f.name());
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        Polarity child = d.order_type.at(i) == Polarity::Pos ? sign : opposite(sign);
        walk_signed(f.args()[i], child, sig, visit);
      }
      break;
    }
    default: break;
  }
}

}  // namespace

std::vector<std::pair<std::string, Polarity>> occurrences(const Formula& f, Polarity root,
                                                          const ExpandedSignature& sig) {
  std::vector<std::pair<std::string, Polarity>> out;
  walk_signed(f, root, sig, [&](const Formula& n, Polarity s) {
    if (n.kind() == FKind::Var) out.emplace_back(n.name(), s);
  });
  return out;
}

bool positive_in(const Formula& f, const std::string& p, const ExpandedSignature& sig) {
  for (const auto& [v, s] : occurrences(f, Polarity::Pos, sig))
    if (v == p && s == Polarity::Neg) return false;
  return true;
}

bool negative_in(const Formula& f, const std::string& p, const ExpandedSignature& sig) {
  for (const auto& [v, s] : occurrences(f, Polarity::Pos, sig))
    if (v == p && s == Polarity::Pos) return false;
  return true;
}

bool contains_var(const Formula& f, const std::string& p) {
  if (f.kind() == FKind::Var) return f.name() == p;
  for (const Formula& a : f.args())
    if (contains_var(a, p)) return true;
  return false;
}

bool contains_var(const Inequality& i, const std::string& p) {
  return contains_var(i.lhs, p) || contains_var(i.rhs, p);
}

namespace {

void collect_leaves(const Formula& f, FKind kind, std::vector<std::string>& out) {
  if (f.kind() == kind) {
    for (const std::string& s : out)
      if (s == f.name()) return;
    out.push_back(f.name());
    return;
  }
  for (const Formula& a : f.args()) collect_leaves(a, kind, out);
}

}  // namespace

std::vector<std::string> variables_of(const Formula& f) {
  std::vector<std::string> out;
  collect_leaves(f, FKind::Var, out);
  return out;
}

std::vector<std::string> variables_of(const Inequality& i) {
  std::vector<std::string> out;
  collect_leaves(i.lhs, FKind::Var, out);
  collect_leaves(i.rhs, FKind::Var, out);
  return out;
}

std::vector<std::string> nominals_of(const Formula& f) {
  std::vector<std::string> out;
  collect_leaves(f, FKind::Nominal, out);
  return out;
}

std::vector<std::string> conominals_of(const Formula& f) {
  std::vector<std::string> out;
  collect_leaves(f, FKind::Conominal, out);
  return out;
}

void validate(const Formula& f, const ExpandedSignature& sig) {
  if (f.kind() == FKind::App) {
    const ConnectiveDecl& d = sig.at(f.name());
    if (static_cast<int>(f.args().size()) != d.arity)
      throw signature_error("arity mismatch for '" + f.name() + "'");
  }
  for (const Formula& a : f.args()) validate(a, sig);
}

}  // namespace lealba
