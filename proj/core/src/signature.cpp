#include "lealba/signature.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "lealba/errors.hpp"

namespace lealba {

OrderType OrderType::opposite_type() const {
  std::vector<Polarity> out;
  out.reserve(entries_.size());
  for (Polarity p : entries_) out.push_back(opposite(p));
  return OrderType(std::move(out));
}

std::string OrderType::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ',';
    s += polarity_char(entries_[i]);
  }
  s += ')';
  return s;
}

namespace {

bool valid_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool reserved_word(std::string_view s) { return s == "top" || s == "bot"; }

}  // namespace

void Signature::add(ConnectiveDecl decl) {
  if (!valid_ident(decl.name))
    throw signature_error("bad connective name: '" + decl.name + "'");
  if (reserved_word(decl.name))
    throw signature_error("connective name '" + decl.name + "' is reserved");
  if (decl.is_base() && (decl.name.find("_sharp_") != std::string::npos ||
                         decl.name.find("_flat_") != std::string::npos))
    throw signature_error("declared name '" + decl.name +
                          "' must not contain '_sharp_' or '_flat_'");
  if (decl.order_type.size() != static_cast<std::size_t>(decl.arity))
    throw signature_error("order-type length does not match arity of '" + decl.name + "'");
  if (index_.count(decl.name))
    throw signature_error("duplicate connective name: '" + decl.name + "'");
  index_.emplace(decl.name, decls_.size());
  decls_.push_back(std::move(decl));
}

const ConnectiveDecl* Signature::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const ConnectiveDecl* ExpandedSignature::find(std::string_view name) const {
  if (const ConnectiveDecl* d = base_.find(name)) return d;
  auto it = residual_index_.find(std::string(name));
  return it == residual_index_.end() ? nullptr : &residuals_[it->second];
}

const ConnectiveDecl& ExpandedSignature::at(std::string_view name) const {
  const ConnectiveDecl* d = find(name);
  if (!d) throw signature_error("unknown connective: '" + std::string(name) + "'");
  return *d;
}

const ConnectiveDecl& ExpandedSignature::residual_of(std::string_view base_name, int i) const {
  const ConnectiveDecl* parent = base_.find(base_name);
  if (!parent) throw signature_error("unknown base connective: '" + std::string(base_name) + "'");
  if (i < 1 || i > parent->arity)
    throw signature_error("residual coordinate out of range for '" + std::string(base_name) + "'");
  std::string suffix = (parent->family == Family::F ? "_sharp_" : "_flat_") + std::to_string(i);
  return at(std::string(base_name) + suffix);
}

ExpandedSignature expand_signature(const Signature& sig) {
  ExpandedSignature out;
  out.base_ = sig;
  for (const ConnectiveDecl& d : sig.declarations()) {
    for (int i = 1; i <= d.arity; ++i) {
      ConnectiveDecl r;
      bool sharp = d.family == Family::F;
      r.name = d.name + (sharp ? "_sharp_" : "_flat_") + std::to_string(i);
      r.origin = ResidualOrigin{d.name, i, sharp};
      r.arity = d.arity;
      Polarity ei = d.order_type.at(static_cast<std::size_t>(i - 1));
      // Family: f_sharp_i lands in G* iff eps_f(i)=1; g_flat_i in F* iff eps_g(i)=1.
      if (sharp)
        r.family = ei == Polarity::Pos ? Family::G : Family::F;
      else
        r.family = ei == Polarity::Pos ? Family::F : Family::G;
      // Order type: coordinate i keeps eps(i); the others flip iff eps(i)=1.
      std::vector<Polarity> ot;
      ot.reserve(static_cast<std::size_t>(d.arity));
      for (int j = 1; j <= d.arity; ++j) {
        Polarity ej = d.order_type.at(static_cast<std::size_t>(j - 1));
        if (j == i)
          ot.push_back(ei);
        else
          ot.push_back(ei == Polarity::Pos ? opposite(ej) : ej);
      }
      r.order_type = OrderType(std::move(ot));
      if (sig.find(r.name))
        throw signature_error("residual name collides with declared connective: '" + r.name + "'");
      out.residual_index_.emplace(r.name, out.residuals_.size());
      out.residuals_.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

OrderType parse_order_type(const std::string& tok, const std::string& line) {
  if (tok.size() < 2 || tok.front() != '(' || tok.back() != ')')
    throw parse_error("bad order-type '" + tok + "' in line: " + line);
  std::vector<Polarity> ps;
  std::string body = tok.substr(1, tok.size() - 2);
  if (!body.empty()) {
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part == "1")
        ps.push_back(Polarity::Pos);
      else if (part == "d")
        ps.push_back(Polarity::Neg);
      else
        throw parse_error("bad polarity '" + part + "' in line: " + line);
    }
  }
  return OrderType(std::move(ps));
}

}  // namespace

Signature parse_signature_text(std::string_view text) {
  Signature sig;
  std::stringstream in{std::string(text)};
  std::string line;
  bool first_content = true;
  while (std::getline(in, line)) {
    std::stringstream ls(strip_comment(line));
    std::string tok;
    if (!(ls >> tok)) continue;
    if (first_content && tok == "mode") {
      std::string m;
      if (!(ls >> m) || (m != "lattice" && m != "distributive"))
        throw parse_error("bad mode line: " + line);
      sig.set_mode(m == "lattice" ? Mode::GeneralLattice : Mode::Distributive);
      first_content = false;
      continue;
    }
    first_content = false;
    ConnectiveDecl d;
    if (tok == "F")
      d.family = Family::F;
    else if (tok == "G")
      d.family = Family::G;
    else
      throw parse_error("expected family F or G in line: " + line);
    std::string arity_tok, ot_tok;
    if (!(ls >> d.name >> arity_tok >> ot_tok))
      throw parse_error("expected '<family> <name> <arity> (<polarities>)' in line: " + line);
    try {
      d.arity = std::stoi(arity_tok);
    } catch (...) {
      throw parse_error("bad arity '" + arity_tok + "' in line: " + line);
    }
    if (d.arity < 0) throw parse_error("negative arity in line: " + line);
    d.order_type = parse_order_type(ot_tok, line);
    std::string extra;
    if (ls >> extra) throw parse_error("trailing tokens in line: " + line);
    sig.add(std::move(d));
  }
  return sig;
}

Signature load_signature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open signature file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_signature_text(ss.str());
}

}  // namespace lealba
