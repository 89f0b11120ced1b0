#ifndef LEALBA_SIGNATURE_HPP
#define LEALBA_SIGNATURE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lealba {

// Monotone (1) vs antitone (d) coordinate marker; doubles as a node sign.
enum class Polarity : std::uint8_t { Pos, Neg };

inline Polarity opposite(Polarity p) {
  return p == Polarity::Pos ? Polarity::Neg : Polarity::Pos;
}
inline char polarity_char(Polarity p) { return p == Polarity::Pos ? '1' : 'd'; }
inline char sign_char(Polarity p) { return p == Polarity::Pos ? '+' : '-'; }

class OrderType {
 public:
  OrderType() = default;
  explicit OrderType(std::vector<Polarity> entries) : entries_(std::move(entries)) {}

  std::size_t size() const { return entries_.size(); }
  Polarity at(std::size_t i) const { return entries_.at(i); }  // 0-based
  OrderType opposite_type() const;
  std::string to_string() const;  // "(1,d)"

  bool operator==(const OrderType&) const = default;

 private:
  std::vector<Polarity> entries_;
};

enum class Family : std::uint8_t { F, G };
enum class Mode : std::uint8_t { GeneralLattice, Distributive };

inline char family_char(Family f) { return f == Family::F ? 'F' : 'G'; }

// Where a connective comes from: a user declaration, or the i-th residual of
// a base f (sharp) or base g (flat).
struct ResidualOrigin {
  std::string parent;
  int coordinate = 0;  // 1-based
  bool sharp = false;  // true: f-sharp, false: g-flat
};

struct ConnectiveDecl {
  std::string name;
  Family family = Family::F;
  int arity = 0;
  OrderType order_type;
  std::optional<ResidualOrigin> origin;  // nullopt for base connectives

  bool is_base() const { return !origin.has_value(); }
};

class Signature {
 public:
  explicit Signature(Mode mode = Mode::GeneralLattice) : mode_(mode) {}

  void add(ConnectiveDecl decl);  // throws signature_error on bad names
  const std::vector<ConnectiveDecl>& declarations() const { return decls_; }
  const ConnectiveDecl* find(std::string_view name) const;
  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

 private:
  std::vector<ConnectiveDecl> decls_;
  std::unordered_map<std::string, std::size_t> index_;
  Mode mode_ = Mode::GeneralLattice;
};

// Base signature plus all first-level residuals f_sharp_i / g_flat_i.
class ExpandedSignature {
 public:
  ExpandedSignature() = default;

  const Signature& base() const { return base_; }
  const std::vector<ConnectiveDecl>& residuals() const { return residuals_; }
  Mode mode() const { return base_.mode(); }

  const ConnectiveDecl* find(std::string_view name) const;
  const ConnectiveDecl& at(std::string_view name) const;  // throws

  // The unique f_sharp_i / g_flat_i of a base connective; i is 1-based.
  const ConnectiveDecl& residual_of(std::string_view base_name, int i) const;

  friend ExpandedSignature expand_signature(const Signature& sig);

 private:
  Signature base_;
  std::vector<ConnectiveDecl> residuals_;
  std::unordered_map<std::string, std::size_t> residual_index_;
};

ExpandedSignature expand_signature(const Signature& sig);

// Signature file format, line based:
//   mode lattice | mode distributive   (optional first line, default lattice)
//   <family> <name> <arity> (<p1>,...,<pn>)   with family in {F,G}, p in {1,d}
//   '#' starts a comment.
Signature parse_signature_text(std::string_view text);
Signature load_signature_file(const std::string& path);

}  // namespace lealba

#endif
