#ifndef LEALBA_ERRORS_HPP
#define LEALBA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lealba {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad concrete syntax: formulas, signature files, model files.
struct parse_error : error {
  using error::error;
};

// Ill-formed signature: duplicate names, reserved substrings, arity mismatch.
struct signature_error : error {
  using error::error;
};

// Model file or operation table fails validation (poset/lattice/normality).
struct model_error : error {
  using error::error;
};

// A rewrite rule was applied where its side conditions do not hold.
struct rule_error : error {
  using error::error;
};

}  // namespace lealba

#endif
