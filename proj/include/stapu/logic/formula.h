#pragma once

#include <compare>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stapu::logic {

enum class Op {
  kTrue,
  kFalse,
  kAtom,
  kNegAtom,
  kAnd,
  kOr,
  kNext,
  kEventually,
  kAlways,
  kUntil,
};

/// Immutable LTL syntax tree. Copies share structure.
///
/// And/Or nodes are n-ary; the parser produces binary ones and
/// `canonical()` flattens them.
class Formula {
 public:
  Formula();  // true

  static Formula True();
  static Formula False();
  static Formula Atom(std::string name);
  static Formula NegAtom(std::string name);
  static Formula And(Formula lhs, Formula rhs);
  static Formula Or(Formula lhs, Formula rhs);
  static Formula And(std::vector<Formula> children);
  static Formula Or(std::vector<Formula> children);
  static Formula Next(Formula f);
  static Formula Eventually(Formula f);
  static Formula Always(Formula f);
  static Formula Until(Formula lhs, Formula rhs);

  Op op() const noexcept;
  /// Atom name; empty unless op() is kAtom or kNegAtom.
  const std::string& atom() const noexcept;
  std::span<const Formula> children() const noexcept;
  const Formula& child(std::size_t i) const { return children()[i]; }

  bool is_constant() const noexcept {
    return op() == Op::kTrue || op() == Op::kFalse;
  }
  bool is_temporal() const noexcept;

  /// AST height; literals and constants have depth 0.
  int depth() const;
  std::set<std::string> atoms() const;

  /// Fully parenthesized text in the surface syntax; parse(to_string(f)) == f.
  std::string to_string() const;

  /// Structural total order: by operator, then atom name, then children.
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

enum class Fragment { kCoSafe, kSafe, kNeither };

std::string_view to_string(Fragment f);

/// Pushes negation onto atoms. Negated constants fold to constants.
Formula to_pnf(const Formula& f);

bool is_pnf(const Formula& f);
/// Only X, F and U temporal operators (and PNF).
bool is_syntactically_cosafe(const Formula& f);
/// Only G and X temporal operators (and PNF).
bool is_syntactically_safe(const Formula& f);

/// CoSafe when the formula qualifies as co-safe, else Safe when it qualifies
/// as safe, else Neither. Purely propositional or X-only formulas are in both
/// fragments and report CoSafe; pass the intended fragment to `compile` to
/// treat them as safety constraints.
Fragment classify(const Formula& f);

/// Normal form used as DFA state identity: constant folding on temporal
/// operators, then a positive disjunctive normal form over temporal/literal
/// leaves with sorted, deduplicated, absorption-reduced clauses.
Formula canonical(const Formula& f);

/// One step of formula progression over a letter (the set of atoms that
/// hold). The result is canonical.
Formula progress(const Formula& f, const std::set<std::string>& letter);

}  // namespace stapu::logic
