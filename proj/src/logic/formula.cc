#include "stapu/logic/formula.h"

#include <algorithm>
#include <utility>

#include "stapu/errors.h"

namespace stapu::logic {

struct Formula::Node {
  Op op = Op::kTrue;
  std::string atom;
  std::vector<Formula> children;
};

namespace {

const std::string kEmpty;

// Guards the DNF normal form against pathological blowup.
constexpr std::size_t kMaxClauses = 1 << 14;

}  // namespace

Formula::Formula() : Formula(True()) {}

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::True() {
  static const Formula t(std::make_shared<const Node>(Node{Op::kTrue, {}, {}}));
  return t;
}

Formula Formula::False() {
  static const Formula f(
      std::make_shared<const Node>(Node{Op::kFalse, {}, {}}));
  return f;
}

Formula Formula::Atom(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Op::kAtom, std::move(name), {}}));
}

Formula Formula::NegAtom(std::string name) {
  return Formula(
      std::make_shared<const Node>(Node{Op::kNegAtom, std::move(name), {}}));
}

Formula Formula::And(Formula lhs, Formula rhs) {
  return And(std::vector<Formula>{std::move(lhs), std::move(rhs)});
}

Formula Formula::Or(Formula lhs, Formula rhs) {
  return Or(std::vector<Formula>{std::move(lhs), std::move(rhs)});
}

Formula Formula::And(std::vector<Formula> children) {
  if (children.empty()) return True();
  if (children.size() == 1) return children.front();
  return Formula(
      std::make_shared<const Node>(Node{Op::kAnd, {}, std::move(children)}));
}

Formula Formula::Or(std::vector<Formula> children) {
  if (children.empty()) return False();
  if (children.size() == 1) return children.front();
  return Formula(
      std::make_shared<const Node>(Node{Op::kOr, {}, std::move(children)}));
}

Formula Formula::Next(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Op::kNext, {}, {std::move(f)}}));
}

Formula Formula::Eventually(Formula f) {
  return Formula(
      std::make_shared<const Node>(Node{Op::kEventually, {}, {std::move(f)}}));
}

Formula Formula::Always(Formula f) {
  return Formula(
      std::make_shared<const Node>(Node{Op::kAlways, {}, {std::move(f)}}));
}

Formula Formula::Until(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Op::kUntil, {}, {std::move(lhs), std::move(rhs)}}));
}

Op Formula::op() const noexcept { return node_->op; }

const std::string& Formula::atom() const noexcept {
  return (op() == Op::kAtom || op() == Op::kNegAtom) ? node_->atom : kEmpty;
}

std::span<const Formula> Formula::children() const noexcept {
  return node_->children;
}

bool Formula::is_temporal() const noexcept {
  switch (op()) {
    case Op::kNext:
    case Op::kEventually:
    case Op::kAlways:
    case Op::kUntil:
      return true;
    default:
      return false;
  }
}

int Formula::depth() const {
  int d = 0;
  for (const auto& c : children()) d = std::max(d, 1 + c.depth());
  return d;
}

std::set<std::string> Formula::atoms() const {
  std::set<std::string> out;
  if (op() == Op::kAtom || op() == Op::kNegAtom) out.insert(atom());
  for (const auto& c : children()) {
    auto sub = c.atoms();
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::string Formula::to_string() const {
  switch (op()) {
    case Op::kTrue:
      return "true";
    case Op::kFalse:
      return "false";
    case Op::kAtom:
      return atom();
    case Op::kNegAtom:
      return "!" + atom();
    case Op::kAnd:
    case Op::kOr: {
      const char* sep = op() == Op::kAnd ? " & " : " | ";
      std::string s = "(";
      for (std::size_t i = 0; i < children().size(); ++i) {
        if (i) s += sep;
        s += children()[i].to_string();
      }
      return s + ")";
    }
    case Op::kNext:
      return "X " + child(0).to_string();
    case Op::kEventually:
      return "F " + child(0).to_string();
    case Op::kAlways:
      return "G " + child(0).to_string();
    case Op::kUntil:
      return "(" + child(0).to_string() + " U " + child(1).to_string() + ")";
  }
  return {};
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0) return c;
  if (auto c = a.atom().compare(b.atom()); c != 0)
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  auto ac = a.children();
  auto bc = b.children();
  return std::lexicographical_compare_three_way(ac.begin(), ac.end(),
                                                bc.begin(), bc.end());
}

std::string_view to_string(Fragment f) {
  switch (f) {
    case Fragment::kCoSafe:
      return "co-safe";
    case Fragment::kSafe:
      return "safe";
    case Fragment::kNeither:
      return "neither";
  }
  return "neither";
}

Formula to_pnf(const Formula& f) {
  // The AST has no general negation node, so only rebuild children.
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kAtom:
    case Op::kNegAtom:
      return f;
    case Op::kAnd:
    case Op::kOr: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(to_pnf(c));
      return f.op() == Op::kAnd ? Formula::And(std::move(cs))
                                : Formula::Or(std::move(cs));
    }
    case Op::kNext:
      return Formula::Next(to_pnf(f.child(0)));
    case Op::kEventually:
      return Formula::Eventually(to_pnf(f.child(0)));
    case Op::kAlways:
      return Formula::Always(to_pnf(f.child(0)));
    case Op::kUntil:
      return Formula::Until(to_pnf(f.child(0)), to_pnf(f.child(1)));
  }
  return f;
}

bool is_pnf(const Formula&) {
  // Negation is representable only on atoms.
  return true;
}

namespace {

bool uses_only(const Formula& f, bool allow_f_u, bool allow_g) {
  switch (f.op()) {
    case Op::kEventually:
    case Op::kUntil:
      if (!allow_f_u) return false;
      break;
    case Op::kAlways:
      if (!allow_g) return false;
      break;
    default:
      break;
  }
  for (const auto& c : f.children())
    if (!uses_only(c, allow_f_u, allow_g)) return false;
  return true;
}

}  // namespace

bool is_syntactically_cosafe(const Formula& f) {
  return is_pnf(f) && uses_only(f, /*allow_f_u=*/true, /*allow_g=*/false);
}

bool is_syntactically_safe(const Formula& f) {
  return is_pnf(f) && uses_only(f, /*allow_f_u=*/false, /*allow_g=*/true);
}

Fragment classify(const Formula& f) {
  if (is_syntactically_cosafe(f)) return Fragment::kCoSafe;
  if (is_syntactically_safe(f)) return Fragment::kSafe;
  return Fragment::kNeither;
}

namespace {

using Clause = std::vector<Formula>;  // sorted, unique leaves
using Dnf = std::vector<Clause>;      // sorted, unique, absorption-reduced

bool is_subset(const Clause& small, const Clause& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

Dnf reduce(Dnf clauses) {
  std::sort(clauses.begin(), clauses.end(),
            [](const Clause& a, const Clause& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  Dnf kept;
  for (auto& c : clauses) {
    bool absorbed = false;
    for (const auto& k : kept) {
      if (is_subset(k, c)) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) kept.push_back(std::move(c));
  }
  if (kept.size() > kMaxClauses)
    throw SolverError("formula normal form exceeds clause limit");
  std::sort(kept.begin(), kept.end());
  return kept;
}

Formula canonical_leaf(const Formula& f);

Dnf to_dnf(const Formula& f) {
  switch (f.op()) {
    case Op::kAnd: {
      Dnf acc{Clause{}};
      for (const auto& c : f.children()) {
        Dnf rhs = to_dnf(c);
        Dnf next;
        for (const auto& a : acc) {
          for (const auto& b : rhs) {
            Clause merged;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                           std::back_inserter(merged));
            next.push_back(std::move(merged));
          }
        }
        acc = reduce(std::move(next));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Op::kOr: {
      Dnf acc;
      for (const auto& c : f.children()) {
        Dnf rhs = to_dnf(c);
        acc.insert(acc.end(), std::make_move_iterator(rhs.begin()),
                   std::make_move_iterator(rhs.end()));
      }
      return reduce(std::move(acc));
    }
    default: {
      Formula leaf = canonical_leaf(f);
      if (leaf.op() == Op::kTrue) return Dnf{Clause{}};
      if (leaf.op() == Op::kFalse) return Dnf{};
      if (leaf.op() == Op::kAnd || leaf.op() == Op::kOr) return to_dnf(leaf);
      return Dnf{Clause{leaf}};
    }
  }
}

Formula from_dnf(const Dnf& dnf) {
  if (dnf.empty()) return Formula::False();
  std::vector<Formula> disjuncts;
  for (const auto& clause : dnf) {
    if (clause.empty()) return Formula::True();
    disjuncts.push_back(Formula::And(clause));
  }
  return Formula::Or(std::move(disjuncts));
}

// Canonicalizes a non-boolean node. May return a constant or, when a
// temporal operator folds away, a boolean formula.
Formula canonical_leaf(const Formula& f) {
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kAtom:
    case Op::kNegAtom:
      return f;
    case Op::kNext: {
      Formula c = canonical(f.child(0));
      if (c.is_constant()) return c;
      return Formula::Next(c);
    }
    case Op::kEventually: {
      Formula c = canonical(f.child(0));
      if (c.is_constant() || c.op() == Op::kEventually) return c;
      return Formula::Eventually(c);
    }
    case Op::kAlways: {
      Formula c = canonical(f.child(0));
      if (c.is_constant() || c.op() == Op::kAlways) return c;
      return Formula::Always(c);
    }
    case Op::kUntil: {
      Formula lhs = canonical(f.child(0));
      Formula rhs = canonical(f.child(1));
      if (rhs.is_constant()) return rhs;
      if (lhs.op() == Op::kFalse || lhs == rhs) return rhs;
      if (lhs.op() == Op::kTrue)
        return rhs.op() == Op::kEventually ? rhs : Formula::Eventually(rhs);
      return Formula::Until(lhs, rhs);
    }
    case Op::kAnd:
    case Op::kOr:
      return canonical(f);
  }
  return f;
}

Formula progress_raw(const Formula& f, const std::set<std::string>& letter) {
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
      return f;
    case Op::kAtom:
      return letter.count(f.atom()) ? Formula::True() : Formula::False();
    case Op::kNegAtom:
      return letter.count(f.atom()) ? Formula::False() : Formula::True();
    case Op::kAnd:
    case Op::kOr: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(progress_raw(c, letter));
      return f.op() == Op::kAnd ? Formula::And(std::move(cs))
                                : Formula::Or(std::move(cs));
    }
    case Op::kNext:
      return f.child(0);
    case Op::kEventually:
      return Formula::Or(progress_raw(f.child(0), letter), f);
    case Op::kAlways:
      return Formula::And(progress_raw(f.child(0), letter), f);
    case Op::kUntil:
      return Formula::Or(
          progress_raw(f.child(1), letter),
          Formula::And(progress_raw(f.child(0), letter), f));
  }
  return f;
}

}  // namespace

Formula canonical(const Formula& f) {
  if (f.op() != Op::kAnd && f.op() != Op::kOr) {
    Formula leaf = canonical_leaf(f);
    if (leaf.op() != Op::kAnd && leaf.op() != Op::kOr) return leaf;
  }
  return from_dnf(to_dnf(f));
}

Formula progress(const Formula& f, const std::set<std::string>& letter) {
  return canonical(progress_raw(f, letter));
}

}  // namespace stapu::logic
