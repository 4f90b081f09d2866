#include "support/ltl_oracle.h"

#include <algorithm>

namespace stapu::testing {
namespace {

using logic::Formula;
using logic::Op;

bool eval(const Formula& f, const Trace& w, std::size_t i, bool weak) {
  const std::size_t n = w.size();
  // Every position at or past the end evaluates identically, so the last
  // position any quantifier needs to look at is max(i, n).
  const std::size_t last = std::max(i, n);
  switch (f.op()) {
    case Op::kTrue:
      return true;
    case Op::kFalse:
      return false;
    case Op::kAtom:
      return i < n ? w[i].count(f.atom()) > 0 : weak;
    case Op::kNegAtom:
      return i < n ? w[i].count(f.atom()) == 0 : weak;
    case Op::kAnd:
      for (const auto& c : f.children())
        if (!eval(c, w, i, weak)) return false;
      return true;
    case Op::kOr:
      for (const auto& c : f.children())
        if (eval(c, w, i, weak)) return true;
      return false;
    case Op::kNext:
      return eval(f.child(0), w, std::min(i + 1, last + 1), weak);
    case Op::kEventually:
      for (std::size_t j = i; j <= last; ++j)
        if (eval(f.child(0), w, j, weak)) return true;
      return false;
    case Op::kAlways:
      for (std::size_t j = i; j <= last; ++j)
        if (!eval(f.child(0), w, j, weak)) return false;
      return true;
    case Op::kUntil:
      for (std::size_t j = i; j <= last; ++j) {
        if (eval(f.child(1), w, j, weak)) return true;
        if (!eval(f.child(0), w, j, weak)) return false;
      }
      return false;
  }
  return false;
}

struct FamilyBuilder {
  bool cosafe;

  std::vector<Formula> leaves() const {
    return {Formula::Atom("p"), Formula::Atom("q"), Formula::Atom("r"),
            Formula::NegAtom("p"), Formula::True()};
  }

  void unary(const Formula& f, std::vector<Formula>& out) const {
    out.push_back(Formula::Next(f));
    out.push_back(cosafe ? Formula::Eventually(f) : Formula::Always(f));
  }

  void binary(const Formula& a, const Formula& b, std::vector<Formula>& out) const {
    out.push_back(Formula::And(a, b));
    out.push_back(Formula::Or(a, b));
    if (cosafe) out.push_back(Formula::Until(a, b));
  }
};

std::vector<Formula> family(bool cosafe) {
  FamilyBuilder fb{cosafe};
  const auto leaves = fb.leaves();
  std::vector<Formula> d1;
  for (const auto& a : leaves) fb.unary(a, d1);
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = 0; j < leaves.size(); ++j)
      if (i != j) fb.binary(leaves[i], leaves[j], d1);

  std::vector<Formula> d2;
  for (const auto& f : d1) fb.unary(f, d2);
  const std::vector<Formula> small = {Formula::Atom("p"), Formula::Atom("q"),
                                      Formula::NegAtom("p")};
  for (const auto& f : d1) {
    for (const auto& g : small) {
      fb.binary(f, g, d2);
      if (cosafe) d2.push_back(Formula::Until(g, f));
    }
  }

  // Depth 3: every fourth depth-2 formula under a unary operator, plus a
  // sparser set of binary combinations with the remaining atom.
  std::vector<Formula> d3;
  for (std::size_t k = 0; k < d2.size(); k += 4) fb.unary(d2[k], d3);
  for (std::size_t k = 1; k < d2.size(); k += 9) {
    fb.binary(d2[k], Formula::Atom("r"), d3);
    fb.binary(d2[k], d1[k % d1.size()], d3);
  }

  std::vector<Formula> out;
  out.insert(out.end(), leaves.begin(), leaves.end());
  out.insert(out.end(), d1.begin(), d1.end());
  out.insert(out.end(), d2.begin(), d2.end());
  out.insert(out.end(), d3.begin(), d3.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](const Formula& f) {
    return f.depth() > 3 || (cosafe ? !logic::is_syntactically_cosafe(f)
                                    : !logic::is_syntactically_safe(f));
  });
  return out;
}

}  // namespace

bool holds_strong(const logic::Formula& f, const Trace& w, std::size_t i) {
  return eval(f, w, i, /*weak=*/false);
}

bool holds_weak(const logic::Formula& f, const Trace& w, std::size_t i) {
  return eval(f, w, i, /*weak=*/true);
}

std::vector<logic::Formula> cosafe_family() { return family(true); }
std::vector<logic::Formula> safe_family() { return family(false); }

void for_each_trace(const std::vector<std::string>& atoms, std::size_t max_len,
                    const std::function<void(const Trace&)>& visit) {
  const std::size_t letters = std::size_t{1} << atoms.size();
  Trace w;
  std::function<void()> rec = [&] {
    visit(w);
    if (w.size() == max_len) return;
    for (std::size_t l = 0; l < letters; ++l) {
      std::set<std::string> s;
      for (std::size_t i = 0; i < atoms.size(); ++i)
        if (l & (std::size_t{1} << i)) s.insert(atoms[i]);
      w.push_back(std::move(s));
      rec();
      w.pop_back();
    }
  };
  rec();
}

int run(const logic::Dfa& d, const Trace& w) {
  int q = d.initial();
  for (const auto& s : w) q = d.next(q, d.letter_of(s));
  return q;
}

}  // namespace stapu::testing
