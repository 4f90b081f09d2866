#include "stapu/logic/dfa.h"

#include <algorithm>
#include <deque>
#include <map>
#include <utility>

#include "stapu/errors.h"

namespace stapu::logic {
namespace {

constexpr std::size_t kMaxAtoms = 16;
constexpr int kMaxProgressionStates = 200000;

}  // namespace

Dfa::Dfa(std::vector<std::string> atoms, int initial, std::vector<bool> accepting,
         std::vector<int> delta, std::vector<std::string> state_names,
         Fragment fragment)
    : atoms_(std::move(atoms)),
      initial_(initial),
      accepting_(std::move(accepting)),
      delta_(std::move(delta)),
      names_(std::move(state_names)),
      fragment_(fragment) {
  if (names_.size() != accepting_.size())
    names_.resize(accepting_.size());
  if (delta_.size() != accepting_.size() * num_letters())
    throw InputError("dfa transition table has wrong size");
  if (initial_ < 0 || initial_ >= num_states())
    throw InputError("dfa initial state out of range");
  for (int t : delta_)
    if (t < 0 || t >= num_states()) throw InputError("dfa transition target out of range");
}

Letter Dfa::letter_of(const std::set<std::string>& label) const {
  Letter l = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (label.count(atoms_[i])) l |= Letter{1} << i;
  return l;
}

Letter Dfa::letter_of(std::span<const std::string> label) const {
  Letter l = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (std::find(label.begin(), label.end(), atoms_[i]) != label.end())
      l |= Letter{1} << i;
  return l;
}

std::set<std::string> Dfa::label_of(Letter letter) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (letter & (Letter{1} << i)) out.insert(atoms_[i]);
  return out;
}

int Dfa::run(std::span<const Letter> trace) const {
  int q = initial_;
  for (Letter l : trace) q = next(q, l);
  return q;
}

std::optional<int> Dfa::accepting_sink() const {
  for (int q = 0; q < num_states(); ++q) {
    if (!accepting(q)) continue;
    bool absorbing = true;
    for (Letter l = 0; l < num_letters() && absorbing; ++l) absorbing = next(q, l) == q;
    if (absorbing) return q;
  }
  return std::nullopt;
}

std::optional<int> Dfa::rejecting_sink() const {
  for (int q = 0; q < num_states(); ++q) {
    if (accepting(q)) continue;
    bool absorbing = true;
    for (Letter l = 0; l < num_letters() && absorbing; ++l) absorbing = next(q, l) == q;
    if (absorbing) return q;
  }
  return std::nullopt;
}

nlohmann::json Dfa::to_json() const {
  nlohmann::json j;
  j["states"] = nlohmann::json::array();
  for (int q = 0; q < num_states(); ++q) j["states"].push_back(q);
  j["initial"] = initial_;
  j["accepting"] = nlohmann::json::array();
  for (int q = 0; q < num_states(); ++q)
    if (accepting(q)) j["accepting"].push_back(q);
  j["atoms"] = atoms_;
  j["trans"] = nlohmann::json::array();
  for (int q = 0; q < num_states(); ++q) {
    for (Letter l = 0; l < num_letters(); ++l) {
      auto label = label_of(l);
      j["trans"].push_back({{"from", q},
                            {"label", std::vector<std::string>(label.begin(), label.end())},
                            {"to", next(q, l)}});
    }
  }
  return j;
}

Dfa Dfa::from_json(const nlohmann::json& j) {
  try {
    std::vector<int> ids = j.at("states").get<std::vector<int>>();
    std::map<int, int> index;
    for (int id : ids) {
      if (!index.emplace(id, static_cast<int>(index.size())).second)
        throw InputError("duplicate dfa state id " + std::to_string(id));
    }
    auto lookup = [&](int id) {
      auto it = index.find(id);
      if (it == index.end()) throw InputError("unknown dfa state id " + std::to_string(id));
      return it->second;
    };
    auto atoms = j.at("atoms").get<std::vector<std::string>>();
    if (atoms.size() > kMaxAtoms) throw InputError("dfa has too many atoms");
    const std::size_t letters = std::size_t{1} << atoms.size();
    std::vector<bool> accepting(ids.size(), false);
    for (int id : j.at("accepting").get<std::vector<int>>()) accepting[lookup(id)] = true;
    std::vector<int> delta(ids.size() * letters, -1);
    Dfa probe;
    probe.atoms_ = atoms;
    for (const auto& t : j.at("trans")) {
      int from = lookup(t.at("from").get<int>());
      int to = lookup(t.at("to").get<int>());
      Letter l = probe.letter_of(t.at("label").get<std::vector<std::string>>());
      delta[static_cast<std::size_t>(from) * letters + l] = to;
    }
    if (std::find(delta.begin(), delta.end(), -1) != delta.end())
      throw InputError("dfa transition function is not total");
    std::vector<std::string> names;
    for (int id : ids) names.push_back(std::to_string(id));
    return Dfa(std::move(atoms), lookup(j.at("initial").get<int>()), std::move(accepting),
               std::move(delta), std::move(names), Fragment::kCoSafe);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed dfa json: ") + e.what());
  }
}

Dfa compile(const Formula& f) { return compile(f, classify(f)); }

Dfa compile(const Formula& f, Fragment as) {
  if (as == Fragment::kNeither)
    throw InputError("formula is neither syntactically safe nor co-safe: " + f.to_string());
  if (as == Fragment::kCoSafe && !is_syntactically_cosafe(f))
    throw InputError("formula is not syntactically co-safe: " + f.to_string());
  if (as == Fragment::kSafe && !is_syntactically_safe(f))
    throw InputError("formula is not syntactically safe: " + f.to_string());

  auto atom_set = f.atoms();
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  if (atoms.size() > kMaxAtoms) throw InputError("formula uses too many atoms");
  const std::size_t letters = std::size_t{1} << atoms.size();

  std::vector<std::set<std::string>> letter_sets(letters);
  for (Letter l = 0; l < letters; ++l)
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (l & (Letter{1} << i)) letter_sets[l].insert(atoms[i]);

  std::map<std::string, int> index;
  std::vector<Formula> states;
  std::vector<int> delta;
  auto intern = [&](const Formula& g) {
    auto [it, inserted] = index.emplace(g.to_string(), static_cast<int>(states.size()));
    if (inserted) {
      if (states.size() >= static_cast<std::size_t>(kMaxProgressionStates))
        throw SolverError("formula progression produced too many states");
      states.push_back(g);
    }
    return it->second;
  };

  intern(canonical(f));
  for (std::size_t q = 0; q < states.size(); ++q) {
    delta.resize((q + 1) * letters);
    for (Letter l = 0; l < letters; ++l) {
      int to = intern(progress(states[q], letter_sets[l]));
      delta[q * letters + l] = to;
    }
  }

  std::vector<bool> accepting(states.size());
  std::vector<std::string> names;
  for (std::size_t q = 0; q < states.size(); ++q) {
    const Op op = states[q].op();
    accepting[q] = as == Fragment::kCoSafe ? op == Op::kTrue : op != Op::kFalse;
    names.push_back(states[q].to_string());
  }
  return Dfa(std::move(atoms), 0, std::move(accepting), std::move(delta),
             std::move(names), as);
}

Dfa minimize(const Dfa& d) {
  const int n = d.num_states();
  const std::size_t letters = d.num_letters();

  // Reachable states in breadth-first order.
  std::vector<int> order;
  std::vector<bool> seen(n, false);
  std::deque<int> queue{d.initial()};
  seen[d.initial()] = true;
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    order.push_back(q);
    for (Letter l = 0; l < letters; ++l) {
      int t = d.next(q, l);
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
    }
  }

  // Moore refinement: block ids are recomputed from (block, successor blocks)
  // signatures until the number of blocks stops growing.
  std::vector<int> block(n, -1);
  for (int q : order) block[q] = d.accepting(q) ? 1 : 0;
  std::size_t num_blocks = 0;
  while (true) {
    std::map<std::vector<int>, int> sig_index;
    std::vector<int> next_block(n, -1);
    for (int q : order) {
      std::vector<int> sig;
      sig.reserve(letters + 1);
      sig.push_back(block[q]);
      for (Letter l = 0; l < letters; ++l) sig.push_back(block[d.next(q, l)]);
      auto [it, _] = sig_index.emplace(std::move(sig), static_cast<int>(sig_index.size()));
      next_block[q] = it->second;
    }
    block = std::move(next_block);
    if (sig_index.size() == num_blocks) break;
    num_blocks = sig_index.size();
  }

  // Renumber blocks by first appearance in BFS order.
  std::vector<int> renumber(num_blocks, -1);
  std::vector<int> representative;
  for (int q : order) {
    if (renumber[block[q]] < 0) {
      renumber[block[q]] = static_cast<int>(representative.size());
      representative.push_back(q);
    }
  }
  const std::size_t m = representative.size();
  std::vector<bool> accepting(m);
  std::vector<int> delta(m * letters);
  std::vector<std::string> names(m);
  for (std::size_t b = 0; b < m; ++b) {
    int q = representative[b];
    accepting[b] = d.accepting(q);
    names[b] = d.state_name(q);
    for (Letter l = 0; l < letters; ++l) delta[b * letters + l] = renumber[block[d.next(q, l)]];
  }
  return Dfa(d.atoms(), renumber[block[d.initial()]], std::move(accepting), std::move(delta),
             std::move(names), d.fragment());
}

}  // namespace stapu::logic
