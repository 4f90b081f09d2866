#include "stapu/mdp/mdp.h"

#include <algorithm>
#include <cmath>
#include <deque>

#include "stapu/errors.h"

namespace stapu::mdp {

void Mdp::resize(int num_states) {
  choices_.resize(num_states);
  labels_.resize(num_states);
}

ActionId Mdp::intern_action(const std::string& name) {
  if (auto a = find_action(name)) return *a;
  actions_.push_back(name);
  return static_cast<ActionId>(actions_.size() - 1);
}

std::optional<ActionId> Mdp::find_action(const std::string& name) const {
  auto it = std::find(actions_.begin(), actions_.end(), name);
  if (it == actions_.end()) return std::nullopt;
  return static_cast<ActionId>(it - actions_.begin());
}

int Mdp::intern_atom(const std::string& name) {
  auto it = std::find(atoms_.begin(), atoms_.end(), name);
  if (it != atoms_.end()) return static_cast<int>(it - atoms_.begin());
  atoms_.push_back(name);
  return static_cast<int>(atoms_.size() - 1);
}

std::set<std::string> Mdp::label_names(StateId s) const {
  std::set<std::string> out;
  for (int a : label(s)) out.insert(atoms_[a]);
  return out;
}

void Mdp::add_label(StateId s, const std::string& atom) {
  const int a = intern_atom(atom);
  auto& l = labels_.at(s);
  auto it = std::lower_bound(l.begin(), l.end(), a);
  if (it == l.end() || *it != a) l.insert(it, a);
}

void Mdp::set_choice(StateId s, Choice c) {
  auto& cs = choices_.at(s);
  auto it = std::lower_bound(cs.begin(), cs.end(), c.action,
                             [](const Choice& x, ActionId a) { return x.action < a; });
  if (c.cost != 0.0) has_costs_ = true;
  if (it != cs.end() && it->action == c.action) {
    *it = std::move(c);
  } else {
    cs.insert(it, std::move(c));
  }
}

void Mdp::add_choice(StateId s, const std::string& action, std::vector<Outcome> outcomes,
                     double cost) {
  set_choice(s, Choice{intern_action(action), std::move(outcomes), cost});
}

const Choice* Mdp::find_choice(StateId s, ActionId a) const {
  const auto& cs = choices_.at(s);
  auto it = std::lower_bound(cs.begin(), cs.end(), a,
                             [](const Choice& x, ActionId id) { return x.action < id; });
  return it != cs.end() && it->action == a ? &*it : nullptr;
}

std::size_t Mdp::num_transitions() const {
  std::size_t n = 0;
  for (const auto& cs : choices_)
    for (const auto& c : cs) n += c.outcomes.size();
  return n;
}

Mdp Mdp::with_initial(StateId s) const {
  if (s < 0 || s >= num_states()) throw InputError("initial state out of range");
  Mdp copy = *this;
  copy.initial_ = s;
  return copy;
}

std::vector<Diagnostic> validate(const Mdp& m) {
  std::vector<Diagnostic> out;
  const int n = m.num_states();
  for (StateId s = 0; s < n; ++s) {
    for (const auto& c : m.choices(s)) {
      double sum = 0.0;
      bool targets_ok = true;
      for (const auto& o : c.outcomes) {
        if (o.to < 0 || o.to >= n) {
          targets_ok = false;
          out.push_back({Diagnostic::Kind::kBadTarget, s, c.action,
                         "state " + std::to_string(s) + " action '" + m.action_name(c.action) +
                             "' targets out-of-range state " + std::to_string(o.to)});
        }
        if (!(o.p > 0.0) || o.p > 1.0 + kProbabilityTolerance) {
          out.push_back({Diagnostic::Kind::kBadProbability, s, c.action,
                         "state " + std::to_string(s) + " action '" + m.action_name(c.action) +
                             "' has probability " + std::to_string(o.p) + " outside (0,1]"});
        }
        sum += o.p;
      }
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        out.push_back({Diagnostic::Kind::kProbabilitySum, s, c.action,
                       "state " + std::to_string(s) + " action '" + m.action_name(c.action) +
                           "' probabilities sum to " + std::to_string(sum)});
      }
      if (targets_ok && m.is_failure(s)) {
        for (const auto& o : c.outcomes) {
          if (o.to != s) {
            out.push_back({Diagnostic::Kind::kFailureNotAbsorbing, s, c.action,
                           "failure state " + std::to_string(s) + " leaves via action '" +
                               m.action_name(c.action) + "'"});
            break;
          }
        }
      }
    }
  }
  if (n > 0 && m.initial() >= 0 && m.initial() < n) {
    std::vector<bool> seen(n, false);
    std::deque<StateId> q{m.initial()};
    seen[m.initial()] = true;
    while (!q.empty()) {
      StateId s = q.front();
      q.pop_front();
      for (const auto& c : m.choices(s))
        for (const auto& o : c.outcomes)
          if (o.to >= 0 && o.to < n && !seen[o.to]) {
            seen[o.to] = true;
            q.push_back(o.to);
          }
    }
    for (StateId s = 0; s < n; ++s) {
      // The failure state is allowed to be unreachable (e.g. no failure points).
      if (!seen[s] && !m.is_failure(s))
        out.push_back({Diagnostic::Kind::kUnreachable, s, std::nullopt,
                       "state " + std::to_string(s) + " is unreachable"});
    }
  }
  return out;
}

Mdp from_json(const nlohmann::json& j) {
  Mdp m;
  try {
    const int n = j.at("states").get<int>();
    if (n <= 0) throw InputError("model must have at least one state");
    m.resize(n);
    const int init = j.at("initial").get<int>();
    if (init < 0 || init >= n) throw InputError("initial state out of range");
    m.set_initial(init);
    for (const auto& a : j.value("atoms", nlohmann::json::array()))
      m.intern_atom(a.get<std::string>());
    if (j.contains("labels")) {
      for (const auto& [key, atoms] : j.at("labels").items()) {
        const int s = std::stoi(key);
        if (s < 0 || s >= n) throw InputError("label for out-of-range state " + key);
        for (const auto& a : atoms) {
          const auto name = a.get<std::string>();
          if (std::find(m.atoms().begin(), m.atoms().end(), name) == m.atoms().end())
            throw InputError("label uses undeclared atom '" + name + "'");
          m.add_label(s, name);
        }
      }
    }
    if (j.contains("failure_state") && !j.at("failure_state").is_null()) {
      const int f = j.at("failure_state").get<int>();
      if (f < 0 || f >= n) throw InputError("failure_state out of range");
      m.set_failure_state(f);
    }
    for (const auto& a : j.value("actions", nlohmann::json::array()))
      m.intern_action(a.get<std::string>());
    for (const auto& t : j.at("trans")) {
      const int from = t.at("from").get<int>();
      if (from < 0 || from >= n) throw InputError("transition from out-of-range state");
      const auto name = t.at("action").get<std::string>();
      if (!m.find_action(name)) throw InputError("transition uses undeclared action '" + name + "'");
      std::vector<Outcome> outcomes;
      for (const auto& o : t.at("outcomes"))
        outcomes.push_back({o.at("to").get<int>(), o.at("p").get<double>()});
      const double cost = t.contains("cost") ? t.at("cost").get<double>() : 0.0;
      if (cost < 0.0) throw InputError("negative cost");
      if (m.find_choice(from, *m.find_action(name)))
        throw InputError("duplicate transition for state " + std::to_string(from) +
                         " action '" + name + "'");
      m.add_choice(from, name, std::move(outcomes), cost);
      if (t.contains("cost")) m.set_has_costs(true);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model json: ") + e.what());
  }
  for (const auto& d : validate(m)) {
    if (d.kind != Diagnostic::Kind::kUnreachable) throw InputError(d.message);
  }
  return m;
}

nlohmann::json to_json(const Mdp& m) {
  nlohmann::json j;
  j["states"] = m.num_states();
  j["initial"] = m.initial();
  j["atoms"] = m.atoms();
  nlohmann::json labels = nlohmann::json::object();
  for (StateId s = 0; s < m.num_states(); ++s) {
    if (m.label(s).empty()) continue;
    auto names = m.label_names(s);
    labels[std::to_string(s)] = std::vector<std::string>(names.begin(), names.end());
  }
  j["labels"] = labels;
  j["failure_state"] = m.failure_state() ? nlohmann::json(*m.failure_state()) : nlohmann::json(nullptr);
  j["actions"] = m.actions();
  j["trans"] = nlohmann::json::array();
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices(s)) {
      nlohmann::json t{{"from", s}, {"action", m.action_name(c.action)}};
      t["outcomes"] = nlohmann::json::array();
      for (const auto& o : c.outcomes) t["outcomes"].push_back({{"to", o.to}, {"p", o.p}});
      if (m.has_costs()) t["cost"] = c.cost;
      j["trans"].push_back(std::move(t));
    }
  }
  return j;
}

}  // namespace stapu::mdp
