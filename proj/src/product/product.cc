#include "stapu/product/product.h"

#include <algorithm>

#include "stapu/errors.h"

namespace stapu::product {

nlohmann::json to_json(const ProductState& ps) { return {{"s", ps.s}, {"q", ps.q}}; }

ProductMdp::ProductMdp(std::shared_ptr<const mdp::Mdp> source,
                       std::shared_ptr<const logic::CompiledMission> mission)
    : source_(std::move(source)), mission_(std::move(mission)) {
  const auto& m = *source_;
  for (const auto& a : mission_->mission.atoms()) {
    if (std::find(m.atoms().begin(), m.atoms().end(), a) == m.atoms().end())
      throw InputError("mission atom '" + a + "' is not a proposition of the model");
  }
  const std::size_t comps = mission_->num_components();
  letters_.resize(m.num_states());
  for (StateId s = 0; s < m.num_states(); ++s) {
    const auto label = m.label_names(s);
    for (std::size_t c = 0; c < comps; ++c) letters_[s].push_back(mission_->component(c).letter_of(label));
  }
  for (const auto& a : m.actions()) model_.intern_action(a);
  for (const auto& a : m.atoms()) model_.intern_atom(a);
  model_.set_has_costs(m.has_costs());
  model_.set_initial(explore_from(ProductState{m.initial(), initial_q_at(m.initial())}));
}

std::vector<int> ProductMdp::advance(const std::vector<int>& q, StateId s) const {
  std::vector<int> out(q.size());
  for (std::size_t c = 0; c < q.size(); ++c)
    out[c] = mission_->component(c).next(q[c], letters_.at(s)[c]);
  return out;
}

std::vector<int> ProductMdp::initial_q_at(StateId s) const {
  std::vector<int> q;
  for (std::size_t c = 0; c < mission_->num_components(); ++c)
    q.push_back(mission_->component(c).initial());
  return advance(q, s);
}

std::optional<StateId> ProductMdp::find(const ProductState& ps) const {
  auto it = index_.find(ps);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StateId ProductMdp::intern(ProductState ps) {
  auto [it, fresh] = index_.emplace(ps, static_cast<StateId>(states_.size()));
  if (fresh) {
    states_.push_back(std::move(ps));
    model_.resize(static_cast<int>(states_.size()));
    for (int a : source_->label(states_.back().s)) model_.add_label(it->second, source_->atoms()[a]);
  }
  return it->second;
}

StateId ProductMdp::explore_from(const ProductState& root) {
  if (root.s < 0 || root.s >= source_->num_states())
    throw InputError("product root outside the source model");
  if (root.q.size() != mission_->num_components())
    throw InputError("product root has the wrong number of DFA components");
  for (std::size_t c = 0; c < root.q.size(); ++c)
    if (root.q[c] < 0 || root.q[c] >= mission_->component(c).num_states())
      throw InputError("product root has an invalid DFA state");
  if (auto id = find(root)) return *id;
  const std::size_t first = states_.size();
  const StateId id = intern(root);
  expand(first);
  return id;
}

void ProductMdp::expand(std::size_t first) {
  for (std::size_t i = first; i < states_.size(); ++i) {
    const StateId id = static_cast<StateId>(i);
    if (violated(id)) continue;
    const ProductState cur = states_[i];
    for (const auto& c : source_->choices(cur.s)) {
      mdp::Choice pc{c.action, {}, c.cost};
      for (const auto& o : c.outcomes) {
        const StateId to = intern(ProductState{o.to, advance(cur.q, o.to)});
        pc.outcomes.push_back({to, o.p});
      }
      model_.set_choice(id, std::move(pc));
    }
  }
}

bool ProductMdp::task_accepting(StateId id, int k) const {
  return mission_->tasks.at(k).accepting(state(id).q.at(k));
}

bool ProductMdp::tasks_accepting(StateId id) const {
  for (int k = 0; k < num_tasks(); ++k)
    if (!task_accepting(id, k)) return false;
  return true;
}

bool ProductMdp::violated(StateId id) const {
  return has_safety() && !mission_->safety->accepting(state(id).q.back());
}

double ProductMdp::full_size(bool include_safety) const {
  double n = source_->num_operational_states();
  for (const auto& d : mission_->tasks) n *= d.num_states();
  if (include_safety && has_safety()) n *= mission_->safety->num_states();
  return n;
}

double ProductMdp::full_size_all_states(bool include_safety) const {
  return full_size(include_safety) / source_->num_operational_states() * source_->num_states();
}

ProductMdp local_product(const mdp::Mdp& m, const logic::CompiledMission& mission) {
  return local_product(std::make_shared<const mdp::Mdp>(m),
                       std::make_shared<const logic::CompiledMission>(mission));
}

ProductMdp local_product(std::shared_ptr<const mdp::Mdp> m,
                         std::shared_ptr<const logic::CompiledMission> mission) {
  return ProductMdp(std::move(m), std::move(mission));
}

mdp::StateSet accepting_states(const ProductMdp& pm) {
  mdp::StateSet out(pm.num_states());
  for (StateId s = 0; s < pm.num_states(); ++s) out[s] = pm.accepting(s);
  return out;
}

mdp::StateSet violation_states(const ProductMdp& pm) {
  mdp::StateSet out(pm.num_states());
  for (StateId s = 0; s < pm.num_states(); ++s) out[s] = pm.violated(s);
  return out;
}

}  // namespace stapu::product
