#include "stapu/logic/mission.h"

#include "stapu/errors.h"
#include "stapu/logic/parser.h"

namespace stapu::logic {

void Mission::check() const {
  if (tasks.empty()) throw InputError("mission has no tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!is_syntactically_cosafe(tasks[i]))
      throw InputError("task " + std::to_string(i + 1) +
                       " is not syntactically co-safe: " + tasks[i].to_string());
  }
  if (safety && !is_syntactically_safe(*safety))
    throw InputError("safety formula is not syntactically safe: " + safety->to_string());
}

std::set<std::string> Mission::atoms() const {
  std::set<std::string> out;
  for (const auto& t : tasks) {
    auto a = t.atoms();
    out.insert(a.begin(), a.end());
  }
  if (safety) {
    auto a = safety->atoms();
    out.insert(a.begin(), a.end());
  }
  return out;
}

Mission Mission::from_json(const nlohmann::json& j) {
  Mission m;
  try {
    for (const auto& t : j.at("tasks")) m.tasks.push_back(parse(t.get<std::string>()));
    if (j.contains("safety") && !j.at("safety").is_null())
      m.safety = parse(j.at("safety").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed mission json: ") + e.what());
  }
  m.check();
  return m;
}

nlohmann::json Mission::to_json() const {
  nlohmann::json j;
  j["tasks"] = nlohmann::json::array();
  for (const auto& t : tasks) j["tasks"].push_back(t.to_string());
  j["safety"] = safety ? nlohmann::json(safety->to_string()) : nlohmann::json(nullptr);
  return j;
}

CompiledMission CompiledMission::compile(const Mission& m) {
  m.check();
  CompiledMission out;
  out.mission = m;
  for (const auto& t : m.tasks) out.tasks.push_back(minimize(logic::compile(t, Fragment::kCoSafe)));
  if (m.safety) out.safety = minimize(logic::compile(*m.safety, Fragment::kSafe));
  return out;
}

std::vector<Diagnostic> validate_mission_decomposition(const Mission& m) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < m.tasks.size(); ++i) {
    auto ai = m.tasks[i].atoms();
    for (std::size_t j = i + 1; j < m.tasks.size(); ++j) {
      for (const auto& a : m.tasks[j].atoms()) {
        if (ai.count(a)) {
          out.push_back({"tasks " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                         " share atomic proposition '" + a + "'"});
        }
      }
    }
  }
  return out;
}

}  // namespace stapu::logic
