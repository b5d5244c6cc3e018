#include "warpdemo/common.hpp"

namespace warpdemo {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Push:
      return "push";
    case TaskKind::PickPlace:
      return "pick_place";
    case TaskKind::Stack:
      return "stack";
  }
  return "unknown";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  if (name == "push") return TaskKind::Push;
  if (name == "pick_place") return TaskKind::PickPlace;
  if (name == "stack") return TaskKind::Stack;
  return std::nullopt;
}

void Workspace::validate() const {
  if (!(side > 0.0)) throw ConfigError("workspace side must be positive");
  if (!(block_size > 0.0)) throw ConfigError("block size must be positive");
  if (!(g_max > 0.0)) throw ConfigError("g_max must be positive");
  if (!(goal_z_max >= goal_z_min)) throw ConfigError("goal z range is empty");
  if (!ee_home.allFinite()) throw ConfigError("ee home must be finite");
}

}  // namespace warpdemo
