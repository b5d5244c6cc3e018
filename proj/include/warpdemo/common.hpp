#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "warpdemo/geometry.hpp"

namespace warpdemo {

inline constexpr std::string_view kCodeVersion = "warpdemo 0.1.0";

enum class TaskKind { Push, PickPlace, Stack };

std::string_view to_string(TaskKind task);
/// Accepts "push", "pick_place" and "stack".
std::optional<TaskKind> parse_task_kind(std::string_view name);

inline std::size_t block_count(TaskKind task) { return task == TaskKind::Stack ? 2 : 1; }

/// Square table centered on the world origin, top surface at z = 0.
struct Workspace {
  double side = 0.70;          // meters
  double goal_z_min = 0.0;     // PickPlace goal height range
  double goal_z_max = 0.20;
  double block_size = 0.04;
  double g_max = 0.08;         // fully open gripper width
  Vec3 ee_home{0.0, 0.0, 0.20};

  double half_side() const { return 0.5 * side; }
  double rest_height() const { return 0.5 * block_size; }
  void validate() const;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invariant breach in an input document. `index` is the first offending
/// waypoint (or segment) when one applies.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), index_(index) {}
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace warpdemo
