#pragma once

#include <optional>
#include <vector>

#include "warpdemo/geometry.hpp"

namespace warpdemo {

struct BlockState {
  Vec3 pos = Vec3::Zero();
  bool held = false;
};

struct SimState {
  Vec3 ee_pos = Vec3::Zero();
  double gripper = 0.0;
  std::vector<BlockState> blocks;
  double time = 0.0;
  // Block position minus ee position, fixed at grasp time.
  Vec3 grasp_offset = Vec3::Zero();

  std::optional<std::size_t> held_block() const {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].held) return i;
    }
    return std::nullopt;
  }
};

}  // namespace warpdemo

namespace warpdemo {

/// Goal-state action: target end-effector position and target gripper width.
struct Action {
  Vec3 pos = Vec3::Zero();
  double gripper = 0.0;
};

}  // namespace warpdemo
