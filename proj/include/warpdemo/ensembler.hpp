#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "warpdemo/common.hpp"
#include "warpdemo/sim_state.hpp"

namespace warpdemo {

/// Fixed-length sequence of future actions predicted at one control step.
struct ActionChunk {
  long long emitted_at = 0;
  std::vector<Action> actions;
};

/// A prediction for the current step together with how many steps ago it was made.
struct Candidate {
  Action action;
  long long age = 0;
};

class EmptyBuffer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientCandidates : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Holds the chunks emitted during the last `chunk_len` steps, at most one per step.
class ChunkBuffer {
 public:
  explicit ChunkBuffer(std::size_t chunk_len);

  /// Chunks must arrive with strictly increasing emission times and exactly
  /// chunk_len actions. Chunks that can no longer cover the new time are dropped.
  void push(ActionChunk chunk);

  /// Actions predicted for step t by every stored chunk with emitted_at in
  /// (t - L, t], oldest prediction first. Throws EmptyBuffer if none covers t.
  std::vector<Candidate> candidates(long long t) const;

  void clear() { chunks_.clear(); }
  bool empty() const { return chunks_.empty(); }
  std::size_t size() const { return chunks_.size(); }
  std::size_t chunk_len() const { return chunk_len_; }
  const ActionChunk& newest() const;

 private:
  std::size_t chunk_len_;
  std::deque<ActionChunk> chunks_;
};

enum class EnsembleMode { Baseline, DynamicK, ResetOnly, Combined };

std::string_view to_string(EnsembleMode mode);
std::optional<EnsembleMode> parse_ensemble_mode(std::string_view name);

struct EnsembleConfig {
  EnsembleMode mode = EnsembleMode::Combined;
  double beta = 1.0;
  double k_const = 0.01;   // fixed temperature: Baseline and warm-up
  double k_cutoff = 0.02;  // suspension threshold on k_p or k_g
  std::size_t chunk_len = 20;
  std::size_t replay_n = 0;  // 0 means chunk_len / 2
  std::size_t warmup_steps = 5;
  bool clear_after_suspend = true;

  std::size_t effective_replay_n() const { return replay_n == 0 ? chunk_len / 2 : replay_n; }
  void validate() const;
};

nlohmann::json ensemble_config_to_json(const EnsembleConfig& c);

struct Temperatures {
  double pos = 0.0;
  double grip = 0.0;
};

/// k_p = beta * max_axis sigma(position), k_g = beta * sigma(gripper), with
/// population standard deviations over the candidates. Needs >= 2 candidates.
Temperatures compute_k(std::span<const Action> candidates, double beta);
Temperatures compute_k(std::span<const Candidate> candidates, double beta);

/// Exponentially age-weighted mean, weights exp(-k * age) normalized; position
/// and gripper use their own temperatures. The result stays inside the
/// per-dimension range of the candidates.
Action weighted_mean(std::span<const Candidate> candidates, double k_pos, double k_grip);

enum class StepKind { Warmup, Ensemble, Triggered, Suspended };
std::string_view to_string(StepKind kind);

struct EnsembleDiagnostics {
  long long t = 0;
  StepKind kind = StepKind::Warmup;
  std::size_t candidate_count = 0;
  std::optional<Temperatures> k;  // computed spread temperatures, when evaluated
  Temperatures used;              // temperatures applied to the weighted mean
  long long epoch_step = 0;
  std::size_t suspension_left = 0;
};

nlohmann::json diagnostics_to_json(const EnsembleDiagnostics& d);

struct EnsembleOutput {
  Action action;
  EnsembleDiagnostics diag;
};

/// Temporal ensembling with spread-driven temperatures and suspension.
///
/// Each step the caller submits the policy's newest chunk and then asks for the
/// action at that step. For the first `warmup_steps` steps of a buffer epoch
/// (and always in Baseline mode) the fixed temperature k_const is used. After
/// that DynamicK/Combined weight positions by k_p and gripper by k_g. In
/// ResetOnly/Combined a k above k_cutoff starts a suspension: the newest chunk
/// is executed verbatim for replay_n steps, chunks submitted meanwhile are
/// discarded, and on expiry the buffer is cleared, which starts a new epoch.
class TemporalEnsembler {
 public:
  explicit TemporalEnsembler(EnsembleConfig cfg);

  void submit(ActionChunk chunk);
  EnsembleOutput act(long long t);

  bool suspended() const { return suspension_.has_value(); }
  const ChunkBuffer& buffer() const { return buffer_; }
  const EnsembleConfig& config() const { return cfg_; }

 private:
  struct Suspension {
    ActionChunk chunk;
    std::size_t steps_left = 0;
  };

  Action replay_suspended(long long t);
  void finish_suspension_if_done();

  EnsembleConfig cfg_;
  ChunkBuffer buffer_;
  std::optional<Suspension> suspension_;
  std::optional<long long> epoch_start_;
};

}  // namespace warpdemo
