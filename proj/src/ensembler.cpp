#include "warpdemo/ensembler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "warpdemo/common.hpp"

namespace warpdemo {

ChunkBuffer::ChunkBuffer(std::size_t chunk_len) : chunk_len_(chunk_len) {
  if (chunk_len == 0) throw ConfigError("chunk length must be positive");
}

void ChunkBuffer::push(ActionChunk chunk) {
  if (chunk.actions.size() != chunk_len_) {
    throw std::invalid_argument("chunk has " + std::to_string(chunk.actions.size()) + " actions, expected " +
                                std::to_string(chunk_len_));
  }
  if (!chunks_.empty() && chunk.emitted_at <= chunks_.back().emitted_at) {
    throw std::invalid_argument("chunk emitted at " + std::to_string(chunk.emitted_at) +
                                " does not follow the newest stored chunk");
  }
  const long long horizon = chunk.emitted_at - static_cast<long long>(chunk_len_);
  while (!chunks_.empty() && chunks_.front().emitted_at <= horizon) {
    chunks_.pop_front();
  }
  chunks_.push_back(std::move(chunk));
}

std::vector<Candidate> ChunkBuffer::candidates(long long t) const {
  std::vector<Candidate> out;
  const auto len = static_cast<long long>(chunk_len_);
  for (const auto& c : chunks_) {
    const long long age = t - c.emitted_at;
    if (age >= 0 && age < len) {
      out.push_back({c.actions[static_cast<std::size_t>(age)], age});
    }
  }
  if (out.empty()) {
    throw EmptyBuffer("no stored chunk covers step " + std::to_string(t));
  }
  return out;
}

const ActionChunk& ChunkBuffer::newest() const {
  if (chunks_.empty()) throw EmptyBuffer("chunk buffer is empty");
  return chunks_.back();
}

std::string_view to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::Baseline:
      return "baseline";
    case EnsembleMode::DynamicK:
      return "dynamic_k";
    case EnsembleMode::ResetOnly:
      return "reset_only";
    case EnsembleMode::Combined:
      return "combined";
  }
  return "unknown";
}

std::optional<EnsembleMode> parse_ensemble_mode(std::string_view name) {
  if (name == "baseline") return EnsembleMode::Baseline;
  if (name == "dynamic_k") return EnsembleMode::DynamicK;
  if (name == "reset_only") return EnsembleMode::ResetOnly;
  if (name == "combined") return EnsembleMode::Combined;
  return std::nullopt;
}

void EnsembleConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be non-negative");
  if (!(k_const >= 0.0)) throw ConfigError("k_const must be non-negative");
  if (!(k_cutoff > 0.0)) throw ConfigError("k_cutoff must be positive");
  if (chunk_len == 0) throw ConfigError("chunk length must be positive");
  const std::size_t n = effective_replay_n();
  if (n < 1 || n > chunk_len) throw ConfigError("replay_n must lie in [1, chunk_len]");
}

nlohmann::json ensemble_config_to_json(const EnsembleConfig& c) {
  return {{"mode", std::string(to_string(c.mode))},
          {"beta", c.beta},
          {"k_const", c.k_const},
          {"k_cutoff", c.k_cutoff},
          {"chunk_len", c.chunk_len},
          {"replay_n", c.effective_replay_n()},
          {"warmup_steps", c.warmup_steps},
          {"clear_after_suspend", c.clear_after_suspend}};
}

namespace {

template <class Get>
double population_sigma(std::size_t n, Get&& get) {
  // shifted by the first sample: agreeing candidates give exactly zero
  const double x0 = get(0);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += get(i) - x0;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (get(i) - x0) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n));
}

Temperatures spread_temperatures(std::size_t n, const auto& action_at, double beta) {
  if (n < 2) {
    throw InsufficientCandidates("spread temperatures need at least 2 candidates, got " + std::to_string(n));
  }
  double sigma_inf = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    sigma_inf = std::max(sigma_inf, population_sigma(n, [&](std::size_t i) { return action_at(i).pos[axis]; }));
  }
  const double sigma_g = population_sigma(n, [&](std::size_t i) { return action_at(i).gripper; });
  return {beta * sigma_inf, beta * sigma_g};
}

// lo + sum w_i (x_i - lo), clamped to [lo, hi]: identical inputs come back bit-exact.
template <class Get>
double convex_mean(std::span<const double> weights, Get&& get) {
  const std::size_t n = weights.size();
  double lo = get(0);
  double hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, get(i));
    hi = std::max(hi, get(i));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += weights[i] * (get(i) - lo);
  return std::clamp(lo + acc, lo, hi);
}

std::vector<double> age_weights(std::span<const Candidate> c, double k) {
  long long min_age = c[0].age;
  for (const auto& x : c) min_age = std::min(min_age, x.age);
  std::vector<double> w(c.size());
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    w[i] = std::exp(-k * static_cast<double>(c[i].age - min_age));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

Temperatures compute_k(std::span<const Action> candidates, double beta) {
  return spread_temperatures(candidates.size(), [&](std::size_t i) -> const Action& { return candidates[i]; },
                             beta);
}

Temperatures compute_k(std::span<const Candidate> candidates, double beta) {
  return spread_temperatures(
      candidates.size(), [&](std::size_t i) -> const Action& { return candidates[i].action; }, beta);
}

Action weighted_mean(std::span<const Candidate> candidates, double k_pos, double k_grip) {
  if (candidates.empty()) throw EmptyBuffer("weighted mean of no candidates");
  if (candidates.size() == 1) return candidates[0].action;

  const auto wp = age_weights(candidates, k_pos);
  const auto wg = age_weights(candidates, k_grip);
  Action out;
  for (int axis = 0; axis < 3; ++axis) {
    out.pos[axis] = convex_mean(wp, [&](std::size_t i) { return candidates[i].action.pos[axis]; });
  }
  out.gripper = convex_mean(wg, [&](std::size_t i) { return candidates[i].action.gripper; });
  return out;
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::Warmup:
      return "warmup";
    case StepKind::Ensemble:
      return "ensemble";
    case StepKind::Triggered:
      return "triggered";
    case StepKind::Suspended:
      return "suspended";
  }
  return "unknown";
}

nlohmann::json diagnostics_to_json(const EnsembleDiagnostics& d) {
  nlohmann::json j = {{"t", d.t},
                      {"mode_used", std::string(to_string(d.kind))},
                      {"candidate_count", d.candidate_count},
                      {"temp_p", d.used.pos},
                      {"temp_g", d.used.grip},
                      {"epoch_step", d.epoch_step},
                      {"suspension_left", d.suspension_left}};
  if (d.k) {
    j["k_p"] = d.k->pos;
    j["k_g"] = d.k->grip;
  } else {
    j["k_p"] = nullptr;
    j["k_g"] = nullptr;
  }
  return j;
}

TemporalEnsembler::TemporalEnsembler(EnsembleConfig cfg) : cfg_(cfg), buffer_(cfg.chunk_len) { cfg_.validate(); }

void TemporalEnsembler::submit(ActionChunk chunk) {
  if (suspension_) return;
  if (!epoch_start_) epoch_start_ = chunk.emitted_at;
  buffer_.push(std::move(chunk));
}

Action TemporalEnsembler::replay_suspended(long long t) {
  const auto& chunk = suspension_->chunk;
  const long long offset = std::clamp<long long>(t - chunk.emitted_at, 0, static_cast<long long>(chunk.actions.size()) - 1);
  --suspension_->steps_left;
  return chunk.actions[static_cast<std::size_t>(offset)];
}

void TemporalEnsembler::finish_suspension_if_done() {
  if (suspension_ && suspension_->steps_left == 0) {
    suspension_.reset();
    if (cfg_.clear_after_suspend) {
      buffer_.clear();
      epoch_start_.reset();
    }
  }
}

EnsembleOutput TemporalEnsembler::act(long long t) {
  EnsembleOutput out;
  out.diag.t = t;

  if (suspension_) {
    out.action = replay_suspended(t);
    out.diag.kind = StepKind::Suspended;
    out.diag.candidate_count = 1;
    out.diag.suspension_left = suspension_->steps_left;
    out.diag.epoch_step = epoch_start_ ? t - *epoch_start_ : 0;
    finish_suspension_if_done();
    return out;
  }

  const auto cands = buffer_.candidates(t);
  out.diag.candidate_count = cands.size();
  out.diag.epoch_step = t - epoch_start_.value_or(t);
  const bool warming = out.diag.epoch_step < static_cast<long long>(cfg_.warmup_steps);

  if (warming || cfg_.mode == EnsembleMode::Baseline || cands.size() < 2) {
    out.diag.kind = warming ? StepKind::Warmup : StepKind::Ensemble;
    out.diag.used = {cfg_.k_const, cfg_.k_const};
    out.action = weighted_mean(cands, cfg_.k_const, cfg_.k_const);
    return out;
  }

  const Temperatures k = compute_k(std::span<const Candidate>(cands), cfg_.beta);
  out.diag.k = k;

  const bool resets = cfg_.mode == EnsembleMode::ResetOnly || cfg_.mode == EnsembleMode::Combined;
  if (resets && (k.pos > cfg_.k_cutoff || k.grip > cfg_.k_cutoff)) {
    suspension_ = Suspension{buffer_.newest(), cfg_.effective_replay_n()};
    out.action = replay_suspended(t);
    out.diag.kind = StepKind::Triggered;
    out.diag.suspension_left = suspension_->steps_left;
    finish_suspension_if_done();
    return out;
  }

  const bool dynamic = cfg_.mode == EnsembleMode::DynamicK || cfg_.mode == EnsembleMode::Combined;
  out.diag.kind = StepKind::Ensemble;
  out.diag.used = dynamic ? k : Temperatures{cfg_.k_const, cfg_.k_const};
  out.action = weighted_mean(cands, out.diag.used.pos, out.diag.used.grip);
  return out;
}

}  // namespace warpdemo
