#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "bhasha/evaluator.hpp"
#include "bhasha/orderer.hpp"

namespace bhasha {

// Settings shared by the CLI subcommands. Loaded from a flat "key = value"
// file, then overridden by command-line flags.
struct RunConfig {
  PipelineConfig pipeline;
  LengthMode length_mode = LengthMode::WhitespaceTokens;
  NormalizationMode norm = NormalizationMode::MeanPerToken;
  TargetStyle target = TargetStyle::ChoiceText;
  bool allow_partial = false;
  std::string backend;  // empty: fall back to SCORE_BACKEND_URL
  std::string model;
  int max_attempts = 3;
  int max_in_flight = 8;
  std::string chat_template;  // path; empty = identity

  nlohmann::json snapshot() const;
};

// Lines are "key = value"; '#' starts a comment. Duplicate or unknown keys
// are a UsageError.
std::map<std::string, std::string> parse_key_values(std::string_view text);
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace bhasha
