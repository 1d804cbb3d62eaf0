#include "bhasha/config.hpp"

#include <sstream>

#include "bhasha/io.hpp"

namespace bhasha {

nlohmann::json RunConfig::snapshot() const {
  return nlohmann::json{{"seed", pipeline.seed},
                        {"batch_size", pipeline.batch_size},
                        {"grad_accum", pipeline.grad_accum},
                        {"effective_batch_size", pipeline.effective_batch_size()},
                        {"epochs", pipeline.epochs},
                        {"learning_rate", pipeline.learning_rate},
                        {"weight_decay", pipeline.weight_decay},
                        {"warmup_steps", pipeline.warmup_steps},
                        {"length_mode", std::string(to_string(length_mode))},
                        {"norm", std::string(to_string(norm))},
                        {"target_style", std::string(to_string(target))},
                        {"allow_partial", allow_partial},
                        {"model", model},
                        {"max_attempts", max_attempts},
                        {"max_in_flight", max_in_flight}};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_same_v<T, double>)
      v = std::stod(value, &used);
    else if constexpr (std::is_same_v<T, std::uint64_t>)
      v = std::stoull(value, &used);
    else
      v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("config key '" + key + "' has a bad value '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw UsageError("config key '" + key + "' expects true/false");
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) + " has no '='");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (!kv.emplace(key, value).second)
      throw UsageError("config key '" + key + "' given twice");
  }
  return kv;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "seed") cfg.pipeline.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "batch_size") cfg.pipeline.batch_size = parse_number<int>(key, value);
    else if (key == "grad_accum") cfg.pipeline.grad_accum = parse_number<int>(key, value);
    else if (key == "epochs") cfg.pipeline.epochs = parse_number<int>(key, value);
    else if (key == "learning_rate") cfg.pipeline.learning_rate = parse_number<double>(key, value);
    else if (key == "weight_decay") cfg.pipeline.weight_decay = parse_number<double>(key, value);
    else if (key == "warmup_steps") cfg.pipeline.warmup_steps = parse_number<int>(key, value);
    else if (key == "length_mode") cfg.length_mode = parse_length_mode(value);
    else if (key == "norm") cfg.norm = parse_norm(value);
    else if (key == "target_style") cfg.target = parse_target_style(value);
    else if (key == "allow_partial") cfg.allow_partial = parse_bool(key, value);
    else if (key == "backend") cfg.backend = value;
    else if (key == "model") cfg.model = value;
    else if (key == "max_attempts") cfg.max_attempts = parse_number<int>(key, value);
    else if (key == "max_in_flight") cfg.max_in_flight = parse_number<int>(key, value);
    else if (key == "chat_template") cfg.chat_template = value;
    else throw UsageError("unknown config key '" + key + "'");
  }
  if (cfg.pipeline.batch_size < 1 || cfg.pipeline.grad_accum < 1)
    throw UsageError("batch_size and grad_accum must be >= 1");
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  apply_key_values(cfg, parse_key_values(read_text(path)));
  return cfg;
}

}  // namespace bhasha
