#include "bhasha/corpus_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

namespace bhasha {

using nlohmann::json;

std::string_view to_string(Language lang) { return lang == Language::En ? "en" : "hi"; }

Language parse_language(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "en" || lower == "english") return Language::En;
  if (lower == "hi" || lower == "hindi") return Language::Hi;
  throw DataError("unknown language '" + std::string(text) + "'");
}

std::string_view display_name(Language lang) { return lang == Language::En ? "English" : "Hindi"; }

namespace {

constexpr std::array<std::pair<TaskType, std::string_view>, kTaskTypeCount> kTaskNames{{
    {TaskType::NLI, "NLI"},
    {TaskType::MCQ, "MCQ"},
    {TaskType::Numeric, "NUMERIC"},
    {TaskType::Boolean, "BOOLEAN"},
    {TaskType::LongResponse, "LONG RESPONSE"},
    {TaskType::DirectResponse, "DIRECT RESPONSE"},
    {TaskType::Code, "CODE"},
    {TaskType::Summarize, "SUMMARIZE"},
    {TaskType::Paraphrase, "PARAPHRASE"},
    {TaskType::Translation, "TRANSLATION"},
    {TaskType::Simplify, "SIMPLIFY"},
}};

}  // namespace

const std::vector<TaskType>& all_task_types() {
  static const std::vector<TaskType> tasks = [] {
    std::vector<TaskType> v;
    for (const auto& [t, _] : kTaskNames) v.push_back(t);
    return v;
  }();
  return tasks;
}

std::string_view task_name(TaskType task) {
  for (const auto& [t, name] : kTaskNames)
    if (t == task) return name;
  return "?";
}

TaskType parse_task(std::string_view text) {
  std::string norm(text);
  for (auto& c : norm) {
    c = c == '_' ? ' ' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  for (const auto& [t, name] : kTaskNames)
    if (name == norm) return t;
  throw DataError("unknown task type '" + std::string(text) + "'");
}

const std::vector<std::string>& cultural_sources() {
  static const std::vector<std::string> sources{"India Law", "India Recipe", "India Travel",
                                                "India TAX", "India UPSC"};
  return sources;
}

bool is_cultural_source(std::string_view source) {
  const auto& s = cultural_sources();
  return std::find(s.begin(), s.end(), source) != s.end();
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

ValidationReport validate_sample(const Sample& s) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  if (s.id.empty()) add("empty id", "sample id is empty");
  if (s.input_fields.empty()) add("no input", "input_fields is empty");

  const std::size_t n = s.input_fields.size();
  switch (s.task) {
    case TaskType::NLI:
      if (n != 2) add("nli segments", "NLI requires exactly 2 segments, got " + std::to_string(n));
      break;
    case TaskType::Translation:
      if (n != 2 || s.input_fields[1].empty())
        add("translation target", "Translation requires {input, target language}");
      break;
    default:
      if (n > 1) add("too many segments", "task takes 1 segment, got " + std::to_string(n));
      break;
  }

  if (s.task == TaskType::MCQ) {
    if (s.options.size() < kMinOptions) add("options < 2", "MCQ has fewer than 2 options");
    if (s.options.size() > kMaxOptions) add("options > 10", "MCQ has more than 10 options");
  } else if (!s.options.empty()) {
    add("unexpected options", "options are only valid for MCQ samples");
  }

  if (s.is_cultural != is_cultural_source(s.source))
    add("cultural flag mismatch",
        "is_cultural=" + std::string(s.is_cultural ? "true" : "false") + " for source '" +
            s.source + "'");
  return report;
}

json to_json(const Sample& s) {
  return json{{"id", s.id},
              {"task", std::string(task_name(s.task))},
              {"input_fields", s.input_fields},
              {"options", s.options},
              {"output", s.output},
              {"language", std::string(to_string(s.language))},
              {"domain", s.domain},
              {"source", s.source},
              {"is_cultural", s.is_cultural}};
}

Sample sample_from_json(const json& j) {
  try {
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.task = parse_task(j.at("task").get<std::string>());
    s.input_fields = j.at("input_fields").get<std::vector<std::string>>();
    if (auto it = j.find("options"); it != j.end() && !it->is_null())
      s.options = it->get<std::vector<std::string>>();
    s.output = j.at("output").get<std::string>();
    s.language = parse_language(j.at("language").get<std::string>());
    s.domain = j.value("domain", std::string{});
    s.source = j.at("source").get<std::string>();
    s.is_cultural = j.value("is_cultural", false);
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed sample record: ") + e.what());
  }
}

std::string serialize(const Sample& s) { return to_json(s).dump(); }

Sample parse_sample(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("sample line is not a JSON object");
  return sample_from_json(j);
}

std::vector<SpecWarning> validate_spec(const DatasetSpec& spec) {
  if (spec.source.empty()) throw DataError("dataset spec has an empty source name");
  if (spec.hindi_ratio) {
    double r = *spec.hindi_ratio;
    if (!std::isfinite(r) || r < 0.0 || r > 100.0)
      throw DataError("hindi ratio out of [0,100] for '" + spec.source + "'");
  }
  std::vector<SpecWarning> warnings;
  if (spec.used_samples > spec.total_samples)
    warnings.push_back({spec.source, "used samples " + std::to_string(spec.used_samples) +
                                         " exceed total " + std::to_string(spec.total_samples)});
  return warnings;
}

ValidationReport validate_item(const BenchmarkItem& item, bool is_boolean) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };
  if (item.id.empty()) add("empty id", "item id is empty");
  const auto n = item.choices.size();
  if (is_boolean) {
    if (n != 2) add("boolean choices", "boolean items need exactly 2 choices");
  } else if (n < kMinOptions || n > kMaxOptions) {
    add("choice count", "choice count " + std::to_string(n) + " outside [2, 10]");
  }
  if (item.gold_index < 0 || static_cast<std::size_t>(item.gold_index) >= n)
    add("gold index", "gold_index " + std::to_string(item.gold_index) + " out of range");
  return report;
}

json to_json(const BenchmarkItem& item) {
  json j{{"id", item.id},
         {"benchmark", item.benchmark},
         {"question", item.question},
         {"choices", item.choices},
         {"gold_index", item.gold_index},
         {"language", std::string(to_string(item.language))}};
  if (item.context) j["context"] = *item.context;
  if (item.domain) j["domain"] = *item.domain;
  return j;
}

BenchmarkItem item_from_json(const json& j) {
  try {
    BenchmarkItem item;
    item.id = j.at("id").get<std::string>();
    item.benchmark = j.at("benchmark").get<std::string>();
    item.question = j.at("question").get<std::string>();
    if (auto it = j.find("context"); it != j.end() && !it->is_null())
      item.context = it->get<std::string>();
    item.choices = j.at("choices").get<std::vector<std::string>>();
    item.gold_index = j.at("gold_index").get<int>();
    item.language = parse_language(j.at("language").get<std::string>());
    if (auto it = j.find("domain"); it != j.end() && !it->is_null())
      item.domain = it->get<std::string>();
    return item;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed benchmark item: ") + e.what());
  }
}

int PipelineConfig::effective_batch_size() const { return batch_size * grad_accum; }

}  // namespace bhasha
