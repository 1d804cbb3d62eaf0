#include "bhasha/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bhasha/kernels.hpp"

namespace bhasha {

using nlohmann::json;

std::string_view to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::MeanPerToken: return "mean";
    case NormalizationMode::Unnormalized: return "sum";
    case NormalizationMode::ByteLengthNormalized: return "bytes";
  }
  return "?";
}

NormalizationMode parse_norm(std::string_view text) {
  if (text == "mean" || text == "token") return NormalizationMode::MeanPerToken;
  if (text == "sum" || text == "none") return NormalizationMode::Unnormalized;
  if (text == "bytes" || text == "byte") return NormalizationMode::ByteLengthNormalized;
  throw UsageError("unknown normalization '" + std::string(text) + "'");
}

std::string_view to_string(TargetStyle style) {
  return style == TargetStyle::ChoiceText ? "text" : "letter";
}

TargetStyle parse_target_style(std::string_view text) {
  if (text == "text") return TargetStyle::ChoiceText;
  if (text == "letter") return TargetStyle::ChoiceLetter;
  throw UsageError("unknown target style '" + std::string(text) + "'");
}

const std::vector<std::string>& EvalOptions::boolean_continuations(const std::string& benchmark,
                                                                   Language lang) const {
  for (const auto& key : {benchmark, std::string("*")}) {
    auto it = boolean_answers.find(key);
    if (it == boolean_answers.end()) continue;
    auto jt = it->second.find(lang);
    if (jt != it->second.end()) return jt->second;
  }
  throw UsageError("no boolean answer strings configured for " + benchmark + "/" +
                   std::string(to_string(lang)));
}

double normalize_score(const ContinuationScore& raw, std::size_t bytes, NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::MeanPerToken:
      return raw.total_logprob / static_cast<double>(raw.token_count);
    case NormalizationMode::Unnormalized:
      return raw.total_logprob;
    case NormalizationMode::ByteLengthNormalized:
      return raw.total_logprob / static_cast<double>(std::max<std::size_t>(bytes, 1));
  }
  return raw.total_logprob;
}

int argmax_lowest(std::span<const double> scores) {
  int best = -1;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (best < 0 || scores[i] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

std::string item_prompt(const BenchmarkItem& item, const EvalOptions& opts) {
  Sample s;
  s.id = item.id;
  std::string question = item.context ? *item.context + "\n" + item.question : item.question;
  s.input_fields = {std::move(question)};
  s.language = item.language;
  if (opts.is_boolean(item)) {
    s.task = TaskType::Boolean;
  } else {
    s.task = TaskType::MCQ;
    s.options = item.choices;
  }
  return render_chat(format_input(s), opts.chat);
}

std::vector<std::string> item_continuations(const BenchmarkItem& item, const EvalOptions& opts) {
  std::vector<std::string> conts;
  if (opts.is_boolean(item)) {
    for (const auto& a : opts.boolean_continuations(item.benchmark, item.language)) conts.push_back(" " + a);
    return conts;
  }
  for (std::size_t i = 0; i < item.choices.size(); ++i) {
    if (opts.target == TargetStyle::ChoiceLetter)
      conts.push_back(std::string(" ") + static_cast<char>('A' + i));
    else
      conts.push_back(" " + preprocess(item.choices[i]));
  }
  return conts;
}

ItemScore score_item(const BenchmarkItem& item, ScoringClient& client, const EvalOptions& opts) {
  ItemScore out;
  out.id = item.id;
  out.benchmark = item.benchmark;
  out.language = item.language;
  out.domain = item.domain;
  out.gold_index = item.gold_index;
  out.n_options = static_cast<int>(item.choices.size());

  ScoreRequest req{opts.model, item_prompt(item, opts), item_continuations(item, opts)};
  try {
    auto resp = client.score_continuations(req);
    out.raw = resp.scores;
  } catch (const TransportError& e) {
    out.error = std::string("transport: ") + e.what();
    return out;
  } catch (const ProtocolError& e) {
    out.error = std::string("protocol: ") + e.what();
    return out;
  }
  out.normalized.reserve(out.raw.size());
  for (std::size_t i = 0; i < out.raw.size(); ++i)
    out.normalized.push_back(normalize_score(out.raw[i], req.continuations[i].size(), opts.norm));
  out.predicted_index = argmax_lowest(out.normalized);
  return out;
}

std::size_t EvalReport::unscored() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.n_unscored;
  return n;
}

const EvalResult* EvalReport::find(std::string_view benchmark, Language lang) const {
  for (const auto& r : results)
    if (r.benchmark == benchmark && r.language == lang) return &r;
  return nullptr;
}

EvalReport aggregate(std::vector<ItemScore> scores, const EvalOptions& opts, std::string backend) {
  std::sort(scores.begin(), scores.end(), [](const ItemScore& a, const ItemScore& b) {
    return std::tie(a.benchmark, a.language, a.id) < std::tie(b.benchmark, b.language, b.id);
  });
  EvalReport report{opts.model, opts.norm, opts.target, std::move(backend), {}};
  for (auto& s : scores) {
    if (report.results.empty() || report.results.back().benchmark != s.benchmark ||
        report.results.back().language != s.language) {
      report.results.push_back({});
      report.results.back().benchmark = s.benchmark;
      report.results.back().language = s.language;
    }
    auto& r = report.results.back();
    if (s.scored()) {
      ++r.n_items;
      if (s.correct()) ++r.n_correct;
      r.per_item.push_back(std::move(s));
    } else {
      ++r.n_unscored;
      r.unscored.push_back(std::move(s));
    }
  }
  for (auto& r : report.results)
    r.accuracy = r.n_items ? static_cast<double>(r.n_correct) / static_cast<double>(r.n_items) : 0.0;
  return report;
}

EvalReport evaluate(std::span<const BenchmarkItem> items, ScoringClient& client,
                    const EvalOptions& opts) {
  if (items.empty()) throw DataError("no items");
  for (const auto& item : items) {
    auto report = validate_item(item, opts.is_boolean(item));
    if (!report.ok())
      throw DataError("item '" + item.id + "': " + report.violations.front().message);
  }
  return aggregate(kernels::parallel::score_all(items, client, opts), opts,
                   client.backend().describe());
}

namespace {

json item_to_json(const ItemScore& s) {
  json j{{"id", s.id},
         {"predicted_index", s.predicted_index},
         {"gold_index", s.gold_index},
         {"n_options", s.n_options},
         {"scores", s.normalized}};
  if (s.domain) j["domain"] = *s.domain;
  json raw = json::array();
  for (const auto& r : s.raw) raw.push_back({{"total_logprob", r.total_logprob}, {"token_count", r.token_count}});
  j["raw"] = std::move(raw);
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

ItemScore item_from_json(const json& j, const std::string& benchmark, Language lang) {
  ItemScore s;
  s.id = j.at("id").get<std::string>();
  s.benchmark = benchmark;
  s.language = lang;
  s.predicted_index = j.at("predicted_index").get<int>();
  s.gold_index = j.at("gold_index").get<int>();
  s.n_options = j.value("n_options", 0);
  if (j.contains("domain")) s.domain = j["domain"].get<std::string>();
  s.normalized = j.value("scores", std::vector<double>{});
  if (j.contains("raw"))
    for (const auto& r : j["raw"])
      s.raw.push_back({r.at("total_logprob").get<double>(), r.at("token_count").get<std::uint64_t>()});
  s.error = j.value("error", std::string{});
  return s;
}

}  // namespace

json to_json(const EvalReport& report) {
  json results = json::array();
  for (const auto& r : report.results) {
    json items = json::array();
    for (const auto& s : r.per_item) items.push_back(item_to_json(s));
    json unscored = json::array();
    for (const auto& s : r.unscored) unscored.push_back(item_to_json(s));
    results.push_back({{"benchmark", r.benchmark},
                       {"language", std::string(to_string(r.language))},
                       {"n_items", r.n_items},
                       {"n_correct", r.n_correct},
                       {"n_unscored", r.n_unscored},
                       {"accuracy", r.accuracy},
                       {"per_item", std::move(items)},
                       {"unscored", std::move(unscored)}});
  }
  return json{{"model", report.model},
              {"norm", std::string(to_string(report.norm))},
              {"target_style", std::string(to_string(report.target))},
              {"backend", report.backend},
              {"results", std::move(results)}};
}

EvalReport eval_report_from_json(const json& j) {
  try {
    EvalReport report;
    report.model = j.value("model", std::string{});
    report.norm = parse_norm(j.value("norm", std::string("mean")));
    report.target = parse_target_style(j.value("target_style", std::string("text")));
    report.backend = j.value("backend", std::string{});
    for (const auto& r : j.at("results")) {
      EvalResult res;
      res.benchmark = r.at("benchmark").get<std::string>();
      res.language = parse_language(r.at("language").get<std::string>());
      res.n_items = r.at("n_items").get<std::size_t>();
      res.n_correct = r.at("n_correct").get<std::size_t>();
      res.n_unscored = r.value("n_unscored", std::size_t{0});
      res.accuracy = r.at("accuracy").get<double>();
      for (const auto& s : r.value("per_item", json::array()))
        res.per_item.push_back(item_from_json(s, res.benchmark, res.language));
      for (const auto& s : r.value("unscored", json::array()))
        res.unscored.push_back(item_from_json(s, res.benchmark, res.language));
      report.results.push_back(std::move(res));
    }
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed result file: ") + e.what());
  }
}

std::string to_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "benchmark,language,n_items,n_correct,n_unscored,accuracy\n";
  char buf[64];
  for (const auto& r : report.results) {
    std::snprintf(buf, sizeof buf, "%.6f", r.accuracy);
    os << r.benchmark << ',' << to_string(r.language) << ',' << r.n_items << ',' << r.n_correct
       << ',' << r.n_unscored << ',' << buf << '\n';
  }
  return os.str();
}

// --- score tables -------------------------------------------------------------

ScoreTable score_table(const EvalReport& report) {
  ScoreTable t;
  for (const auto& r : report.results) t[{r.benchmark, r.language}] = 100.0 * r.accuracy;
  return t;
}

double average_scores(const std::map<std::string, double>& accuracies) {
  double sum = 0.0;
  for (const auto& name : core_benchmarks()) {
    auto it = accuracies.find(name);
    if (it == accuracies.end()) throw DataError("missing benchmark '" + name + "'");
    sum += it->second;
  }
  return sum / static_cast<double>(core_benchmarks().size());
}

double average_scores(const ScoreTable& table, Language lang) {
  std::map<std::string, double> acc;
  for (const auto& [key, v] : table)
    if (key.second == lang) acc[key.first] = v;
  return average_scores(acc);
}

double overall_average(const ScoreTable& table) {
  return (average_scores(table, Language::En) + average_scores(table, Language::Hi)) / 2.0;
}

AverageCheck check_printed_average(std::span<const double> cells, double printed, double tolerance) {
  AverageCheck check;
  for (double c : cells) check.computed += c;
  if (!cells.empty()) check.computed /= static_cast<double>(cells.size());
  check.printed = printed;
  // The slack absorbs binary representation error of decimal table values.
  check.consistent = std::abs(check.computed - printed) <= tolerance + 1e-9;
  return check;
}

DeltaTable compare_runs(const ScoreTable& baseline, const ScoreTable& candidate,
                        std::string baseline_name, std::string candidate_name) {
  for (const auto& [key, _] : baseline)
    if (!candidate.count(key))
      throw DataError("candidate lacks " + key.first + "/" + std::string(to_string(key.second)));
  for (const auto& [key, _] : candidate)
    if (!baseline.count(key))
      throw DataError("baseline lacks " + key.first + "/" + std::string(to_string(key.second)));

  DeltaTable t{std::move(baseline_name), std::move(candidate_name), {}, {}};
  for (const auto& [key, b] : baseline)
    t.rows.push_back({key.first, std::string(to_string(key.second)), b, candidate.at(key)});

  try {
    const double be = average_scores(baseline, Language::En), ce = average_scores(candidate, Language::En);
    const double bh = average_scores(baseline, Language::Hi), ch = average_scores(candidate, Language::Hi);
    t.averages.push_back({"Average", "en", be, ce});
    t.averages.push_back({"Average", "hi", bh, ch});
    t.averages.push_back({"Average", "overall", (be + bh) / 2.0, (ce + ch) / 2.0});
  } catch (const DataError&) {
    t.averages.clear();
  }
  return t;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Rounds to 2 decimals first so a tiny negative delta never prints as "▼ 0.00".
double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::string delta_marker(double delta) {
  const double d = round2(delta);
  if (d == 0) return fixed2(0.0);
  return (d < 0 ? "▼ " : "▲ ") + fixed2(std::abs(d));
}

std::string signed_delta(double delta) {
  const double d = round2(delta);
  if (d == 0) return fixed2(0.0);
  return (d < 0 ? "-" : "+") + fixed2(std::abs(d));
}

std::string render_markdown(const DeltaTable& table) {
  std::ostringstream os;
  os << "| Benchmark | Lang | " << table.baseline_name << " | " << table.candidate_name
     << " | Change |\n";
  os << "|---|---|---|---|---|\n";
  auto row = [&](const DeltaRow& r) {
    os << "| " << r.benchmark << " | " << r.language << " | " << fixed2(r.baseline) << " | "
       << fixed2(r.candidate) << " | " << delta_marker(r.delta()) << " |\n";
  };
  for (const auto& r : table.rows) row(r);
  for (const auto& r : table.averages) row(r);
  return os.str();
}

std::string render_csv(const DeltaTable& table) {
  std::ostringstream os;
  os << "benchmark,lang,baseline,candidate,change\n";
  auto row = [&](const DeltaRow& r) {
    os << r.benchmark << ',' << r.language << ',' << fixed2(r.baseline) << ','
       << fixed2(r.candidate) << ',' << signed_delta(r.delta()) << '\n';
  };
  for (const auto& r : table.rows) row(r);
  for (const auto& r : table.averages) row(r);
  return os.str();
}

// --- prediction logs -------------------------------------------------------------

json to_json(const PredictionRecord& r) {
  json j{{"id", r.id}, {"predicted_index", r.predicted_index}, {"n_options", r.n_options}};
  if (r.domain) j["domain"] = *r.domain;
  if (r.gold_index) j["gold_index"] = *r.gold_index;
  if (r.benchmark) j["benchmark"] = *r.benchmark;
  if (r.language) j["language"] = std::string(to_string(*r.language));
  return j;
}

PredictionRecord prediction_from_json(const json& j) {
  try {
    PredictionRecord r;
    r.id = j.at("id").get<std::string>();
    r.predicted_index = j.at("predicted_index").get<int>();
    r.n_options = j.at("n_options").get<int>();
    if (auto it = j.find("domain"); it != j.end() && !it->is_null()) r.domain = it->get<std::string>();
    if (auto it = j.find("gold_index"); it != j.end() && !it->is_null()) r.gold_index = it->get<int>();
    if (auto it = j.find("benchmark"); it != j.end() && !it->is_null())
      r.benchmark = it->get<std::string>();
    if (auto it = j.find("language"); it != j.end() && !it->is_null())
      r.language = parse_language(it->get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed prediction record: ") + e.what());
  }
}

std::vector<PredictionRecord> prediction_log(const EvalReport& report) {
  std::vector<PredictionRecord> log;
  for (const auto& r : report.results)
    for (const auto& s : r.per_item)
      log.push_back({s.id, s.predicted_index, s.n_options, s.domain, s.gold_index, s.benchmark, s.language});
  return log;
}

namespace {

struct Tally {
  std::size_t n = 0;
  std::size_t correct = 0;
};

std::map<std::string, Tally> tally_by_domain(std::span<const PredictionRecord> log, const char* which) {
  std::map<std::string, Tally> out;
  for (const auto& r : log) {
    if (!r.gold_index)
      throw DataError(std::string(which) + " record '" + r.id + "' has no gold_index");
    auto& t = out[r.domain ? *r.domain : std::string(kUnlabeledDomain)];
    ++t.n;
    if (r.predicted_index == *r.gold_index) ++t.correct;
  }
  return out;
}

}  // namespace

DomainDeltaTable domain_breakdown(std::span<const PredictionRecord> baseline,
                                  std::span<const PredictionRecord> candidate,
                                  const std::map<std::string, std::string>& coverage,
                                  std::span<const std::string> row_order) {
  const auto base = tally_by_domain(baseline, "baseline");
  const auto cand = tally_by_domain(candidate, "candidate");
  for (const auto& [d, _] : base)
    if (!cand.count(d)) throw DataError("domain '" + d + "' missing from candidate log");
  for (const auto& [d, _] : cand)
    if (!base.count(d)) throw DataError("domain '" + d + "' missing from baseline log");

  std::vector<std::string> domains;
  for (const auto& d : row_order)
    if (base.count(d) && std::find(domains.begin(), domains.end(), d) == domains.end()) domains.push_back(d);
  for (const auto& [d, _] : base)
    if (std::find(domains.begin(), domains.end(), d) == domains.end()) domains.push_back(d);

  DomainDeltaTable t;
  for (const auto& d : domains) {
    const auto& b = base.at(d);
    const auto& c = cand.at(d);
    DomainRow row{d, b.n, c.n, 100.0 * static_cast<double>(b.correct) / static_cast<double>(b.n),
                  100.0 * static_cast<double>(c.correct) / static_cast<double>(c.n), {}};
    if (auto it = coverage.find(d); it != coverage.end()) row.coverage = it->second;
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_markdown(const DomainDeltaTable& table, std::string_view baseline_name,
                            std::string_view candidate_name) {
  std::ostringstream os;
  os << "| Domain | " << baseline_name << " | " << candidate_name
     << " | Change | Training Data Used |\n|---|---|---|---|---|\n";
  for (const auto& r : table.rows)
    os << "| " << r.domain << " | " << fixed2(r.baseline) << " | " << fixed2(r.candidate) << " | "
       << delta_marker(r.delta()) << " | " << (r.coverage.empty() ? "-" : r.coverage) << " |\n";
  return os.str();
}

std::string render_csv(const DomainDeltaTable& table) {
  std::ostringstream os;
  os << "domain,baseline_items,candidate_items,baseline,candidate,change,training_data\n";
  for (const auto& r : table.rows)
    os << r.domain << ',' << r.baseline_items << ',' << r.candidate_items << ','
       << fixed2(r.baseline) << ',' << fixed2(r.candidate) << ',' << signed_delta(r.delta()) << ','
       << r.coverage << '\n';
  return os.str();
}

// --- sweep grid ------------------------------------------------------------------

std::vector<SweepConfig> sweep_grid(std::span<const std::string> models, std::span<const int> ratios,
                                    const std::vector<bool>& domain_flags, double data_fraction) {
  std::vector<SweepConfig> grid;
  grid.reserve(models.size() * ratios.size() * domain_flags.size());
  for (const auto& m : models)
    for (bool flag : domain_flags)
      for (int r : ratios) grid.push_back({m, flag, r, data_fraction});
  return grid;
}

std::vector<int> parse_ratio_list(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(std::string(s), &used);
      if (used != s.size() || v < 0 || v > 100) throw std::invalid_argument("range");
      return v;
    } catch (const std::logic_error&) {
      throw UsageError("bad ratio list '" + std::string(text) + "'");
    }
  };
  std::vector<int> out;
  if (text.empty()) return out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    std::string_view rest = text.substr(dots + 2);
    int step = 10;
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
      step = to_int(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const int lo = to_int(text.substr(0, dots)), hi = to_int(rest);
    if (step <= 0 || lo > hi) throw UsageError("bad ratio range '" + std::string(text) + "'");
    for (int r = lo; r <= hi; r += step) out.push_back(r);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(to_int(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::vector<bool> parse_domain_flags(std::string_view text) {
  if (text == "both") return {false, true};
  if (text == "yes") return {true};
  if (text == "no") return {false};
  throw UsageError("domain flags must be yes, no or both");
}

json to_json(const SweepConfig& c) {
  return json{{"model", c.model},
              {"include_domain_data", c.include_domain_data},
              {"hindi_ratio", c.hindi_ratio},
              {"data_fraction", c.data_fraction}};
}

}  // namespace bhasha
