#include "bhasha/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <numeric>
#include <sstream>

#include "bhasha/rng.hpp"

namespace bhasha {

SamplingPlan plan_from_spec(const DatasetSpec& spec) {
  SamplingPlan plan{spec.source, 0, 0, false};
  if (!spec.hindi_ratio) {
    plan.take_all = true;
    return plan;
  }
  // Ratios are percentages; scale to integer hundredths first so that 85 and
  // 85.0 give identical counts without floating-point drift.
  const auto ratio_centi = static_cast<std::uint64_t>(std::llround(*spec.hindi_ratio * 100.0));
  plan.hindi_count = spec.used_samples * ratio_centi / 10'000;
  plan.english_count = spec.used_samples - plan.hindi_count;
  return plan;
}

ShortageError::ShortageError(std::string src, Language lang, std::uint64_t short_by)
    : DataError("source '" + src + "' is short of " + std::to_string(short_by) + " " +
                std::string(display_name(lang)) + " rows"),
      source(std::move(src)),
      language(lang),
      deficit(short_by) {}

namespace {

void select_indices(Xoshiro256& rng, std::vector<std::size_t>& pool, std::uint64_t k,
                    std::vector<std::size_t>& out) {
  const std::uint64_t m = pool.size();
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + rng.below(m - i);
    std::swap(pool[i], pool[j]);
  }
  out.insert(out.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
}

}  // namespace

std::vector<Sample> draw(std::span<const Sample> rows, const SamplingPlan& plan,
                         std::uint64_t seed) {
  if (plan.take_all) return {rows.begin(), rows.end()};

  std::vector<std::size_t> hindi, english;
  for (std::size_t i = 0; i < rows.size(); ++i)
    (rows[i].language == Language::Hi ? hindi : english).push_back(i);

  if (hindi.size() < plan.hindi_count)
    throw ShortageError(plan.source, Language::Hi, plan.hindi_count - hindi.size());
  if (english.size() < plan.english_count)
    throw ShortageError(plan.source, Language::En, plan.english_count - english.size());

  Xoshiro256 rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(plan.hindi_count + plan.english_count);
  select_indices(rng, hindi, plan.hindi_count, chosen);
  select_indices(rng, english, plan.english_count, chosen);
  std::sort(chosen.begin(), chosen.end());

  std::vector<Sample> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(rows[i]);
  return out;
}

CurationResult curate(std::span<const DatasetSpec> specs, std::span<const Sample> rows,
                      std::uint64_t seed) {
  std::map<std::string, std::vector<Sample>> by_source;
  for (const auto& r : rows) by_source[r.source].push_back(r);

  CurationResult result;
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    if (!seen.insert(spec.source).second)
      throw DataError("manifest lists source '" + spec.source + "' twice");
    for (auto& w : validate_spec(spec)) result.warnings.push_back(spec.source + ": " + w.message);
    auto it = by_source.find(spec.source);
    static const std::vector<Sample> kNone;
    const auto& source_rows = it == by_source.end() ? kNone : it->second;
    if (source_rows.empty()) result.warnings.push_back(spec.source + ": no input rows");
    auto drawn = draw(source_rows, plan_from_spec(spec), seed);
    result.samples.insert(result.samples.end(), std::make_move_iterator(drawn.begin()),
                          std::make_move_iterator(drawn.end()));
  }
  for (const auto& [source, source_rows] : by_source)
    if (!seen.count(source))
      result.warnings.push_back(source + ": not in manifest, " +
                                std::to_string(source_rows.size()) + " rows ignored");
  return result;
}

std::size_t CorpusReport::warning_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.warnings.size();
  return n + (used_sum_matches() ? 0 : 1);
}

std::string CorpusReport::to_text() const {
  std::ostringstream os;
  os << "source\ttotal\tused\thindi_ratio\thindi\tenglish\n";
  for (const auto& r : rows) {
    os << r.spec.source << '\t' << r.spec.total_samples << '\t' << r.spec.used_samples << '\t';
    if (r.spec.hindi_ratio)
      os << *r.spec.hindi_ratio << '\t' << r.plan.hindi_count << '\t' << r.plan.english_count;
    else
      os << "N/A\t-\t-";
    os << '\n';
    for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
  }
  os << "computed used sum: " << computed_used_sum << '\n';
  os << "stated used total: " << stated_used_total << '\n';
  os << "computed total sum: " << computed_total_sum << '\n';
  os << "stated collected total: " << stated_collected_total << '\n';
  if (!used_sum_matches())
    os << "warning: computed used sum differs from stated total by "
       << (static_cast<std::int64_t>(computed_used_sum) -
           static_cast<std::int64_t>(stated_used_total))
       << '\n';
  return os.str();
}

nlohmann::json CorpusReport::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"source", r.spec.source},
                       {"domain", r.spec.domain},
                       {"total", r.spec.total_samples},
                       {"used", r.spec.used_samples},
                       {"take_all", r.plan.take_all},
                       {"hindi_count", r.plan.hindi_count},
                       {"english_count", r.plan.english_count},
                       {"warnings", r.warnings}};
    row["hindi_ratio"] = r.spec.hindi_ratio ? nlohmann::json(*r.spec.hindi_ratio) : nullptr;
    j["rows"].push_back(std::move(row));
  }
  j["computed_used_sum"] = computed_used_sum;
  j["stated_used_total"] = stated_used_total;
  j["computed_total_sum"] = computed_total_sum;
  j["stated_collected_total"] = stated_collected_total;
  j["used_sum_matches"] = used_sum_matches();
  return j;
}

CorpusReport validate_corpus(std::span<const DatasetSpec> specs) {
  CorpusReport report;
  for (const auto& spec : specs) {
    CorpusReportRow row{spec, plan_from_spec(spec), {}};
    for (auto& w : validate_spec(spec)) row.warnings.push_back(std::move(w.message));
    report.computed_used_sum += spec.used_samples;
    report.computed_total_sum += spec.total_samples;
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  for (auto& s : cells) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }
  return cells;
}

std::uint64_t parse_count(const std::string& cell, std::size_t line_no) {
  std::string digits;
  for (char c : cell) {
    if (c == ',' || c == '_') continue;
    if (c < '0' || c > '9')
      throw DataError("manifest line " + std::to_string(line_no) + ": bad count '" + cell + "'");
    digits.push_back(c);
  }
  if (digits.empty())
    throw DataError("manifest line " + std::to_string(line_no) + ": empty count");
  return std::stoull(digits);
}

}  // namespace

std::vector<DatasetSpec> parse_manifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  int col_domain = -1, col_source = -1, col_total = -1, col_used = -1, col_ratio = -1;
  bool have_header = false;
  std::vector<DatasetSpec> specs;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        const auto& h = cells[i];
        if (h == "domain") col_domain = i;
        else if (h == "source") col_source = i;
        else if (h == "total") col_total = i;
        else if (h == "used") col_used = i;
        else if (h == "hindi_ratio") col_ratio = i;
      }
      if (col_source < 0 || col_total < 0 || col_used < 0 || col_ratio < 0)
        throw DataError("manifest header must name source, total, used, hindi_ratio");
      have_header = true;
      continue;
    }
    const int needed = std::max({col_domain, col_source, col_total, col_used, col_ratio});
    if (static_cast<int>(cells.size()) <= needed)
      throw DataError("manifest line " + std::to_string(line_no) + ": too few columns");

    DatasetSpec spec;
    if (col_domain >= 0) spec.domain = cells[col_domain];
    spec.source = cells[col_source];
    spec.total_samples = parse_count(cells[col_total], line_no);
    spec.used_samples = parse_count(cells[col_used], line_no);
    const auto& ratio = cells[col_ratio];
    if (!(ratio.empty() || ratio == "N/A" || ratio == "*")) {
      try {
        std::size_t used = 0;
        spec.hindi_ratio = std::stod(ratio, &used);
        if (used != ratio.size()) throw std::invalid_argument(ratio);
      } catch (const std::logic_error&) {
        throw DataError("manifest line " + std::to_string(line_no) + ": bad ratio '" + ratio + "'");
      }
    }
    validate_spec(spec);
    specs.push_back(std::move(spec));
  }
  if (!have_header) throw DataError("manifest is empty");
  return specs;
}

std::vector<DatasetSpec> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string format_manifest(std::span<const DatasetSpec> specs) {
  std::ostringstream os;
  os << "domain,source,total,used,hindi_ratio\n";
  for (const auto& s : specs) {
    os << s.domain << ',' << s.source << ',' << s.total_samples << ',' << s.used_samples << ',';
    if (s.hindi_ratio)
      os << *s.hindi_ratio;
    else
      os << "N/A";
    os << '\n';
  }
  return os.str();
}

std::vector<DatasetSpec> reference_manifest() {
  using R = std::optional<double>;
  const R na;
  return {
      {"Legal FAQ", "India Law", 51'210, 51'210, na},
      {"Cooking Recipes", "India Recipe", 13'742, 13'742, na},
      {"Travel FAQ", "India Travel", 2'000, 2'000, na},
      {"Tax FAQ", "India TAX", 2'235, 2'235, na},
      {"General Knowledge", "India UPSC", 620, 620, na},
      {"General", "BoolQ", 18'799, 18'799, na},
      {"General", "Context MCQs", 18'505, 18'505, na},
      {"General", "ARC challenge", 2'835, 2'835, na},
      {"General", "ARC Easy", 5'637, 5'637, na},
      {"General", "Winogrande XL", 82'973, 10'000, R{85}},
      {"Biology", "Camel Biology", 39'990, 39'990, na},
      {"Biology", "Bio Instruct", 49'956, 49'956, na},
      {"Coding", "MBPP", 928, 928, na},
      {"Chemistry", "Camel Chemistry", 39'975, 39'975, na},
      {"NLI", "XNLI/IndicXNLI", 395'192, 20'000, R{80}},
      {"Math", "MATH QA", 68'583, 10'000, R{50}},
      {"Math", "Math Hard", 4'593, 4'593, na},
      {"Math", "Math Easy", 14'953, 14'953, na},
      {"Math", "GSM8K", 14'937, 14'973, na},
      {"Math", "Camel Math", 99'626, 10'000, R{50}},
      {"Math", "META Math", 199'782, 20'000, R{80}},
      {"Math", "Orca Math", 399'847, 10'000, R{50}},
      {"Medical", "MedMCQA", 372'779, 20'000, R{70}},
      {"Paraphrasing", "Aya Paraphrase", 1'001, 1'001, na},
      {"Physics", "Camel Physics", 39'995, 39'995, na},
      {"Reasoning", "PIQA", 35'396, 35'396, na},
      {"Reasoning", "SIQA", 65'630, 20'000, R{80}},
      {"Simplification", "Aya Simplify", 994'944, 10'000, R{60}},
      {"Summarization", "XLSum", 79'625, 10'000, R{50}},
      {"Translation", "Aya Translate", 1'156, 1'156, na},
  };
}

}  // namespace bhasha
