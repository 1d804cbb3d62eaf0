#include "bhasha/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "bhasha/bias.hpp"
#include "bhasha/config.hpp"
#include "bhasha/evaluator.hpp"
#include "bhasha/io.hpp"
#include "bhasha/kernels.hpp"
#include "bhasha/manifest.hpp"
#include "bhasha/orderer.hpp"
#include "bhasha/sampler.hpp"
#include "bhasha/scoring.hpp"
#include "bhasha/textprep.hpp"

namespace bhasha {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  RunConfig cfg;
};

fs::path sibling(const fs::path& primary, std::string_view suffix) {
  fs::path p = primary;
  p.replace_extension();
  return p.string() + std::string(suffix);
}

void write_manifest(RunManifest& m, const fs::path& path) {
  m.finished_at = utc_timestamp();
  write_text(path, m.to_json().dump(2) + "\n");
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string backend_fingerprint(const Backend& b) { return sha256_hex(b.describe()).substr(0, 16); }

json config_snapshot(const Context& ctx, const Backend* backend) {
  json snap = ctx.cfg.snapshot();
  if (backend) {
    snap["backend_fingerprint"] = backend_fingerprint(*backend);
    // Mock and replay descriptors carry no secrets and identify the run exactly.
    const auto desc = backend->describe();
    if (!desc.starts_with("http")) snap["backend"] = desc;
  }
  return snap;
}

std::vector<Sample> read_samples(const fs::path& path) {
  std::vector<Sample> samples;
  for_each_jsonl(path, [&](const json& j, std::size_t) { samples.push_back(sample_from_json(j)); });
  return samples;
}

std::vector<PredictionRecord> read_predictions(const fs::path& path) {
  std::vector<PredictionRecord> records;
  for_each_jsonl(path, [&](const json& j, std::size_t) { records.push_back(prediction_from_json(j)); });
  return records;
}

std::unique_ptr<Backend> open_backend(const Context& ctx) {
  std::string url = ctx.cfg.backend.empty() ? env_or_empty("SCORE_BACKEND_URL") : ctx.cfg.backend;
  if (url.empty()) throw UsageError("no backend: pass --backend or set SCORE_BACKEND_URL");
  return make_backend(url, env_or_empty("SCORE_BACKEND_TOKEN"));
}

RetryPolicy retry_policy(const Context& ctx) {
  RetryPolicy p;
  p.max_attempts = ctx.cfg.max_attempts;
  return p;
}

// --- curate ------------------------------------------------------------------

struct CurateArgs {
  std::string manifest;
  std::vector<std::string> inputs;
  std::string out_dir;
};

int cmd_curate(Context& ctx, const CurateArgs& a) {
  RunManifest m;
  m.command = "curate";
  m.started_at = utc_timestamp();
  m.config = config_snapshot(ctx, nullptr);

  const auto specs = load_manifest(a.manifest);
  m.add_input(a.manifest);
  std::vector<Sample> rows;
  for (const auto& in : a.inputs) {
    auto part = read_samples(in);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    m.add_input(in);
  }

  const auto report = validate_corpus(specs);
  auto curated = curate(specs, rows, ctx.cfg.pipeline.seed);
  for (const auto& w : curated.warnings) ctx.err << "warning: " << w << '\n';

  std::size_t invalid = 0;
  for (const auto& s : curated.samples) {
    auto v = validate_sample(s);
    if (v.ok()) continue;
    if (invalid++ < 5) ctx.err << "invalid sample '" << s.id << "': " << v.violations.front().message << '\n';
  }
  if (invalid) throw DataError(std::to_string(invalid) + " curated samples failed validation");

  const auto formatted = kernels::parallel::format_all(curated.samples);

  const fs::path dir(a.out_dir);
  std::string curated_text, formatted_text;
  for (const auto& s : curated.samples) curated_text += serialize(s) + "\n";
  for (const auto& f : formatted) formatted_text += to_json(f).dump() + "\n";
  write_text(dir / "curated.jsonl", curated_text);
  write_text(dir / "formatted.jsonl", formatted_text);
  write_text(dir / "corpus_report.txt", report.to_text());
  write_text(dir / "corpus_report.json", report.to_json().dump(2) + "\n");
  for (const char* name : {"curated.jsonl", "formatted.jsonl", "corpus_report.txt", "corpus_report.json"})
    m.add_output(dir / name);

  m.metrics = {{"samples", curated.samples.size()},
               {"computed_used_sum", report.computed_used_sum},
               {"stated_used_total", report.stated_used_total},
               {"warnings", curated.warnings.size() + report.warning_count()}};
  write_manifest(m, dir / "run_manifest.json");

  ctx.out << "curated " << curated.samples.size() << " samples from " << specs.size()
          << " datasets (manifest used-sum " << report.computed_used_sum << ", stated "
          << report.stated_used_total << ")\n";
  return kExitOk;
}

// --- order -------------------------------------------------------------------

struct OrderArgs {
  std::string input;
  std::string output;
};

int cmd_order(Context& ctx, const OrderArgs& a) {
  RunManifest m;
  m.command = "order";
  m.started_at = utc_timestamp();

  const auto samples = read_samples(a.input);
  m.add_input(a.input);
  const auto formatted = kernels::parallel::format_all(samples);

  std::unique_ptr<Backend> backend;
  std::unique_ptr<ScoringClient> client;
  std::unique_ptr<BackendTokenCounter> counter;
  if (ctx.cfg.length_mode == LengthMode::TokenCountViaBackend) {
    backend = open_backend(ctx);
    client = std::make_unique<ScoringClient>(*backend, retry_policy(ctx), ctx.cfg.max_in_flight);
    counter = std::make_unique<BackendTokenCounter>(*client, ctx.cfg.model);
  }
  m.config = config_snapshot(ctx, backend.get());

  const auto lengths = kernels::parallel::lengths(formatted, ctx.cfg.length_mode, counter.get());
  std::vector<OrderEntry> entries;
  entries.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    entries.push_back({formatted[i], samples[i].is_cultural, lengths[i]});

  const auto e = static_cast<std::size_t>(
      effective_batch_size(ctx.cfg.pipeline.batch_size, ctx.cfg.pipeline.grad_accum));
  const auto ordered = order(std::move(entries), e);

  std::string text;
  for (const auto& o : ordered) text += to_json(o).dump() + "\n";
  write_text(a.output, text);
  m.add_output(a.output);
  m.metrics = {{"samples", ordered.size()}, {"head_block", std::min(e, ordered.size())}};
  write_manifest(m, sibling(a.output, ".manifest.json"));
  ctx.out << "ordered " << ordered.size() << " samples, head block " << std::min(e, ordered.size())
          << '\n';
  return kExitOk;
}

// --- eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string input;
  std::string output;
  std::string record;
};

int cmd_eval(Context& ctx, const EvalArgs& a) {
  RunManifest m;
  m.command = "eval";
  m.started_at = utc_timestamp();

  std::vector<BenchmarkItem> items;
  for_each_jsonl(a.input, [&](const json& j, std::size_t) { items.push_back(item_from_json(j)); });
  m.add_input(a.input);

  auto backend = open_backend(ctx);
  std::unique_ptr<RecordingBackend> recorder;
  Backend* active = backend.get();
  if (!a.record.empty()) {
    recorder = std::make_unique<RecordingBackend>(*backend, a.record);
    active = recorder.get();
  }
  m.config = config_snapshot(ctx, backend.get());

  EvalOptions opts;
  opts.model = ctx.cfg.model;
  opts.norm = ctx.cfg.norm;
  opts.target = ctx.cfg.target;
  if (!ctx.cfg.chat_template.empty()) {
    opts.chat = ChatTemplate::from_file(ctx.cfg.chat_template);
    m.add_input(ctx.cfg.chat_template);
  }

  ScoringClient client(*active, retry_policy(ctx), ctx.cfg.max_in_flight);
  auto report = evaluate(items, client, opts);
  report.backend = backend_fingerprint(*backend);

  const fs::path out(a.output);
  const auto csv = sibling(out, ".csv");
  const auto preds = sibling(out, ".predictions.jsonl");
  write_text(out, to_json(report).dump(2) + "\n");
  write_text(csv, to_csv(report));
  std::vector<json> log;
  for (const auto& r : prediction_log(report)) log.push_back(to_json(r));
  write_text(preds, to_jsonl(log));
  for (const auto& p : {out, csv, preds}) m.add_output(p);

  json acc = json::object();
  for (const auto& r : report.results) {
    acc[r.benchmark + "/" + std::string(to_string(r.language))] = r.accuracy;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * r.accuracy);
    ctx.out << r.benchmark << " " << to_string(r.language) << ": " << buf << "% (" << r.n_correct
            << "/" << r.n_items;
    if (r.n_unscored) ctx.out << ", " << r.n_unscored << " unscored";
    ctx.out << ")\n";
  }
  m.metrics = {{"accuracy", acc}, {"unscored", report.unscored()}, {"retries", client.retries()}};
  write_manifest(m, sibling(out, ".manifest.json"));

  const auto unscored = report.unscored();
  if (unscored == 0) return kExitOk;

  std::size_t scored = 0;
  std::string first_error;
  for (const auto& r : report.results) {
    scored += r.n_items;
    if (first_error.empty() && !r.unscored.empty()) first_error = r.unscored.front().error;
  }
  ctx.err << unscored << " items unscored; first error: " << first_error << '\n';
  if (scored == 0) return first_error.starts_with("transport") ? kExitTransport : kExitProtocol;
  return ctx.cfg.allow_partial ? kExitOk : kExitPartial;
}

// --- compare -------------------------------------------------------------------

struct CompareArgs {
  std::string baseline;
  std::string candidate;
  std::string output;
  std::string baseline_name = "Baseline";
  std::string candidate_name = "Candidate";
  bool by_domain = false;
  std::string coverage;
  std::string domain_order;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    auto item = text.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

int cmd_compare(Context& ctx, const CompareArgs& a) {
  RunManifest m;
  m.command = "compare";
  m.started_at = utc_timestamp();
  m.config = config_snapshot(ctx, nullptr);
  const fs::path out(a.output);
  const auto csv = sibling(out, ".csv");

  if (a.by_domain) {
    const auto base = read_predictions(a.baseline);
    const auto cand = read_predictions(a.candidate);
    std::map<std::string, std::string> coverage;
    std::vector<std::string> order = split_list(a.domain_order);
    if (!a.coverage.empty()) {
      // domain,coverage rows; the file's order also fixes the row order.
      std::istringstream in(read_text(a.coverage));
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_list(line);
        if (cells.size() != 2) throw DataError("coverage line '" + line + "' needs domain,coverage");
        if (cells[0] == "domain") continue;
        coverage[cells[0]] = cells[1];
        if (a.domain_order.empty()) order.push_back(cells[0]);
      }
      m.add_input(a.coverage);
    }
    const auto table = domain_breakdown(base, cand, coverage, order);
    write_text(out, render_markdown(table, a.baseline_name, a.candidate_name));
    write_text(csv, render_csv(table));
    ctx.out << render_markdown(table, a.baseline_name, a.candidate_name);
  } else {
    const auto base = eval_report_from_json(json::parse(read_text(a.baseline), nullptr, false));
    const auto cand = eval_report_from_json(json::parse(read_text(a.candidate), nullptr, false));
    const auto table = compare_runs(score_table(base), score_table(cand), a.baseline_name, a.candidate_name);
    write_text(out, render_markdown(table));
    write_text(csv, render_csv(table));
    ctx.out << render_markdown(table);
  }
  m.add_input(a.baseline);
  m.add_input(a.candidate);
  m.add_output(out);
  m.add_output(csv);
  write_manifest(m, sibling(out, ".manifest.json"));
  return kExitOk;
}

// --- bias ----------------------------------------------------------------------

struct BiasArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> models;
  std::string output;
  std::string svg;
  bool by_domain = false;
};

int cmd_bias(Context& ctx, const BiasArgs& a) {
  RunManifest m;
  m.command = "bias";
  m.started_at = utc_timestamp();
  m.config = config_snapshot(ctx, nullptr);
  if (!a.models.empty() && a.models.size() != a.inputs.size())
    throw UsageError("--model must be given once per --in");

  std::vector<DistributionSeries> series;
  json indices = json::object();
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const auto records = read_predictions(a.inputs[i]);
    m.add_input(a.inputs[i]);
    const std::string model = a.models.empty() ? fs::path(a.inputs[i]).stem().string() : a.models[i];
    series.push_back({model, "all", choice_distribution(records)});
    if (a.by_domain)
      for (auto& [domain, dist] : per_domain(records)) series.push_back({model, domain, dist});
  }
  for (const auto& s : series) {
    const double idx = bias_index(s.dist);
    indices[s.model + "/" + s.domain] = idx;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", idx);
    ctx.out << s.model << " " << s.domain << " bias_index=" << buf << " n=" << s.dist.total() << '\n';
  }

  write_text(a.output, render_csv(series));
  m.add_output(a.output);
  if (!a.svg.empty()) {
    std::vector<DistributionSeries> global;
    for (const auto& s : series)
      if (s.domain == "all") global.push_back(s);
    write_text(a.svg, render_svg(a.by_domain ? series : global, "Distribution of predicted options"));
    m.add_output(a.svg);
  }
  m.metrics = {{"bias_index", indices}};
  write_manifest(m, sibling(a.output, ".manifest.json"));
  return kExitOk;
}

// --- sweep-plan ------------------------------------------------------------------

struct SweepArgs {
  std::string models;
  std::string ratios = "10..100";
  std::string flags = "both";
  double data_fraction = 0.08;
  std::string output;
};

int cmd_sweep(Context& ctx, const SweepArgs& a) {
  RunManifest m;
  m.command = "sweep-plan";
  m.started_at = utc_timestamp();
  m.config = config_snapshot(ctx, nullptr);

  const auto models = split_list(a.models);
  if (models.empty()) throw UsageError("--models needs at least one model");
  const auto ratios = parse_ratio_list(a.ratios);
  const auto flags = parse_domain_flags(a.flags);
  const auto grid = sweep_grid(models, ratios, flags, a.data_fraction);

  const auto& p = ctx.cfg.pipeline;
  const json training{{"seed", p.seed},
                      {"batch_size", p.batch_size},
                      {"grad_accum", p.grad_accum},
                      {"effective_batch_size", p.effective_batch_size()},
                      {"epochs", p.epochs},
                      {"learning_rate", p.learning_rate},
                      {"weight_decay", p.weight_decay},
                      {"warmup_steps", p.warmup_steps}};
  std::string text;
  for (const auto& c : grid) {
    auto j = to_json(c);
    j["training"] = training;
    text += j.dump() + "\n";
  }
  write_text(a.output, text);
  m.add_output(a.output);
  m.metrics = {{"configs", grid.size()}};
  write_manifest(m, sibling(a.output, ".manifest.json"));
  ctx.out << grid.size() << " sweep configs\n";
  return kExitOk;
}

// --- report --------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> results;
  std::vector<std::string> names;
  std::string output;
};

int cmd_report(Context& ctx, const ReportArgs& a) {
  RunManifest m;
  m.command = "report";
  m.started_at = utc_timestamp();
  m.config = config_snapshot(ctx, nullptr);
  if (!a.names.empty() && a.names.size() != a.results.size())
    throw UsageError("--name must be given once per --results");

  std::vector<std::pair<std::string, ScoreTable>> runs;
  std::set<std::string> benchmarks;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    auto report = eval_report_from_json(json::parse(read_text(a.results[i]), nullptr, false));
    m.add_input(a.results[i]);
    auto table = score_table(report);
    for (const auto& [key, _] : table) benchmarks.insert(key.first);
    std::string name = !a.names.empty() ? a.names[i]
                       : !report.model.empty() ? report.model
                                               : fs::path(a.results[i]).stem().string();
    runs.emplace_back(std::move(name), std::move(table));
  }

  // Core benchmarks first in their usual order, then anything else.
  std::vector<std::string> columns;
  for (const auto& b : core_benchmarks())
    if (benchmarks.count(b)) columns.push_back(b);
  for (const auto& b : benchmarks)
    if (std::find(columns.begin(), columns.end(), b) == columns.end()) columns.push_back(b);

  auto cell = [](const ScoreTable& t, const std::string& b, Language l) {
    auto it = t.find({b, l});
    if (it == t.end()) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", it->second);
    return std::string(buf);
  };

  std::ostringstream md, csv;
  md << "| Run |";
  csv << "run";
  for (const auto& b : columns) {
    md << ' ' << b << " En | " << b << " Hi |";
    csv << ',' << b << "_en," << b << "_hi";
  }
  md << " Avg En | Avg Hi | Avg Tot |\n|---|";
  csv << ",avg_en,avg_hi,avg_tot\n";
  for (std::size_t i = 0; i < 2 * columns.size() + 3; ++i) md << "---|";
  md << '\n';

  json averages = json::object();
  for (const auto& [name, table] : runs) {
    md << "| " << name << " |";
    csv << name;
    for (const auto& b : columns) {
      md << ' ' << cell(table, b, Language::En) << " | " << cell(table, b, Language::Hi) << " |";
      csv << ',' << cell(table, b, Language::En) << ',' << cell(table, b, Language::Hi);
    }
    try {
      const double en = average_scores(table, Language::En);
      const double hi = average_scores(table, Language::Hi);
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.2f | %.2f | %.2f", en, hi, (en + hi) / 2.0);
      md << ' ' << buf << " |\n";
      std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f", en, hi, (en + hi) / 2.0);
      csv << ',' << buf << '\n';
      averages[name] = {{"en", en}, {"hi", hi}, {"overall", (en + hi) / 2.0}};
    } catch (const DataError&) {
      md << " - | - | - |\n";
      csv << ",-,-,-\n";
    }
  }

  const fs::path out(a.output);
  const auto csv_path = sibling(out, ".csv");
  write_text(out, md.str());
  write_text(csv_path, csv.str());
  m.add_output(out);
  m.add_output(csv_path);
  m.metrics = {{"averages", averages}};
  write_manifest(m, sibling(out, ".manifest.json"));
  ctx.out << md.str();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bilingual instruction-data curation and log-likelihood evaluation", "bhasha"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value config file");

  // Flag values land in these optionals and override the config file.
  std::optional<std::uint64_t> seed;
  std::optional<int> batch, accum, max_attempts;
  std::optional<std::string> length_mode, norm, target, backend, model, chat_template;
  bool allow_partial = false;

  CurateArgs curate_args;
  auto* curate_cmd = app.add_subcommand("curate", "sample datasets per the manifest");
  curate_cmd->add_option("--manifest", curate_args.manifest, "dataset manifest CSV")->required();
  curate_cmd->add_option("--in", curate_args.inputs, "corpus JSONL file(s)")->required();
  curate_cmd->add_option("--seed", seed, "sampling seed (default 1024)");
  curate_cmd->add_option("--out", curate_args.out_dir, "output directory")->required();

  OrderArgs order_args;
  auto* order_cmd = app.add_subcommand("order", "order a curated corpus for training");
  order_cmd->add_option("--in", order_args.input, "curated sample JSONL")->required();
  order_cmd->add_option("--out", order_args.output, "ordered JSONL")->required();
  order_cmd->add_option("--batch", batch, "per-device batch size (default 40)");
  order_cmd->add_option("--accum", accum, "gradient accumulation steps (default 15)");
  order_cmd->add_option("--length-mode", length_mode, "ws | bytes | backend");
  order_cmd->add_option("--backend", backend, "scoring backend for --length-mode backend");
  order_cmd->add_option("--model", model, "model name sent to the backend");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "zero-shot log-likelihood evaluation");
  eval_cmd->add_option("--in", eval_args.input, "benchmark item JSONL")->required();
  eval_cmd->add_option("--out", eval_args.output, "result JSON (CSV and prediction log written alongside)")
      ->required();
  eval_cmd->add_option("--backend", backend, "mock://SEED, replay://FILE or http(s) URL");
  eval_cmd->add_option("--model", model, "model name sent to the backend");
  eval_cmd->add_option("--norm", norm, "mean | sum | bytes");
  eval_cmd->add_option("--target", target, "text | letter");
  eval_cmd->add_option("--chat-template", chat_template, "template file with a {user} slot");
  eval_cmd->add_option("--record", eval_args.record, "append request/response pairs to a fixture");
  eval_cmd->add_option("--max-attempts", max_attempts, "attempts per request (default 3)");
  eval_cmd->add_flag("--allow-partial", allow_partial, "exit 0 even if some items are unscored");

  CompareArgs compare_args;
  auto* compare_cmd = app.add_subcommand("compare", "delta table between two runs");
  compare_cmd->add_option("--baseline", compare_args.baseline, "baseline result JSON or prediction log")
      ->required();
  compare_cmd->add_option("--candidate", compare_args.candidate, "candidate result JSON or prediction log")
      ->required();
  compare_cmd->add_option("--out", compare_args.output, "markdown output (CSV written alongside)")->required();
  compare_cmd->add_option("--baseline-name", compare_args.baseline_name);
  compare_cmd->add_option("--candidate-name", compare_args.candidate_name);
  compare_cmd->add_flag("--by-domain", compare_args.by_domain, "inputs are prediction logs; group by domain");
  compare_cmd->add_option("--coverage", compare_args.coverage, "CSV of domain,training-data-used");
  compare_cmd->add_option("--domain-order", compare_args.domain_order, "comma-separated row order");

  BiasArgs bias_args;
  auto* bias_cmd = app.add_subcommand("bias", "predicted-option distribution and bias index");
  bias_cmd->add_option("--in", bias_args.inputs, "prediction log JSONL (repeatable)")->required();
  bias_cmd->add_option("--model", bias_args.models, "series name per --in");
  bias_cmd->add_option("--out", bias_args.output, "histogram CSV")->required();
  bias_cmd->add_option("--svg", bias_args.svg, "grouped bar chart");
  bias_cmd->add_flag("--by-domain", bias_args.by_domain, "add one series per domain");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep-plan", "emit the ratio x domain-data training grid");
  sweep_cmd->add_option("--models", sweep_args.models, "comma-separated model names")->required();
  sweep_cmd->add_option("--ratios", sweep_args.ratios, "10..100, 10..100:5 or a comma list");
  sweep_cmd->add_option("--domain-flags", sweep_args.flags, "yes | no | both");
  sweep_cmd->add_option("--data-fraction", sweep_args.data_fraction, "fraction of the corpus per attempt");
  sweep_cmd->add_option("--out", sweep_args.output, "plan JSONL")->required();

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "per-language accuracy table from result files");
  report_cmd->add_option("--results", report_args.results, "result JSON (repeatable)")->required();
  report_cmd->add_option("--name", report_args.names, "row name per --results");
  report_cmd->add_option("--out", report_args.output, "markdown output (CSV written alongside)")->required();

  std::vector<std::string> argv_storage{"bhasha"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Context ctx{out, err, config_path.empty() ? RunConfig{} : load_config(config_path)};
    auto& c = ctx.cfg;
    if (seed) c.pipeline.seed = *seed;
    if (batch) c.pipeline.batch_size = *batch;
    if (accum) c.pipeline.grad_accum = *accum;
    if (max_attempts) c.max_attempts = *max_attempts;
    if (length_mode) c.length_mode = parse_length_mode(*length_mode);
    if (norm) c.norm = parse_norm(*norm);
    if (target) c.target = parse_target_style(*target);
    if (backend) c.backend = *backend;
    if (model) c.model = *model;
    if (chat_template) c.chat_template = *chat_template;
    if (allow_partial) c.allow_partial = true;

    if (curate_cmd->parsed()) return cmd_curate(ctx, curate_args);
    if (order_cmd->parsed()) return cmd_order(ctx, order_args);
    if (eval_cmd->parsed()) return cmd_eval(ctx, eval_args);
    if (compare_cmd->parsed()) return cmd_compare(ctx, compare_args);
    if (bias_cmd->parsed()) return cmd_bias(ctx, bias_args);
    if (sweep_cmd->parsed()) return cmd_sweep(ctx, sweep_args);
    if (report_cmd->parsed()) return cmd_report(ctx, report_args);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const ProtocolError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kExitProtocol;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const TemplateError& e) {
    err << "template error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace bhasha
