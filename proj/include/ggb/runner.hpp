#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggb/action.hpp"
#include "ggb/env.hpp"
#include "ggb/error.hpp"
#include "ggb/harvest.hpp"
#include "ggb/io.hpp"
#include "ggb/metrics.hpp"
#include "ggb/model_client.hpp"
#include "ggb/parallel.hpp"
#include "ggb/rng.hpp"

namespace ggb {

// ---------------------------------------------------------------------------
// Benchmark records.

struct GroundingCaseRecord {
  std::string id;
  std::string image;
  std::string instruction;
  Platform platform = Platform::web;
  ElementKind kind = ElementKind::text;
  NormBBox bbox;

  static GroundingCaseRecord from_json(const json& j) {
    GroundingCaseRecord r;
    r.id = j.at("case_id").get<std::string>();
    r.image = j.value("image", "");
    r.instruction = j.at("instruction").get<std::string>();
    r.platform = platform_from_string(j.at("platform").get<std::string>());
    r.kind = kind_from_string(j.at("kind").get<std::string>());
    const auto& b = j.at("bbox");
    r.bbox = {b.at(0).get<double>(), b.at(1).get<double>(),
              b.at(2).get<double>(), b.at(3).get<double>()};
    if (!r.bbox.valid() || r.bbox.area() <= 0)
      throw Error(ErrorKind::Schema, "case " + r.id + ": bad gt bbox");
    return r;
  }

  json to_json() const {
    return {{"case_id", id},
            {"image", image},
            {"instruction", instruction},
            {"platform", to_string(platform)},
            {"kind", to_string(kind)},
            {"bbox", {bbox.left, bbox.top, bbox.right, bbox.down}}};
  }
};

// One teacher-forced agent step (AITW or Mind2Web).
struct AgentStepRecord {
  std::string id;
  std::string group;  // AITW subset or Mind2Web split
  std::string instruction;
  std::string image;
  Action ref_action;
  std::optional<NormBBox> ref_bbox;
  std::vector<Action> history;  // reference previous actions

  static AgentStepRecord from_json(const json& j) {
    AgentStepRecord r;
    r.id = j.at("step_id").get<std::string>();
    r.group = j.at("group").get<std::string>();
    r.instruction = j.at("instruction").get<std::string>();
    r.image = j.value("image", "");
    r.ref_action = action_from_json(j.at("ref_action"));
    if (j.contains("ref_bbox")) {
      const auto& b = j["ref_bbox"];
      r.ref_bbox = NormBBox{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>()};
    }
    if (j.contains("history"))
      for (const auto& a : j["history"]) r.history.push_back(action_from_json(a));
    return r;
  }

  json to_json() const {
    json j{{"step_id", id},
           {"group", group},
           {"instruction", instruction},
           {"image", image},
           {"ref_action", action_to_json(ref_action)}};
    if (ref_bbox)
      j["ref_bbox"] = {ref_bbox->left, ref_bbox->top, ref_bbox->right,
                       ref_bbox->down};
    json h = json::array();
    for (const auto& a : history) h.push_back(action_to_json(a));
    j["history"] = h;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Predictions: the decoupling point between inference and scoring.

struct Prediction {
  std::string id;
  std::string prompt;
  std::string raw_output;
  std::optional<json> parsed;
  std::optional<std::string> error;

  json to_json() const {
    json j{{"id", id}, {"prompt", prompt}, {"raw_output", raw_output}};
    if (parsed) j["parsed"] = *parsed;
    if (error) j["error"] = *error;
    return j;
  }

  static Prediction from_json(const json& j) {
    Prediction p;
    p.id = j.at("id").get<std::string>();
    p.prompt = j.value("prompt", "");
    p.raw_output = j.value("raw_output", "");
    if (j.contains("parsed")) p.parsed = j["parsed"];
    if (j.contains("error")) p.error = j["error"].get<std::string>();
    return p;
  }
};

// ---------------------------------------------------------------------------
// Grounding evaluation (ScreenSpot protocol).

struct GroundingEvalResult {
  GroundingReport report;
  DistanceHistogram histogram;
  std::vector<Prediction> predictions;
  long long endpoint_errors = 0;
};

struct GroundingEvalOptions {
  std::vector<std::string> prompt_pool{std::string(kDefaultGroundingPrompt)};
  std::uint64_t seed = 0;
  int workers = 1;
};

inline std::string grounding_prompt_for(const GroundingCaseRecord& c,
                                        const GroundingEvalOptions& opts) {
  Rng rng(derive_seed(opts.seed, "ground\x1f" + c.id));
  return build_grounding_prompt(c.instruction, opts.prompt_pool, rng);
}

// Scoring side: joins predictions to cases by id; missing or
// unparseable predictions count as misses.
inline GroundingEvalResult score_grounding(
    const std::vector<GroundingCaseRecord>& cases,
    const std::vector<Prediction>& predictions) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  std::vector<GroundingCase> scored;
  scored.reserve(cases.size());
  for (const auto& c : cases) {
    GroundingCase g;
    g.platform = c.platform;
    g.kind = c.kind;
    g.gt_bbox = c.bbox;
    auto it = by_id.find(c.id);
    if (it != by_id.end() && !it->second->error) {
      auto loc = try_parse_location(it->second->raw_output);
      if (loc && std::holds_alternative<NormPoint>(*loc))
        g.prediction = std::get<NormPoint>(*loc);
    }
    scored.push_back(g);
  }
  GroundingEvalResult result;
  result.report = click_accuracy(scored);
  result.histogram = distance_histogram(scored);
  result.predictions = predictions;
  return result;
}

inline GroundingEvalResult run_grounding_eval(
    const std::vector<GroundingCaseRecord>& cases, ModelClient& client,
    const GroundingEvalOptions& opts = {}) {
  std::vector<Prediction> predictions(cases.size());
  parallel_for(cases.size(), opts.workers, [&](std::size_t i) {
    const auto& c = cases[i];
    Prediction p;
    p.id = c.id;
    p.prompt = grounding_prompt_for(c, opts);
    try {
      p.raw_output = client.predict(c.image, p.prompt);
      auto loc = try_parse_location(p.raw_output);
      if (loc && std::holds_alternative<NormPoint>(*loc)) {
        auto pt = std::get<NormPoint>(*loc);
        p.parsed = json{{"point", {pt.x, pt.y}}};
      }
    } catch (const Error& e) {
      p.error = e.what();
    }
    predictions[i] = std::move(p);
  });
  auto result = score_grounding(cases, predictions);
  for (const auto& p : predictions)
    if (p.error) ++result.endpoint_errors;
  return result;
}

// ---------------------------------------------------------------------------
// Episode runner.

enum class EpisodeOutcome { success, failure, step_limit };

struct TranscriptEntry {
  std::string prompt;
  std::string raw_output;
  std::optional<Action> parsed;
};

struct EpisodeResult {
  std::string task;
  std::uint64_t seed = 0;
  int steps = 0;
  EpisodeOutcome outcome = EpisodeOutcome::failure;
  std::string cause;  // parse / env / endpoint / step-limit / declared status
  std::vector<TranscriptEntry> transcript;
  bool succeeded() const { return outcome == EpisodeOutcome::success; }
};

struct EpisodeOptions {
  int max_steps = 30;
  int history_k = 4;
  std::string agent_template{kDefaultAgentTemplate};
};

inline EpisodeResult run_episode(EnvAdapter& env, ModelClient& client,
                                 const std::string& task, std::uint64_t seed,
                                 const EpisodeOptions& opts = {}) {
  EpisodeResult result;
  result.task = task;
  result.seed = seed;
  Observation obs = env.reset(task, seed);
  const std::string instruction = obs.instruction;  // episode-level
  std::vector<Action> history;

  while (result.steps < opts.max_steps) {
    TranscriptEntry entry;
    entry.prompt = build_agent_prompt(
        {instruction, history, opts.history_k}, opts.agent_template);
    try {
      entry.raw_output = client.predict(obs.screenshot, entry.prompt);
    } catch (const Error& e) {
      result.cause = std::string("endpoint: ") + e.what();
      result.transcript.push_back(std::move(entry));
      return result;
    }
    auto parsed = try_parse_action(entry.raw_output);
    if (!parsed) {
      result.cause = "parse";
      result.transcript.push_back(std::move(entry));
      return result;
    }
    if (std::holds_alternative<EpisodeStatus>(*parsed)) {
      // The environment decides success; a declared status before an
      // env terminal state ends the episode unsuccessfully.
      result.cause = encode_action(std::get<EpisodeStatus>(*parsed));
      result.transcript.push_back(std::move(entry));
      return result;
    }
    Action action = std::get<Action>(*parsed);
    entry.parsed = action;
    result.transcript.push_back(std::move(entry));
    ++result.steps;

    EnvStatus status;
    try {
      std::tie(obs, status) = env.apply(action);
    } catch (const Error& e) {
      result.cause = std::string("env: ") + e.what();
      return result;
    }
    if (status == EnvStatus::success) {
      result.outcome = EpisodeOutcome::success;
      return result;
    }
    if (status == EnvStatus::failure) {
      result.cause = "env";
      return result;
    }
    history.push_back(action);
  }
  result.outcome = EpisodeOutcome::step_limit;
  result.cause = "step-limit";
  return result;
}

// ---------------------------------------------------------------------------
// MiniWob harness.

using EnvFactory =
    std::function<std::unique_ptr<EnvAdapter>(const std::string& task)>;

struct MiniwobRunResult {
  MiniwobReport report;
  std::vector<EpisodeResult> episodes;  // ordered by (task, seed)
  std::vector<std::string> failed_tasks;
};

inline MiniwobRunResult run_miniwob(const std::vector<std::string>& tasks,
                                    int seeds_per_task, const EnvFactory& factory,
                                    ModelClient& client,
                                    const EpisodeOptions& opts = {},
                                    int workers = 1) {
  MiniwobRunResult result;
  std::map<std::string, std::vector<bool>> outcomes;
  std::vector<std::pair<std::string, std::uint64_t>> jobs;
  for (const auto& task : tasks) {
    // probe task creation once so broken tasks are flagged, not fatal
    try {
      auto env = factory(task);
      if (!env) throw Error(ErrorKind::InvalidArgument, "factory returned null");
    } catch (const std::exception&) {
      result.failed_tasks.push_back(task);
      continue;
    }
    for (int seed = 0; seed < seeds_per_task; ++seed)
      jobs.push_back({task, static_cast<std::uint64_t>(seed)});
  }

  std::vector<EpisodeResult> episodes(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    auto env = factory(jobs[i].first);
    episodes[i] = run_episode(*env, client, jobs[i].first, jobs[i].second, opts);
  });
  for (const auto& ep : episodes)
    outcomes[ep.task].push_back(ep.succeeded());
  result.report = miniwob_score(outcomes);
  result.episodes = std::move(episodes);
  return result;
}

// ---------------------------------------------------------------------------
// Offline agent evaluation (AITW / Mind2Web), teacher-forced history.

enum class AgentBenchmark { aitw, mind2web };

struct OfflineEvalResult {
  std::optional<AitwReport> aitw;
  std::optional<Mind2WebReport> mind2web;
  std::vector<Prediction> predictions;
  long long endpoint_errors = 0;
};

struct OfflineEvalOptions {
  int history_k = 4;
  std::string agent_template{kDefaultAgentTemplate};
  double tau = kDefaultClickDistanceTau;
  int workers = 1;
};

inline std::string agent_prompt_for(const AgentStepRecord& r,
                                    const OfflineEvalOptions& opts) {
  return build_agent_prompt({r.instruction, r.history, opts.history_k},
                            opts.agent_template);
}

inline OfflineEvalResult score_offline(
    AgentBenchmark benchmark, const std::vector<AgentStepRecord>& records,
    const std::vector<Prediction>& predictions,
    const OfflineEvalOptions& opts = {}) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  std::map<std::string, std::vector<AgentStep>> grouped;
  for (const auto& r : records) {
    AgentStep step;
    step.ref_action = r.ref_action;
    step.ref_bbox = r.ref_bbox;
    auto it = by_id.find(r.id);
    if (it != by_id.end() && !it->second->error) {
      auto parsed = try_parse_action(it->second->raw_output);
      if (parsed && std::holds_alternative<Action>(*parsed))
        step.pred_action = std::get<Action>(*parsed);
    }
    grouped[r.group].push_back(step);
  }
  OfflineEvalResult result;
  result.predictions = predictions;
  if (benchmark == AgentBenchmark::aitw)
    result.aitw = aitw_scores(grouped, opts.tau);
  else
    result.mind2web = mind2web_scores(grouped);
  return result;
}

inline OfflineEvalResult run_offline_agent_eval(
    AgentBenchmark benchmark, const std::vector<AgentStepRecord>& records,
    ModelClient& client, const OfflineEvalOptions& opts = {}) {
  std::vector<Prediction> predictions(records.size());
  parallel_for(records.size(), opts.workers, [&](std::size_t i) {
    const auto& r = records[i];
    Prediction p;
    p.id = r.id;
    p.prompt = agent_prompt_for(r, opts);
    try {
      p.raw_output = client.predict(r.image, p.prompt);
      auto parsed = try_parse_action(p.raw_output);
      if (parsed && std::holds_alternative<Action>(*parsed))
        p.parsed = action_to_json(std::get<Action>(*parsed));
    } catch (const Error& e) {
      p.error = e.what();
    }
    predictions[i] = std::move(p);
  });
  auto result = score_offline(benchmark, records, predictions, opts);
  for (const auto& p : predictions)
    if (p.error) ++result.endpoint_errors;
  return result;
}

// ---------------------------------------------------------------------------
// Report emission: canonical JSON, markdown tables, CSV histogram.
// Byte-deterministic for identical inputs.

namespace detail {

inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
  return buf;
}

}  // namespace detail

inline std::string grounding_markdown(const GroundingReport& r) {
  std::string md =
      "| Mobile Text | Mobile Icon/Widget | Desktop Text | Desktop "
      "Icon/Widget | Web Text | Web Icon/Widget | Average (macro) | Average "
      "(micro) |\n";
  md += "|---|---|---|---|---|---|---|---|\n|";
  for (const char* cell :
       {"mobile/text", "mobile/icon/widget", "desktop/text",
        "desktop/icon/widget", "web/text", "web/icon/widget"}) {
    auto it = r.cells.find(cell);
    md += " " + (it == r.cells.end() ? std::string("-")
                                     : detail::pct(it->second.value())) + " |";
  }
  md += " " + detail::pct(r.macro_average) + " | " +
        detail::pct(r.micro.value()) + " |\n";
  return md;
}

inline std::string aitw_markdown(const AitwReport& r) {
  std::string md = "|";
  for (const auto& s : kAitwSubsets) md += " " + s + " |";
  md += " Overall | ClickAcc |\n|---|---|---|---|---|---|---|\n|";
  for (const auto& s : kAitwSubsets) {
    auto it = r.subset_scores.find(s);
    md += " " + (it == r.subset_scores.end()
                     ? std::string("-")
                     : detail::pct(it->second.value())) + " |";
  }
  md += " " + detail::pct(r.overall) + " | " + detail::pct(r.click_acc.value()) +
        " |\n";
  return md;
}

inline std::string mind2web_markdown(const Mind2WebReport& r) {
  std::string md = "| Split | Ele.Acc | Op.F1 | Step SR |\n|---|---|---|---|\n";
  for (const auto& split : kMind2WebSplits) {
    auto it = r.splits.find(split);
    if (it == r.splits.end()) continue;
    md += "| " + split + " | " + detail::pct(it->second.ele_acc) + " | " +
          detail::pct(it->second.op_f1) + " | " + detail::pct(it->second.step_sr) +
          " |\n";
  }
  for (const auto& [split, s] : r.splits)
    if (std::find(kMind2WebSplits.begin(), kMind2WebSplits.end(), split) ==
        kMind2WebSplits.end())
      md += "| " + split + " | " + detail::pct(s.ele_acc) + " | " +
            detail::pct(s.op_f1) + " | " + detail::pct(s.step_sr) + " |\n";
  return md;
}

inline std::string miniwob_markdown(const MiniwobReport& r) {
  std::string md = "| Task | Success rate |\n|---|---|\n";
  for (const auto& [task, ratio] : r.per_task)
    md += "| " + task + " | " + detail::pct(ratio.value()) + " |\n";
  md += "| **Mean** | " + detail::pct(r.mean) + " |\n";
  return md;
}

inline std::string histogram_csv(const DistanceHistogram& h) {
  std::string csv = "bin_lo,bin_hi,hit,miss\n";
  for (int i = 0; i < DistanceHistogram::kBins; ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%lld,%lld\n",
                  i * DistanceHistogram::kBinWidth,
                  (i + 1) * DistanceHistogram::kBinWidth, h.hit[i], h.miss[i]);
    csv += buf;
  }
  return csv;
}

struct ReportBundle {
  json report;          // canonical machine-readable report
  std::string markdown;
  std::optional<std::string> csv;  // histogram, when applicable
};

inline void emit_report(const ReportBundle& bundle,
                        const std::filesystem::path& out_dir,
                        const std::string& stem = "report") {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / (stem + ".json"), bundle.report.dump(2) + "\n");
  write_file(out_dir / (stem + ".md"), bundle.markdown);
  if (bundle.csv) write_file(out_dir / (stem + "_histogram.csv"), *bundle.csv);
}

inline void write_predictions(const std::vector<Prediction>& predictions,
                              const std::filesystem::path& path) {
  std::vector<json> lines;
  lines.reserve(predictions.size());
  for (const auto& p : predictions) lines.push_back(p.to_json());
  write_jsonl(path, lines);
}

inline std::vector<Prediction> read_predictions(
    const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for (const auto& j : read_jsonl(path)) out.push_back(Prediction::from_json(j));
  return out;
}

}  // namespace ggb
