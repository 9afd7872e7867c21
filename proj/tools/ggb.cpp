// Umbrella CLI: harvesting, corpus assembly, dataset prep, evaluation,
// re-scoring and report emission.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggb/cdp.hpp"
#include "ggb/dataprep.hpp"
#include "ggb/env.hpp"
#include "ggb/harvest.hpp"
#include "ggb/io.hpp"
#include "ggb/model_client.hpp"
#include "ggb/runner.hpp"

namespace fs = std::filesystem;
using namespace ggb;

namespace {

// GGB_ENDPOINT / GGB_TIMEOUT override the corresponding flags.
std::string effective_endpoint(const std::string& flag) {
  if (const char* env = std::getenv("GGB_ENDPOINT"); env && *env) return env;
  return flag;
}

double effective_timeout(double flag) {
  if (const char* env = std::getenv("GGB_TIMEOUT"); env && *env) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument,
                  std::string("GGB_TIMEOUT is not a number: ") + env);
    }
  }
  return flag;
}

HttpModelClient make_client(const std::string& endpoint, double timeout_s) {
  std::string url = effective_endpoint(endpoint);
  if (url.empty())
    throw Error(ErrorKind::InvalidArgument,
                "no model endpoint (use --endpoint or GGB_ENDPOINT)");
  if (url.rfind("http://", 0) != 0 && url.rfind("https://", 0) != 0)
    url = "http://" + url;
  return HttpModelClient({url, effective_timeout(timeout_s)});
}

std::vector<GroundingCaseRecord> load_cases(const fs::path& path) {
  std::vector<GroundingCaseRecord> out;
  for (const auto& j : read_jsonl(path))
    out.push_back(GroundingCaseRecord::from_json(j));
  if (out.empty()) throw Error(ErrorKind::Schema, path.string() + ": no cases");
  return out;
}

std::vector<AgentStepRecord> load_steps(const fs::path& path) {
  std::vector<AgentStepRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(AgentStepRecord::from_json(j));
  if (out.empty()) throw Error(ErrorKind::Schema, path.string() + ": no steps");
  return out;
}

json screenspot_report_json(const GroundingEvalResult& r, std::uint64_t seed) {
  return {{"benchmark", "screenspot"},
          {"seed", seed},
          {"endpoint_errors", r.endpoint_errors},
          {"report", r.report.to_json()},
          {"histogram", r.histogram.to_json()}};
}

json offline_report_json(const std::string& benchmark, const OfflineEvalResult& r) {
  json j{{"benchmark", benchmark}, {"endpoint_errors", r.endpoint_errors}};
  if (r.aitw) j["report"] = r.aitw->to_json();
  if (r.mind2web) j["report"] = r.mind2web->to_json();
  return j;
}

void emit_screenspot(const GroundingEvalResult& result, std::uint64_t seed,
                     const fs::path& out_dir) {
  ReportBundle bundle;
  bundle.report = screenspot_report_json(result, seed);
  bundle.markdown = grounding_markdown(result.report);
  bundle.csv = histogram_csv(result.histogram);
  emit_report(bundle, out_dir);
}

void emit_offline(const std::string& benchmark, const OfflineEvalResult& result,
                  const fs::path& out_dir) {
  ReportBundle bundle;
  bundle.report = offline_report_json(benchmark, result);
  bundle.markdown = result.aitw ? aitw_markdown(*result.aitw)
                                : mind2web_markdown(*result.mind2web);
  emit_report(bundle, out_dir);
}

// ---------------------------------------------------------------------------
// Report reconstruction from report.json (for `report`).

GroundingReport grounding_report_from_json(const json& j) {
  GroundingReport r;
  if (j.contains("cells"))
    for (auto it = j["cells"].begin(); it != j["cells"].end(); ++it)
      r.cells[it.key()] = {it.value().at("hits").get<long long>(),
                           it.value().at("total").get<long long>()};
  r.macro_average = j.value("macro_average", 0.0);
  for (const auto& [k, cell] : r.cells) {
    r.micro.hits += cell.hits;
    r.micro.total += cell.total;
  }
  return r;
}

DistanceHistogram histogram_from_json(const json& j) {
  DistanceHistogram h;
  if (!j.contains("bins")) return h;
  int i = 0;
  for (const auto& bin : j["bins"]) {
    if (i >= DistanceHistogram::kBins) break;
    h.hit[i] = bin.value("hit", 0LL);
    h.miss[i] = bin.value("miss", 0LL);
    ++i;
  }
  return h;
}

AitwReport aitw_report_from_json(const json& j) {
  AitwReport r;
  if (j.contains("subsets"))
    for (auto it = j["subsets"].begin(); it != j["subsets"].end(); ++it)
      r.subset_scores[it.key()] = {it.value().at("hits").get<long long>(),
                                   it.value().at("total").get<long long>()};
  r.overall = j.value("overall", 0.0);
  if (j.contains("click_acc"))
    r.click_acc = {j["click_acc"].value("hits", 0LL),
                   j["click_acc"].value("total", 0LL)};
  if (j.contains("empty_subsets"))
    for (const auto& s : j["empty_subsets"]) r.empty_subsets.push_back(s);
  r.tau = j.value("tau", kDefaultClickDistanceTau);
  return r;
}

Mind2WebReport mind2web_report_from_json(const json& j) {
  Mind2WebReport r;
  if (j.contains("splits"))
    for (auto it = j["splits"].begin(); it != j["splits"].end(); ++it)
      r.splits[it.key()] = {it.value().value("ele_acc", 0.0),
                            it.value().value("op_f1", 0.0),
                            it.value().value("step_sr", 0.0),
                            it.value().value("total", 0LL)};
  if (j.contains("empty_splits"))
    for (const auto& s : j["empty_splits"]) r.empty_splits.push_back(s);
  return r;
}

MiniwobReport miniwob_report_from_json(const json& j) {
  MiniwobReport r;
  if (j.contains("tasks"))
    for (auto it = j["tasks"].begin(); it != j["tasks"].end(); ++it)
      r.per_task[it.key()] = {it.value().at("successes").get<long long>(),
                              it.value().at("seeds").get<long long>()};
  r.mean = j.value("mean", 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// MiniWob scripts file: JSONL {task, actions: [action...], instruction?}.

struct MiniwobScript {
  std::string task;
  std::string instruction;
  std::vector<Action> actions;
};

std::vector<MiniwobScript> load_scripts(const fs::path& path) {
  std::vector<MiniwobScript> out;
  for (const auto& j : read_jsonl(path)) {
    MiniwobScript s;
    s.task = j.at("task").get<std::string>();
    s.instruction = j.value("instruction", "");
    for (const auto& a : j.at("actions")) s.actions.push_back(action_from_json(a));
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorKind::Schema, path.string() + ": no tasks");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"GUI-grounding data curation and agent evaluation toolkit"};
  app.require_subcommand(1);

  // ---- harvest ------------------------------------------------------------
  auto* harvest = app.add_subcommand("harvest", "Build grounding samples");
  harvest->require_subcommand(1);

  std::string hv_urls, hv_renderer, hv_out;
  double hv_timeout = 30.0;
  auto* hv_web = harvest->add_subcommand("web", "Harvest rendered web pages");
  hv_web->add_option("--urls", hv_urls, "File with one URL per line")->required();
  hv_web->add_option("--renderer", hv_renderer, "Remote-debugging address host:port")
      ->required();
  hv_web->add_option("--out", hv_out, "Output directory")->required();
  hv_web->add_option("--timeout", hv_timeout, "Per-page timeout in seconds");

  std::string hf_dir, hf_out;
  int hf_parallel = 1;
  auto* hv_fix = harvest->add_subcommand("fixtures", "Harvest fixture snapshot dirs");
  hv_fix->add_option("--dir", hf_dir, "Directory of page fixture dirs")->required();
  hv_fix->add_option("--out", hf_out, "Output directory")->required();
  hv_fix->add_option("--parallel", hf_parallel, "Worker count");

  std::string ic_in, ic_out, ic_task = "text_2_point", ic_prompts;
  std::uint64_t ic_seed = 0;
  auto* hv_inv = harvest->add_subcommand("invert-captions",
                                         "Invert widget-caption records");
  hv_inv->add_option("--in", ic_in, "Caption JSONL")->required();
  hv_inv->add_option("--out", ic_out, "Output directory")->required();
  hv_inv->add_option("--task", ic_task, "Target task kind");
  hv_inv->add_option("--prompts", ic_prompts, "Prompt pool file (one per line)");
  hv_inv->add_option("--seed", ic_seed, "Seed");

  // ---- assemble -----------------------------------------------------------
  std::string as_in, as_mix, as_out;
  long long as_budget = 0;
  std::uint64_t as_seed = 0;
  auto* assemble = app.add_subcommand("assemble", "Assemble a mixed corpus");
  assemble->add_option("--in", as_in, "Directory of sample JSONL files")->required();
  assemble->add_option("--mix", as_mix, "Mix spec JSON (defaults to the standard mix)");
  assemble->add_option("--budget", as_budget, "Total sample budget");
  assemble->add_option("--seed", as_seed, "Seed");
  assemble->add_option("--out", as_out, "Output directory")->required();

  // ---- prep ---------------------------------------------------------------
  auto* prep = app.add_subcommand("prep", "Dataset preparation");
  prep->require_subcommand(1);

  std::string sa_in, sa_out;
  std::uint64_t sa_seed = 0;
  std::size_t sa_validation = 100;
  auto* prep_split = prep->add_subcommand("split-aitw", "Instruction-wise split");
  prep_split->add_option("--in", sa_in, "Episode manifest JSONL")->required();
  prep_split->add_option("--out", sa_out, "Split manifest JSON path")->required();
  prep_split->add_option("--seed", sa_seed, "Seed");
  prep_split->add_option("--validation", sa_validation, "Validation episodes per subset");

  std::string cm_in, cm_out;
  std::uint64_t cm_seed = 0;
  auto* prep_crop = prep->add_subcommand("crop-mind2web", "Row-slice crop specs");
  prep_crop->add_option("--in", cm_in, "Step JSONL {id, page:[w,h], bbox:[l,t,r,d]}")
      ->required();
  prep_crop->add_option("--out", cm_out, "Crop spec JSONL path")->required();
  prep_crop->add_option("--seed", cm_seed, "Seed");

  // ---- eval ---------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Run a benchmark against a model endpoint");
  eval->require_subcommand(1);

  struct EvalFlags {
    std::string data, endpoint, out;
    std::uint64_t seed = 0;
    int parallel = 1;
    double timeout = 30.0;
  };
  auto add_eval_flags = [](CLI::App* cmd, EvalFlags& f) {
    cmd->add_option("--data", f.data, "Input JSONL")->required();
    cmd->add_option("--endpoint", f.endpoint, "Model endpoint (or GGB_ENDPOINT)");
    cmd->add_option("--out", f.out, "Output directory")->required();
    cmd->add_option("--seed", f.seed, "Seed");
    cmd->add_option("--parallel", f.parallel, "Worker count");
    cmd->add_option("--timeout", f.timeout, "Request timeout seconds (or GGB_TIMEOUT)");
  };

  EvalFlags ss, aitw_f, m2w, mw;
  auto* ev_ss = eval->add_subcommand("screenspot", "Grounding click accuracy");
  add_eval_flags(ev_ss, ss);
  auto* ev_aitw = eval->add_subcommand("aitw", "Screen-wise action matching");
  add_eval_flags(ev_aitw, aitw_f);
  double aitw_tau = kDefaultClickDistanceTau;
  ev_aitw->add_option("--tau", aitw_tau, "Click distance fallback threshold");
  auto* ev_m2w = eval->add_subcommand("mind2web", "Ele.Acc / Op.F1 / Step SR");
  add_eval_flags(ev_m2w, m2w);
  auto* ev_mw = eval->add_subcommand("miniwob", "Episode success rate");
  add_eval_flags(ev_mw, mw);
  int mw_seeds = 50, mw_max_steps = 30;
  ev_mw->add_option("--seeds", mw_seeds, "Seeds per task");
  ev_mw->add_option("--max-steps", mw_max_steps, "Episode step limit");

  // ---- score --------------------------------------------------------------
  std::string sc_benchmark, sc_data, sc_predictions, sc_out;
  double sc_tau = kDefaultClickDistanceTau;
  std::uint64_t sc_seed = 0;
  auto* score = app.add_subcommand("score", "Re-score a saved predictions file");
  score->add_option("--benchmark", sc_benchmark, "screenspot|aitw|mind2web")
      ->required()
      ->check(CLI::IsMember({"screenspot", "aitw", "mind2web"}));
  score->add_option("--data", sc_data, "Benchmark input JSONL")->required();
  score->add_option("--predictions", sc_predictions, "Predictions JSONL")->required();
  score->add_option("--out", sc_out, "Output directory")->required();
  score->add_option("--tau", sc_tau, "AITW click threshold");
  score->add_option("--seed", sc_seed, "Seed recorded in the report");

  // ---- report -------------------------------------------------------------
  std::string rp_in, rp_out, rp_stem = "report";
  auto* report = app.add_subcommand("report", "Re-emit tables from a report JSON");
  report->add_option("--in", rp_in, "report.json produced by eval/score")->required();
  report->add_option("--out", rp_out, "Output directory")->required();
  report->add_option("--stem", rp_stem, "Output file stem");

  CLI11_PARSE(app, argc, argv);

  // ---- dispatch -----------------------------------------------------------
  if (hv_web->parsed()) {
    std::string urls_data = read_file(hv_urls);
    std::vector<std::string> urls;
    std::string line;
    for (char c : urls_data + "\n") {
      if (c == '\n') {
        if (!line.empty() && line[0] != '#') urls.push_back(line);
        line.clear();
      } else if (c != '\r') {
        line += c;
      }
    }
    fs::create_directories(fs::path(hv_out) / "shots");
    std::vector<std::pair<std::string, std::vector<Element>>> per_page;
    long long failures = 0;
    for (std::size_t i = 0; i < urls.size(); ++i) {
      RenderOptions opts;
      opts.timeout_s = effective_timeout(hv_timeout);
      opts.screenshot_path =
          fs::path(hv_out) / "shots" / (std::to_string(i) + ".png");
      try {
        auto snap = render_page(urls[i], hv_renderer, opts);
        per_page.push_back({snap.url, extract_web_elements(snap)});
      } catch (const Error& e) {
        ++failures;
        std::cerr << urls[i] << ": " << e.what() << "\n";
      }
    }
    std::stable_sort(per_page.begin(), per_page.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<json> lines;
    for (const auto& [url, elements] : per_page)
      for (const auto& e : elements) lines.push_back(element_to_json(url, e));
    write_jsonl(fs::path(hv_out) / "elements.jsonl", lines);
    std::cout << "pages: " << per_page.size() << " elements: " << lines.size()
              << " failures: " << failures << "\n";
    return failures > 0 && per_page.empty() ? 1 : 0;
  }

  if (hv_fix->parsed()) {
    auto lines = harvest_fixture_dirs(hf_dir, hf_parallel);
    write_jsonl(fs::path(hf_out) / "elements.jsonl", lines);
    std::cout << "elements: " << lines.size() << "\n";
    return 0;
  }

  if (hv_inv->parsed()) {
    std::vector<CaptionRecord> records;
    for (const auto& j : read_jsonl(ic_in)) {
      CaptionRecord r;
      r.image = j.at("image").get<std::string>();
      r.dims = {j.at("width").get<int>(), j.at("height").get<int>()};
      const auto& b = j.at("bbox");
      r.bbox = {b.at(0).get<double>(), b.at(1).get<double>(),
                b.at(2).get<double>(), b.at(3).get<double>()};
      for (const auto& c : j.at("captions")) r.captions.push_back(c.get<std::string>());
      records.push_back(std::move(r));
    }
    TaskKind task = task_from_string(ic_task);
    PromptPools prompts = PromptPools::defaults();
    if (!ic_prompts.empty()) prompts.load_file(task, ic_prompts);
    SkipReport skips;
    auto samples = invert_captions(records, task, prompts, ic_seed, &skips);
    std::vector<json> lines;
    for (const auto& s : samples) lines.push_back(s.to_json());
    write_jsonl(fs::path(ic_out) / "samples.jsonl", lines);
    write_file(fs::path(ic_out) / "skips.json",
               json{{"skipped", skips.skipped}, {"reasons", skips.reasons}}.dump(2) +
                   "\n");
    std::cout << "samples: " << samples.size() << " skipped: " << skips.skipped
              << "\n";
    return 0;
  }

  if (assemble->parsed()) {
    std::map<std::string, std::vector<GroundingSample>> pools;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(as_in))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files)
      for (const auto& j : read_jsonl(file)) {
        GroundingSample s = GroundingSample::from_json(j);
        if (s.platform.empty())
          throw Error(ErrorKind::Schema,
                      file.string() + ": sample without meta.platform");
        pools[s.platform + "/" + to_string(s.task)].push_back(std::move(s));
      }
    MixSpec mix;
    if (!as_mix.empty()) {
      mix = MixSpec::from_json(json::parse(read_file(as_mix)));
      if (as_budget > 0) mix.budget = as_budget;
      if (assemble->count("--seed")) mix.seed = as_seed;
    } else {
      mix = MixSpec::table_defaults(as_budget, as_seed);
    }
    if (mix.budget <= 0)
      throw Error(ErrorKind::InvalidArgument, "budget must be positive");
    auto manifest = assemble_corpus(pools, mix, as_out);
    std::cout << "wrote " << manifest.shards.size() << " shard(s), "
              << manifest.budget << " samples\n";
    return 0;
  }

  if (prep_split->parsed()) {
    std::vector<EpisodeManifest> episodes;
    for (const auto& j : read_jsonl(sa_in)) {
      EpisodeManifest e;
      e.episode_id = j.at("episode_id").get<std::string>();
      e.instruction = j.at("instruction").get<std::string>();
      e.subset = j.at("subset").get<std::string>();
      e.step_count = j.value("step_count", 0);
      e.source = j.value("source", "");
      episodes.push_back(std::move(e));
    }
    auto deduped = dedupe_trajectories(episodes, sa_seed);
    auto split = split_aitw(deduped, kAitwSubsetCounts, 0.8, sa_seed);
    split.validation =
        select_validation(episodes, deduped, split, sa_validation, sa_seed);
    write_file(sa_out, split.to_json().dump(2) + "\n");
    std::cout << "wrote " << sa_out << "\n";
    return 0;
  }

  if (prep_crop->parsed()) {
    std::vector<json> lines;
    for (const auto& j : read_jsonl(cm_in)) {
      std::string id = j.at("id").get<std::string>();
      const auto& page = j.at("page");
      const auto& b = j.at("bbox");
      PixelBBox target{b.at(0).get<long long>(), b.at(1).get<long long>(),
                       b.at(2).get<long long>(), b.at(3).get<long long>()};
      auto spec = crop_mind2web({page.at(0).get<int>(), page.at(1).get<int>()},
                                target, derive_seed(cm_seed, id));
      json out = spec.to_json();
      out["id"] = id;
      lines.push_back(std::move(out));
    }
    write_jsonl(cm_out, lines);
    std::cout << "wrote " << lines.size() << " crop spec(s)\n";
    return 0;
  }

  if (ev_ss->parsed()) {
    auto cases = load_cases(ss.data);
    auto client = make_client(ss.endpoint, ss.timeout);
    GroundingEvalOptions opts;
    opts.seed = ss.seed;
    opts.workers = ss.parallel;
    auto result = run_grounding_eval(cases, client, opts);
    write_predictions(result.predictions, fs::path(ss.out) / "predictions.jsonl");
    emit_screenspot(result, ss.seed, ss.out);
    std::cout << "micro: " << result.report.micro.value()
              << " macro: " << result.report.macro_average
              << " endpoint errors: " << result.endpoint_errors << "\n";
    return 0;
  }

  if (ev_aitw->parsed() || ev_m2w->parsed()) {
    bool is_aitw = ev_aitw->parsed();
    const EvalFlags& f = is_aitw ? aitw_f : m2w;
    auto records = load_steps(f.data);
    auto client = make_client(f.endpoint, f.timeout);
    OfflineEvalOptions opts;
    opts.workers = f.parallel;
    opts.tau = aitw_tau;
    auto result = run_offline_agent_eval(
        is_aitw ? AgentBenchmark::aitw : AgentBenchmark::mind2web, records,
        client, opts);
    write_predictions(result.predictions, fs::path(f.out) / "predictions.jsonl");
    emit_offline(is_aitw ? "aitw" : "mind2web", result, f.out);
    if (result.aitw)
      std::cout << "overall: " << result.aitw->overall
                << " click_acc: " << result.aitw->click_acc.value() << "\n";
    else
      for (const auto& [split, s] : result.mind2web->splits)
        std::cout << split << " ele_acc: " << s.ele_acc << " op_f1: " << s.op_f1
                  << " step_sr: " << s.step_sr << "\n";
    std::cout << "endpoint errors: " << result.endpoint_errors << "\n";
    return 0;
  }

  if (ev_mw->parsed()) {
    auto scripts = load_scripts(mw.data);
    std::map<std::string, MiniwobScript> by_task;
    std::vector<std::string> tasks;
    for (auto& s : scripts) {
      if (by_task.emplace(s.task, s).second) tasks.push_back(s.task);
    }
    auto client = make_client(mw.endpoint, mw.timeout);
    EnvFactory factory = [&](const std::string& task) -> std::unique_ptr<EnvAdapter> {
      const auto& script = by_task.at(task);
      return std::make_unique<ScriptedEnv>(script.instruction, script.actions);
    };
    EpisodeOptions opts;
    opts.max_steps = mw_max_steps;
    auto result = run_miniwob(tasks, mw_seeds, factory, client, opts, mw.parallel);
    ReportBundle bundle;
    bundle.report = {{"benchmark", "miniwob"},
                     {"seeds_per_task", mw_seeds},
                     {"report", result.report.to_json()},
                     {"failed_tasks", result.failed_tasks}};
    bundle.markdown = miniwob_markdown(result.report);
    emit_report(bundle, mw.out);
    std::vector<json> episode_lines;
    for (const auto& ep : result.episodes)
      episode_lines.push_back({{"task", ep.task},
                               {"seed", ep.seed},
                               {"steps", ep.steps},
                               {"success", ep.succeeded()},
                               {"cause", ep.cause}});
    write_jsonl(fs::path(mw.out) / "episodes.jsonl", episode_lines);
    std::cout << "mean success rate: " << result.report.mean << "\n";
    return 0;
  }

  if (score->parsed()) {
    auto predictions = read_predictions(sc_predictions);
    if (sc_benchmark == "screenspot") {
      auto cases = load_cases(sc_data);
      auto result = score_grounding(cases, predictions);
      emit_screenspot(result, sc_seed, sc_out);
      std::cout << "micro: " << result.report.micro.value() << "\n";
    } else {
      auto records = load_steps(sc_data);
      OfflineEvalOptions opts;
      opts.tau = sc_tau;
      auto result = score_offline(sc_benchmark == "aitw" ? AgentBenchmark::aitw
                                                         : AgentBenchmark::mind2web,
                                  records, predictions, opts);
      emit_offline(sc_benchmark, result, sc_out);
    }
    return 0;
  }

  if (report->parsed()) {
    json j = json::parse(read_file(rp_in));
    std::string benchmark = j.at("benchmark").get<std::string>();
    ReportBundle bundle;
    bundle.report = j;
    if (benchmark == "screenspot") {
      bundle.markdown = grounding_markdown(grounding_report_from_json(j.at("report")));
      if (j.contains("histogram"))
        bundle.csv = histogram_csv(histogram_from_json(j["histogram"]));
    } else if (benchmark == "aitw") {
      bundle.markdown = aitw_markdown(aitw_report_from_json(j.at("report")));
    } else if (benchmark == "mind2web") {
      bundle.markdown = mind2web_markdown(mind2web_report_from_json(j.at("report")));
    } else if (benchmark == "miniwob") {
      bundle.markdown = miniwob_markdown(miniwob_report_from_json(j.at("report")));
    } else {
      throw Error(ErrorKind::Schema, "unknown benchmark: " + benchmark);
    }
    emit_report(bundle, rp_out, rp_stem);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
