#include <doctest.h>

#include <filesystem>

#include "ggb/mock_model.hpp"
#include "ggb/runner.hpp"

using namespace ggb;
namespace fs = std::filesystem;

namespace {

class FnModelClient : public ModelClient {
 public:
  explicit FnModelClient(
      std::function<std::string(const std::string&, const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string predict(const std::string& image, const std::string& prompt) override {
    return fn_(image, prompt);
  }

 private:
  std::function<std::string(const std::string&, const std::string&)> fn_;
};

std::vector<GroundingCaseRecord> synthetic_cases(int n) {
  std::vector<GroundingCaseRecord> cases;
  Rng rng(4242);
  Platform platforms[] = {Platform::mobile, Platform::desktop, Platform::web};
  for (int i = 0; i < n; ++i) {
    GroundingCaseRecord c;
    c.id = "case-" + std::to_string(i);
    c.image = "tests/fixtures/tiny.png";
    c.instruction = "activate control " + std::to_string(i);
    c.platform = platforms[i % 3];
    c.kind = i % 2 ? ElementKind::icon_widget : ElementKind::text;
    double l = rng.next_below(80) / 100.0, t = rng.next_below(80) / 100.0;
    c.bbox = {l, t, l + 0.05 + rng.next_below(10) / 100.0,
              t + 0.05 + rng.next_below(10) / 100.0};
    cases.push_back(c);
  }
  return cases;
}

}  // namespace

TEST_CASE("HttpModelClient against the mock server") {
  MockModelServer server(MockMode::constant, {}, "(0.25, 0.75)");
  server.start();
  HttpModelClient client({server.url(), 5.0, 1});
  CHECK(client.predict("tests/fixtures/tiny.png", "anything") == "(0.25, 0.75)");
  CHECK(client.predict("", "no image") == "(0.25, 0.75)");
}

TEST_CASE("HttpModelClient error paths") {
  HttpModelClient down({"http://127.0.0.1:1", 0.5, 1});
  down.set_base_backoff_ms(1);
  CHECK_THROWS_AS((void)down.predict("", "x"), Error);

  // oracle with no matching key answers 404 -> protocol error, no retry loop
  MockModelServer server(MockMode::oracle, {});
  server.start();
  HttpModelClient client({server.url(), 5.0, 1});
  CHECK_THROWS_AS((void)client.predict("", "unknown prompt"), Error);

  CHECK_THROWS_AS(HttpModelClient({"http://x", 0.0, 1}), Error);
}

TEST_CASE("run_grounding_eval with oracle and constant endpoints") {
  auto cases = synthetic_cases(60);
  GroundingEvalOptions opts;
  opts.workers = 4;

  AnswerKey key;
  for (const auto& c : cases)
    key.exact[grounding_prompt_for(c, opts)] = format_location(bbox_center(c.bbox));
  MockModelServer oracle(MockMode::oracle, key);
  oracle.start();
  HttpModelClient client({oracle.url(), 10.0, 2});
  auto result = run_grounding_eval(cases, client, opts);
  CHECK(result.report.micro.value() == 1.0);
  CHECK(result.report.macro_average == 1.0);
  CHECK(result.endpoint_errors == 0);

  // constant (0,0): exactly the fraction of boxes containing the origin
  long long contains = 0;
  for (const auto& c : cases)
    if (point_in_bbox({0.0, 0.0}, c.bbox)) ++contains;
  FnModelClient constant([](const std::string&, const std::string&) {
    return std::string("(0.00, 0.00)");
  });
  auto const_result = run_grounding_eval(cases, constant, opts);
  CHECK(const_result.report.micro.hits == contains);

  FnModelClient gibberish([](const std::string&, const std::string&) {
    return std::string("I cannot tell");
  });
  CHECK(run_grounding_eval(cases, gibberish, opts).report.micro.value() == 0.0);
}

TEST_CASE("re-scoring saved predictions is byte-identical") {
  auto cases = synthetic_cases(30);
  FnModelClient constant([](const std::string&, const std::string&) {
    return std::string("(0.50, 0.50)");
  });
  auto result = run_grounding_eval(cases, constant);

  auto dir = fs::temp_directory_path() / "ggb-test-rescore";
  fs::remove_all(dir);
  write_predictions(result.predictions, dir / "predictions.jsonl");
  auto loaded = read_predictions(dir / "predictions.jsonl");
  auto rescored = score_grounding(cases, loaded);
  CHECK(rescored.report.to_json().dump() == result.report.to_json().dump());
  CHECK(histogram_csv(rescored.histogram) == histogram_csv(result.histogram));
}

TEST_CASE("run_episode success, parse failure, step limit") {
  std::vector<Action> script{Action::click({0.2, 0.2}),
                             Action::type_text("hello"),
                             Action::click({0.8, 0.8})};
  FnModelClient solver([&](const std::string&, const std::string& prompt) {
    std::size_t count = 0;
    for (std::size_t at = prompt.find("action_type:"); at != std::string::npos;
         at = prompt.find("action_type:", at + 1))
      ++count;
    return count < script.size() ? encode_action(script[count])
                                 : std::string("TASK COMPLETE");
  });

  ScriptedEnv env("do the thing", script);
  auto result = run_episode(env, solver, "demo", 0);
  CHECK(result.succeeded());
  CHECK(result.steps == 3);
  CHECK(result.transcript.size() == 3);
  for (const auto& entry : result.transcript) {
    std::size_t count = 0;
    for (std::size_t at = entry.prompt.find("action_type:");
         at != std::string::npos; at = entry.prompt.find("action_type:", at + 1))
      ++count;
    CHECK(count <= 4);
  }

  FnModelClient gibberish([](const std::string&, const std::string&) {
    return std::string("???");
  });
  ScriptedEnv env2("x", script);
  auto fail = run_episode(env2, gibberish, "demo", 0);
  CHECK_FALSE(fail.succeeded());
  CHECK(fail.cause == "parse");

  // 31 non-terminal steps demanded -> stop at exactly 30
  FnModelClient clicker([](const std::string&, const std::string&) {
    return std::string("action_type: 4, click_point: (0.50, 0.50)");
  });
  ScriptedEnv endless("never done", {});
  auto limited = run_episode(endless, clicker, "demo", 0);
  CHECK(limited.outcome == EpisodeOutcome::step_limit);
  CHECK(limited.steps == 30);
  CHECK_FALSE(limited.succeeded());
  CHECK(limited.transcript.size() == 30);
}

TEST_CASE("run_miniwob aggregates per task") {
  std::map<std::string, std::vector<Action>> scripts{
      {"click-button", {Action::click({0.3, 0.3})}},
      {"enter-text", {Action::click({0.5, 0.5}), Action::type_text("abc")}},
  };
  EnvFactory factory = [&](const std::string& task) -> std::unique_ptr<EnvAdapter> {
    auto it = scripts.find(task);
    if (it == scripts.end()) throw Error(ErrorKind::InvalidArgument, task);
    return std::make_unique<ScriptedEnv>("", it->second);
  };
  FnModelClient solver([&](const std::string&, const std::string& prompt) {
    const auto& script = prompt.find("click-button") != std::string::npos
                             ? scripts["click-button"]
                             : scripts["enter-text"];
    std::size_t count = 0;
    for (std::size_t at = prompt.find("action_type:"); at != std::string::npos;
         at = prompt.find("action_type:", at + 1))
      ++count;
    return count < script.size() ? encode_action(script[count])
                                 : std::string("TASK COMPLETE");
  });

  auto result = run_miniwob({"click-button", "enter-text", "broken-task"}, 10,
                            factory, solver, {}, 4);
  CHECK(result.report.mean == 1.0);
  CHECK(result.report.per_task.size() == 2);
  CHECK(result.report.per_task["click-button"].total == 10);
  REQUIRE(result.failed_tasks.size() == 1);
  CHECK(result.failed_tasks[0] == "broken-task");
}

TEST_CASE("offline agent eval with oracle endpoint") {
  std::vector<AgentStepRecord> records;
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    AgentStepRecord r;
    r.id = "step-" + std::to_string(i);
    r.group = std::string(kAitwSubsets[i % 5]);
    r.instruction = "episode " + std::to_string(i);
    double x = rng.next_below(100) / 100.0, y = rng.next_below(100) / 100.0;
    switch (i % 3) {
      case 0:
        r.ref_action = Action::click({x, y});
        r.ref_bbox = NormBBox{std::max(0.0, x - 0.05), std::max(0.0, y - 0.05),
                              std::min(1.0, x + 0.05), std::min(1.0, y + 0.05)};
        break;
      case 1:
        r.ref_action = Action::type_text("query " + std::to_string(i));
        break;
      default:
        r.ref_action = Action::bare(action_type::kPressHome);
    }
    if (i % 4) r.history.push_back(Action::bare(action_type::kPressEnter));
    records.push_back(r);
  }

  OfflineEvalOptions opts;
  opts.workers = 3;
  std::map<std::string, std::string> answers;
  for (const auto& r : records)
    answers[agent_prompt_for(r, opts)] = encode_action(r.ref_action);
  FnModelClient oracle([&](const std::string&, const std::string& prompt) {
    return answers.at(prompt);
  });

  auto aitw = run_offline_agent_eval(AgentBenchmark::aitw, records, oracle, opts);
  REQUIRE(aitw.aitw.has_value());
  CHECK(aitw.aitw->overall == 1.0);
  CHECK(aitw.aitw->click_acc.value() == 1.0);

  // mind2web needs ref_bbox on every step
  std::vector<AgentStepRecord> m2w;
  for (auto r : records) {
    if (!r.ref_bbox) r.ref_bbox = NormBBox{0.0, 0.0, 1.0, 1.0};
    r.group = std::string(kMind2WebSplits[m2w.size() % 3]);
    m2w.push_back(r);
  }
  std::map<std::string, std::string> m2w_answers;
  for (const auto& r : m2w)
    m2w_answers[agent_prompt_for(r, opts)] = encode_action(r.ref_action);
  FnModelClient m2w_oracle([&](const std::string&, const std::string& prompt) {
    return m2w_answers.at(prompt);
  });
  auto m2 = run_offline_agent_eval(AgentBenchmark::mind2web, m2w, m2w_oracle, opts);
  REQUIRE(m2.mind2web.has_value());
  for (const auto& [split, s] : m2.mind2web->splits) CHECK(s.op_f1 == 1.0);
}

TEST_CASE("emit_report deterministic bytes") {
  auto cases = synthetic_cases(12);
  FnModelClient constant([](const std::string&, const std::string&) {
    return std::string("(0.10, 0.10)");
  });
  auto result = run_grounding_eval(cases, constant);
  ReportBundle bundle{result.report.to_json(), grounding_markdown(result.report),
                      histogram_csv(result.histogram)};
  auto d1 = fs::temp_directory_path() / "ggb-test-report1";
  auto d2 = fs::temp_directory_path() / "ggb-test-report2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  emit_report(bundle, d1);
  emit_report(bundle, d2);
  CHECK(read_file(d1 / "report.json") == read_file(d2 / "report.json"));
  CHECK(read_file(d1 / "report.md") == read_file(d2 / "report.md"));
  CHECK(read_file(d1 / "report_histogram.csv") ==
        read_file(d2 / "report_histogram.csv"));

  CHECK(bundle.markdown.find("| Mobile Text |") != std::string::npos);
}

TEST_CASE("markdown layouts") {
  std::map<std::string, std::vector<AgentStep>> subsets;
  NormBBox b{0.0, 0.0, 1.0, 1.0};
  for (const auto& name : kAitwSubsets)
    subsets[name].push_back({Action::click({0.5, 0.5}), b, Action::click({0.5, 0.5})});
  auto aitw_md = aitw_markdown(aitw_scores(subsets));
  CHECK(aitw_md.find("General") < aitw_md.find("Install"));
  CHECK(aitw_md.find("Overall") != std::string::npos);
  CHECK(aitw_md.find("ClickAcc") != std::string::npos);

  std::map<std::string, std::vector<AgentStep>> splits;
  for (const auto& name : kMind2WebSplits)
    splits[name].push_back({Action::click({0.5, 0.5}), b, Action::click({0.5, 0.5})});
  auto md = mind2web_markdown(mind2web_scores(splits));
  CHECK(md.find("Ele.Acc") != std::string::npos);
  CHECK(md.find("Cross-Task") < md.find("Cross-Website"));
  CHECK(md.find("Cross-Website") < md.find("Cross-Domain"));
}
