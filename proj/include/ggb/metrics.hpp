#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggb/action.hpp"
#include "ggb/error.hpp"
#include "ggb/geometry.hpp"

namespace ggb {

enum class Platform { mobile, desktop, web };
enum class ElementKind { text, icon_widget };

inline const char* to_string(Platform p) {
  switch (p) {
    case Platform::mobile: return "mobile";
    case Platform::desktop: return "desktop";
    case Platform::web: return "web";
  }
  return "?";
}

inline const char* to_string(ElementKind k) {
  return k == ElementKind::text ? "text" : "icon/widget";
}

inline Platform platform_from_string(const std::string& s) {
  if (s == "mobile") return Platform::mobile;
  if (s == "desktop") return Platform::desktop;
  if (s == "web") return Platform::web;
  throw Error(ErrorKind::Schema, "unknown platform: " + s);
}

inline ElementKind kind_from_string(const std::string& s) {
  if (s == "text") return ElementKind::text;
  if (s == "icon/widget" || s == "icon" || s == "widget") return ElementKind::icon_widget;
  throw Error(ErrorKind::Schema, "unknown element kind: " + s);
}

// One screen-grounding test case. An absent prediction means the model
// output could not be parsed and counts as a miss.
struct GroundingCase {
  Platform platform = Platform::web;
  ElementKind kind = ElementKind::text;
  NormBBox gt_bbox;
  std::optional<NormPoint> prediction;
};

// A value together with the denominator it was computed over.
struct Ratio {
  long long hits = 0;
  long long total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(hits) / total; }
};

struct GroundingReport {
  // Keyed "platform/kind", e.g. "mobile/text". Only non-empty cells appear.
  std::map<std::string, Ratio> cells;
  double macro_average = 0.0;  // mean over non-empty cells
  Ratio micro;                 // sample-weighted

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [k, r] : cells)
      j["cells"][k] = {{"accuracy", r.value()}, {"hits", r.hits}, {"total", r.total}};
    j["macro_average"] = macro_average;
    j["micro_average"] = micro.value();
    j["total"] = micro.total;
    return j;
  }
};

inline GroundingReport click_accuracy(const std::vector<GroundingCase>& cases) {
  if (cases.empty()) throw Error(ErrorKind::InvalidArgument, "no grounding cases");
  GroundingReport report;
  for (const auto& c : cases) {
    std::string key = std::string(to_string(c.platform)) + "/" + to_string(c.kind);
    bool hit = c.prediction && point_in_bbox(*c.prediction, c.gt_bbox);
    auto& cell = report.cells[key];
    cell.total += 1;
    cell.hits += hit ? 1 : 0;
    report.micro.total += 1;
    report.micro.hits += hit ? 1 : 0;
  }
  double sum = 0.0;
  for (const auto& [k, r] : report.cells) sum += r.value();
  report.macro_average = sum / static_cast<double>(report.cells.size());
  return report;
}

// Histogram of distances from prediction to ground-truth center, fixed
// 0.05-wide bins over [0, sqrt(2)], split by hit/miss. Cases without a
// prediction are not binned.
struct DistanceHistogram {
  static constexpr double kBinWidth = 0.05;
  static constexpr int kBins = 29;  // ceil(sqrt(2) / 0.05)
  std::array<long long, kBins> hit{};
  std::array<long long, kBins> miss{};

  nlohmann::json to_json() const {
    nlohmann::json bins = nlohmann::json::array();
    for (int i = 0; i < kBins; ++i)
      bins.push_back({{"lo", i * kBinWidth},
                      {"hi", (i + 1) * kBinWidth},
                      {"hit", hit[i]},
                      {"miss", miss[i]}});
    return {{"bin_width", kBinWidth}, {"bins", bins}};
  }
};

inline DistanceHistogram distance_histogram(const std::vector<GroundingCase>& cases) {
  DistanceHistogram h;
  for (const auto& c : cases) {
    if (!c.prediction) continue;
    double d = point_distance(*c.prediction, bbox_center(c.gt_bbox));
    int bin = std::min(static_cast<int>(d / DistanceHistogram::kBinWidth),
                       DistanceHistogram::kBins - 1);
    if (point_in_bbox(*c.prediction, c.gt_bbox))
      h.hit[bin] += 1;
    else
      h.miss[bin] += 1;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Text comparison used for typed/select payloads: case-folded,
// whitespace-collapsed. Input is treated as already NFC-composed UTF-8;
// case folding applies to the ASCII range.
inline std::string normalize_text(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// AITW screen-wise matching.

struct AgentStep {
  Action ref_action;
  std::optional<NormBBox> ref_bbox;
  std::optional<Action> pred_action;
};

struct StepMatch {
  bool type_match = false;
  bool value_match = false;
  bool both_click = false;
};

// Fallback click threshold when the reference carries no bbox.
inline constexpr double kDefaultClickDistanceTau = 0.14;

inline StepMatch match_step_aitw(const AgentStep& step,
                                 double tau = kDefaultClickDistanceTau) {
  StepMatch m;
  if (!step.pred_action) return m;
  const Action& ref = step.ref_action;
  const Action& pred = *step.pred_action;
  m.type_match = ref.type_id == pred.type_id;
  m.both_click = ref.type_id == action_type::kClick &&
                 pred.type_id == action_type::kClick;
  if (!m.type_match) return m;
  switch (ref.type_id) {
    case action_type::kClick:
      if (step.ref_bbox)
        m.value_match = point_in_bbox(*pred.click_point, *step.ref_bbox);
      else if (ref.click_point)
        m.value_match = point_distance(*pred.click_point, *ref.click_point) <= tau;
      break;
    case action_type::kType:
      m.value_match = normalize_text(*pred.typed_text) == normalize_text(*ref.typed_text);
      break;
    case action_type::kSelect:
      m.value_match = normalize_text(*pred.value) == normalize_text(*ref.value);
      break;
    default:
      m.value_match = true;  // payload-free ids
  }
  return m;
}

inline const std::array<std::string, 5> kAitwSubsets = {
    "General", "Install", "GoogleApps", "Single", "WebShopping"};

struct AitwReport {
  std::map<std::string, Ratio> subset_scores;  // step matching per subset
  std::vector<std::string> empty_subsets;      // requested but without steps
  double overall = 0.0;                        // unweighted mean over subsets
  Ratio click_acc;                             // among both-click steps
  double tau = kDefaultClickDistanceTau;

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [k, r] : subset_scores)
      j["subsets"][k] = {{"score", r.value()}, {"hits", r.hits}, {"total", r.total}};
    j["overall"] = overall;
    j["click_acc"] = {{"score", click_acc.value()},
                      {"hits", click_acc.hits},
                      {"total", click_acc.total}};
    j["empty_subsets"] = empty_subsets;
    j["tau"] = tau;
    return j;
  }
};

inline AitwReport aitw_scores(
    const std::map<std::string, std::vector<AgentStep>>& by_subset,
    double tau = kDefaultClickDistanceTau) {
  AitwReport report;
  report.tau = tau;
  for (const auto& [subset, steps] : by_subset) {
    if (steps.empty()) {
      report.empty_subsets.push_back(subset);
      continue;
    }
    Ratio r;
    for (const auto& s : steps) {
      StepMatch m = match_step_aitw(s, tau);
      r.total += 1;
      r.hits += (m.type_match && m.value_match) ? 1 : 0;
      if (m.both_click) {
        report.click_acc.total += 1;
        report.click_acc.hits += m.value_match ? 1 : 0;
      }
    }
    report.subset_scores[subset] = r;
  }
  if (!report.subset_scores.empty()) {
    double sum = 0.0;
    for (const auto& [k, r] : report.subset_scores) sum += r.value();
    report.overall = sum / static_cast<double>(report.subset_scores.size());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Token-level F1.

inline std::vector<std::string> tokenize_folded(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline double token_f1(std::string_view pred, std::string_view ref) {
  auto p = tokenize_folded(pred);
  auto r = tokenize_folded(ref);
  if (p.empty() && r.empty()) return 1.0;
  if (p.empty() || r.empty()) return 0.0;
  std::map<std::string, long long> counts;
  for (const auto& t : r) counts[t] += 1;
  long long overlap = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  double precision = static_cast<double>(overlap) / p.size();
  double recall = static_cast<double>(overlap) / r.size();
  return 2.0 * precision * recall / (precision + recall);
}

// ---------------------------------------------------------------------------
// Mind2Web step scoring.

// Operation string used for Op.F1: action name plus payload text.
inline std::string render_operation(const Action& a) {
  std::string out = action_type::name(a.type_id);
  if (a.typed_text) out += " " + *a.typed_text;
  if (a.value) out += " " + *a.value;
  return out;
}

struct Mind2WebStepScore {
  bool ele_correct = false;
  double op_f1 = 0.0;
  bool step_success = false;
};

inline Mind2WebStepScore mind2web_step(const AgentStep& step) {
  if (!step.ref_bbox)
    throw Error(ErrorKind::InvalidArgument, "mind2web step without ref_bbox");
  Mind2WebStepScore s;
  if (step.pred_action && step.pred_action->type_id == action_type::kClick)
    s.ele_correct = point_in_bbox(*step.pred_action->click_point, *step.ref_bbox);
  if (step.pred_action)
    s.op_f1 = token_f1(render_operation(*step.pred_action),
                       render_operation(step.ref_action));
  s.step_success = s.ele_correct && s.op_f1 == 1.0;
  return s;
}

inline const std::array<std::string, 3> kMind2WebSplits = {
    "Cross-Task", "Cross-Website", "Cross-Domain"};

struct Mind2WebSplitScore {
  double ele_acc = 0.0;
  double op_f1 = 0.0;
  double step_sr = 0.0;
  long long total = 0;
};

struct Mind2WebReport {
  std::map<std::string, Mind2WebSplitScore> splits;
  std::vector<std::string> empty_splits;

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [k, s] : splits)
      j["splits"][k] = {{"ele_acc", s.ele_acc},
                        {"op_f1", s.op_f1},
                        {"step_sr", s.step_sr},
                        {"total", s.total}};
    j["empty_splits"] = empty_splits;
    return j;
  }
};

inline Mind2WebReport mind2web_scores(
    const std::map<std::string, std::vector<AgentStep>>& by_split) {
  if (by_split.empty()) throw Error(ErrorKind::InvalidArgument, "no mind2web steps");
  Mind2WebReport report;
  for (const auto& [split, steps] : by_split) {
    if (steps.empty()) {
      report.empty_splits.push_back(split);
      continue;
    }
    Mind2WebSplitScore agg;
    for (const auto& s : steps) {
      auto score = mind2web_step(s);
      agg.ele_acc += score.ele_correct ? 1.0 : 0.0;
      agg.op_f1 += score.op_f1;
      agg.step_sr += score.step_success ? 1.0 : 0.0;
      agg.total += 1;
    }
    agg.ele_acc /= agg.total;
    agg.op_f1 /= agg.total;
    agg.step_sr /= agg.total;
    report.splits[split] = agg;
  }
  return report;
}

// ---------------------------------------------------------------------------
// MiniWob: success rate over seeds per task, then unweighted task mean.

struct MiniwobReport {
  std::map<std::string, Ratio> per_task;
  double mean = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (const auto& [k, r] : per_task)
      j["tasks"][k] = {{"success_rate", r.value()},
                       {"successes", r.hits},
                       {"seeds", r.total}};
    j["mean"] = mean;
    return j;
  }
};

inline MiniwobReport miniwob_score(
    const std::map<std::string, std::vector<bool>>& results) {
  if (results.empty()) throw Error(ErrorKind::InvalidArgument, "no miniwob tasks");
  MiniwobReport report;
  double sum = 0.0;
  for (const auto& [task, seeds] : results) {
    Ratio r;
    r.total = static_cast<long long>(seeds.size());
    for (bool ok : seeds) r.hits += ok ? 1 : 0;
    report.per_task[task] = r;
    sum += r.value();
  }
  report.mean = sum / static_cast<double>(results.size());
  return report;
}

}  // namespace ggb
