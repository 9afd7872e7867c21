#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggb/action.hpp"
#include "ggb/error.hpp"
#include "ggb/geometry.hpp"
#include "ggb/io.hpp"
#include "ggb/parallel.hpp"
#include "ggb/rng.hpp"

namespace ggb {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

// Grounding task kinds making up the corpus.
enum class TaskKind {
  text_2_point,
  text_2_bbox,
  point_2_text,
  bbox_2_text,
  widget_captioning,
  ui_summarization,
  general_passthrough,
};

inline const char* to_string(TaskKind t) {
  switch (t) {
    case TaskKind::text_2_point: return "text_2_point";
    case TaskKind::text_2_bbox: return "text_2_bbox";
    case TaskKind::point_2_text: return "point_2_text";
    case TaskKind::bbox_2_text: return "bbox_2_text";
    case TaskKind::widget_captioning: return "widget_captioning";
    case TaskKind::ui_summarization: return "ui_summarization";
    case TaskKind::general_passthrough: return "general_passthrough";
  }
  return "?";
}

inline TaskKind task_from_string(const std::string& s) {
  if (s == "text_2_point") return TaskKind::text_2_point;
  if (s == "text_2_bbox") return TaskKind::text_2_bbox;
  if (s == "point_2_text") return TaskKind::point_2_text;
  if (s == "bbox_2_text") return TaskKind::bbox_2_text;
  if (s == "widget_captioning") return TaskKind::widget_captioning;
  if (s == "ui_summarization") return TaskKind::ui_summarization;
  if (s == "general_passthrough") return TaskKind::general_passthrough;
  throw Error(ErrorKind::Schema, "unknown task: " + s);
}

enum class ElementSource {
  web_visible_text,
  web_title_attr,
  mobile_widget,
  mobile_rico,
};

inline const char* to_string(ElementSource s) {
  switch (s) {
    case ElementSource::web_visible_text: return "web-visible-text";
    case ElementSource::web_title_attr: return "web-title-attr";
    case ElementSource::mobile_widget: return "mobile-widget";
    case ElementSource::mobile_rico: return "mobile-rico";
  }
  return "?";
}

// An actionable screen element: the (instruction, location) pair.
struct Element {
  std::string instruction;
  NormBBox bbox;
  bool is_text = true;  // false = icon/widget
  ElementSource source = ElementSource::web_visible_text;
  long long dom_order = 0;

  bool valid() const {
    return !instruction.empty() && bbox.valid() && bbox.area() > 0.0;
  }
};

struct LayoutNode {
  long long id = 0;
  double left = 0, top = 0, right = 0, down = 0;  // pixels
  std::string text;
  std::string title;
  bool visible = true;
};

struct RenderedPageSnapshot {
  std::string url;
  std::string screenshot;  // PNG path or blob id
  PixelDims dims;
  std::vector<LayoutNode> nodes;
};

struct GroundingSample {
  std::string image;
  TaskKind task = TaskKind::text_2_point;
  std::string prompt;
  std::string target;
  std::string source;    // meta
  std::string platform;  // meta: web / mobile / general

  nlohmann::json to_json() const {
    return {{"image", image},
            {"task", to_string(task)},
            {"prompt", prompt},
            {"target", target},
            {"meta", {{"source", source}, {"platform", platform}}}};
  }

  static GroundingSample from_json(const nlohmann::json& j) {
    GroundingSample s;
    s.image = j.at("image").get<std::string>();
    s.task = task_from_string(j.at("task").get<std::string>());
    s.prompt = j.at("prompt").get<std::string>();
    s.target = j.at("target").get<std::string>();
    if (j.contains("meta")) {
      s.source = j["meta"].value("source", "");
      s.platform = j["meta"].value("platform", "");
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// Fixture snapshots: screenshot.png + layout.json.

inline RenderedPageSnapshot load_fixture_snapshot(
    const std::filesystem::path& dir) {
  auto layout_path = dir / "layout.json";
  auto shot_path = dir / "screenshot.png";
  if (!std::filesystem::exists(shot_path))
    throw Error(ErrorKind::MissingFile, shot_path.string());
  json j = json::parse(read_file(layout_path), nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorKind::Schema, layout_path.string() + ": invalid JSON at /");

  RenderedPageSnapshot snap;
  for (const char* key : {"url", "width", "height", "nodes"})
    if (!j.contains(key))
      throw Error(ErrorKind::Schema,
                  layout_path.string() + ": missing /" + key);
  snap.url = j["url"].get<std::string>();
  snap.dims = {j["width"].get<int>(), j["height"].get<int>()};
  if (!snap.dims.valid())
    throw Error(ErrorKind::Schema, layout_path.string() + ": bad dims at /width");
  snap.screenshot = shot_path.string();

  auto png = png_dims(shot_path);
  if (png.width != snap.dims.width || png.height != snap.dims.height)
    throw Error(ErrorKind::Schema,
                shot_path.string() + ": PNG dims " + std::to_string(png.width) +
                    "x" + std::to_string(png.height) + " != layout dims");

  std::size_t i = 0;
  for (const auto& n : j["nodes"]) {
    std::string ptr = "/nodes/" + std::to_string(i++);
    for (const char* key : {"id", "bbox"})
      if (!n.contains(key))
        throw Error(ErrorKind::Schema, layout_path.string() + ": missing " + ptr + "/" + key);
    LayoutNode node;
    node.id = n["id"].get<long long>();
    const auto& b = n["bbox"];
    if (!b.is_array() || b.size() != 4)
      throw Error(ErrorKind::Schema, layout_path.string() + ": bad bbox at " + ptr + "/bbox");
    node.left = b[0].get<double>();
    node.top = b[1].get<double>();
    node.right = b[2].get<double>();
    node.down = b[3].get<double>();
    if (node.left < 0 || node.top < 0 || node.right > snap.dims.width ||
        node.down > snap.dims.height || node.left > node.right ||
        node.top > node.down)
      throw Error(ErrorKind::Schema,
                  layout_path.string() + ": bbox outside image at " + ptr + "/bbox");
    node.text = n.value("text", "");
    node.title = n.value("title", "");
    node.visible = n.value("visible", true);
    snap.nodes.push_back(std::move(node));
  }
  return snap;
}

// ---------------------------------------------------------------------------
// Element extraction.

namespace detail {

inline std::string clean_instruction(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7f) continue;  // strip control characters
    out += c;
  }
  // trim
  std::size_t b = out.find_first_not_of(' ');
  std::size_t e = out.find_last_not_of(' ');
  if (b == std::string::npos) return "";
  out = out.substr(b, e - b + 1);
  if (out.size() > 256) out.resize(256);
  return out;
}

}  // namespace detail

// Emits visible-text elements and title-attribute elements from a
// rendered page, normalized by the snapshot dims, ordered by dom_order,
// deduplicated on (instruction, bbox within 1px).
inline std::vector<Element> extract_web_elements(
    const RenderedPageSnapshot& snap) {
  std::vector<Element> out;
  for (const auto& n : snap.nodes) {
    if (!n.visible) continue;
    double w = n.right - n.left, h = n.down - n.top;
    if (w <= 0 || h <= 0) continue;  // zero rendered area cannot be grounded

    std::string text = detail::clean_instruction(n.text);
    std::string title = detail::clean_instruction(n.title);
    Element e;
    if (!text.empty()) {
      e.instruction = text;
      e.is_text = true;
      e.source = ElementSource::web_visible_text;
    } else if (!title.empty()) {
      e.instruction = title;
      e.is_text = false;
      e.source = ElementSource::web_title_attr;
    } else {
      continue;
    }
    e.bbox = {n.left / snap.dims.width, n.top / snap.dims.height,
              n.right / snap.dims.width, n.down / snap.dims.height};
    e.dom_order = n.id;
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Element& a, const Element& b) {
                     return a.dom_order < b.dom_order;
                   });
  // drop duplicates (same instruction, bbox within 1 px), keeping the first
  std::vector<Element> dedup;
  double px_w = 1.0 / snap.dims.width, px_h = 1.0 / snap.dims.height;
  for (auto& e : out) {
    bool dup = false;
    for (const auto& kept : dedup) {
      if (kept.instruction != e.instruction) continue;
      if (std::abs(kept.bbox.left - e.bbox.left) <= px_w &&
          std::abs(kept.bbox.right - e.bbox.right) <= px_w &&
          std::abs(kept.bbox.top - e.bbox.top) <= px_h &&
          std::abs(kept.bbox.down - e.bbox.down) <= px_h) {
        dup = true;
        break;
      }
    }
    if (!dup) dedup.push_back(std::move(e));
  }
  return dedup;
}

// Element JSONL line. Key order is fixed by the serializer, so the
// output is stable for golden-file comparison.
inline json element_to_json(const std::string& url, const Element& e) {
  return {{"url", url},
          {"dom_order", e.dom_order},
          {"instruction", e.instruction},
          {"bbox", {e.bbox.left, e.bbox.top, e.bbox.right, e.bbox.down}},
          {"kind", e.is_text ? "text" : "icon/widget"},
          {"source", to_string(e.source)}};
}

// Harvests every fixture page directory under `root`, in parallel, and
// returns element JSONL lines sorted by (url, dom_order). Output does
// not depend on the worker count.
inline std::vector<json> harvest_fixture_dirs(
    const std::filesystem::path& root, int workers = 1) {
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory() &&
        std::filesystem::exists(entry.path() / "layout.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<std::pair<std::string, std::vector<Element>>> per_page(dirs.size());
  parallel_for(dirs.size(), workers, [&](std::size_t i) {
    auto snap = load_fixture_snapshot(dirs[i]);
    per_page[i] = {snap.url, extract_web_elements(snap)};
  });
  std::stable_sort(per_page.begin(), per_page.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<json> lines;
  for (const auto& [url, elements] : per_page)
    for (const auto& e : elements) lines.push_back(element_to_json(url, e));
  return lines;
}

// ---------------------------------------------------------------------------
// Prompt pools. One default template per task; pools are editable files
// with one template per line ({instruction} / {location} placeholders).

struct PromptPools {
  std::map<TaskKind, std::vector<std::string>> pools;

  static PromptPools defaults() {
    PromptPools p;
    p.pools[TaskKind::text_2_point] = {
        "In the UI, where should I click if I want to {instruction}?"};
    p.pools[TaskKind::text_2_bbox] = {
        "In the UI, where is the bounding box of the element \"{instruction}\"?"};
    p.pools[TaskKind::point_2_text] = {
        "In the UI, what is the element at point {location}?"};
    p.pools[TaskKind::bbox_2_text] = {
        "In the UI, what is the element in the region {location}?"};
    p.pools[TaskKind::widget_captioning] = {
        "In the UI, where should I click if I want to {instruction}?"};
    return p;
  }

  const std::vector<std::string>& for_task(TaskKind t) const {
    auto it = pools.find(t);
    if (it == pools.end() || it->second.empty())
      throw Error(ErrorKind::InvalidArgument,
                  std::string("empty prompt pool for task ") + to_string(t));
    return it->second;
  }

  void load_file(TaskKind t, const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::string data = read_file(path);
    std::string line;
    for (char c : data) {
      if (c == '\n') {
        if (!line.empty()) lines.push_back(line);
        line.clear();
      } else if (c != '\r') {
        line += c;
      }
    }
    if (!line.empty()) lines.push_back(line);
    if (!lines.empty()) pools[t] = std::move(lines);
  }
};

inline GroundingSample make_grounding_sample(const Element& e,
                                             const std::string& image,
                                             TaskKind task,
                                             const PromptPools& prompts,
                                             Rng& rng,
                                             const std::string& platform = "web") {
  const auto& pool = prompts.for_task(task);
  const std::string& tmpl = pool[rng.next_below(pool.size())];
  GroundingSample s;
  s.image = image;
  s.task = task;
  s.source = to_string(e.source);
  s.platform = platform;
  switch (task) {
    case TaskKind::text_2_point:
    case TaskKind::widget_captioning:
      s.prompt = detail::substitute(tmpl, "instruction", e.instruction);
      s.target = format_location(bbox_center(e.bbox));
      break;
    case TaskKind::text_2_bbox:
      s.prompt = detail::substitute(tmpl, "instruction", e.instruction);
      s.target = format_location(e.bbox);
      break;
    case TaskKind::point_2_text:
      s.prompt = detail::substitute(tmpl, "location",
                                    format_location(bbox_center(e.bbox)));
      s.target = e.instruction;
      break;
    case TaskKind::bbox_2_text:
      s.prompt = detail::substitute(tmpl, "location", format_location(e.bbox));
      s.target = e.instruction;
      break;
    default:
      throw Error(ErrorKind::InvalidArgument,
                  std::string("task ") + to_string(task) +
                      " is not element-derived");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Widget-caption inversion.

struct PixelBBoxD {
  double left = 0, top = 0, right = 0, down = 0;
};

struct CaptionRecord {
  std::string image;
  PixelDims dims;
  PixelBBoxD bbox;  // pixel bbox of the widget
  std::vector<std::string> captions;
};

struct SkipReport {
  long long skipped = 0;
  std::vector<std::string> reasons;

  void skip(std::string reason) {
    ++skipped;
    if (reasons.size() < 100) reasons.push_back(std::move(reason));
  }
};

inline std::vector<GroundingSample> invert_captions(
    const std::vector<CaptionRecord>& records, TaskKind task,
    const PromptPools& prompts, std::uint64_t seed, SkipReport* skips = nullptr) {
  if (task != TaskKind::text_2_point && task != TaskKind::text_2_bbox &&
      task != TaskKind::widget_captioning)
    throw Error(ErrorKind::InvalidArgument, "caption inversion needs a *_2_* task");
  std::vector<GroundingSample> out;
  std::size_t rec_idx = 0;
  for (const auto& r : records) {
    std::string key = r.image + "\x1f" + std::to_string(rec_idx++);
    if (r.bbox.left < 0 || r.bbox.top < 0 || r.bbox.right > r.dims.width ||
        r.bbox.down > r.dims.height || r.bbox.left >= r.bbox.right ||
        r.bbox.top >= r.bbox.down) {
      if (skips) skips->skip(r.image + ": widget bbox outside screenshot");
      continue;
    }
    Element e;
    e.bbox = {r.bbox.left / r.dims.width, r.bbox.top / r.dims.height,
              r.bbox.right / r.dims.width, r.bbox.down / r.dims.height};
    e.is_text = false;
    e.source = ElementSource::mobile_widget;
    std::size_t cap_idx = 0;
    for (const auto& cap : r.captions) {
      std::string instruction = detail::clean_instruction(cap);
      ++cap_idx;
      if (instruction.empty()) continue;
      e.instruction = instruction;
      Rng rng(derive_seed(seed, key + "\x1f" + std::to_string(cap_idx)));
      out.push_back(make_grounding_sample(e, r.image, task, prompts, rng, "mobile"));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Passthrough ingestion (UI summarization, general instruction data).

inline std::vector<GroundingSample> ingest_passthrough(
    TaskKind source_task, const std::vector<json>& records,
    SkipReport* skips = nullptr) {
  if (source_task != TaskKind::ui_summarization &&
      source_task != TaskKind::general_passthrough)
    throw Error(ErrorKind::InvalidArgument, "not a passthrough task");
  std::vector<GroundingSample> out;
  std::size_t idx = 0;
  for (const auto& r : records) {
    std::string at = "record " + std::to_string(idx++);
    if (!r.contains("image") || !r.contains("prompt") || !r.contains("target")) {
      if (skips) skips->skip(at + ": missing image/prompt/target");
      continue;
    }
    GroundingSample s;
    s.image = r["image"].get<std::string>();
    s.prompt = r["prompt"].get<std::string>();
    s.target = r["target"].get<std::string>();
    s.task = source_task;
    s.source = to_string(source_task);
    s.platform = source_task == TaskKind::ui_summarization ? "mobile" : "general";
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus assembly.

// Cell keys are "domain/task", e.g. "web/text_2_point".
struct MixSpec {
  std::map<std::string, long long> weights;  // relative per-cell weights
  long long budget = 0;
  std::uint64_t seed = 0;
  std::size_t shard_size = 100000;

  // Default composition: web 271/54/54/54, mobile 274/56/48/42,
  // general 145 (thousands).
  static MixSpec table_defaults(long long budget, std::uint64_t seed) {
    MixSpec m;
    m.budget = budget;
    m.seed = seed;
    m.weights = {
        {"web/text_2_point", 271},    {"web/text_2_bbox", 54},
        {"web/point_2_text", 54},     {"web/bbox_2_text", 54},
        {"mobile/text_2_point", 274}, {"mobile/text_2_bbox", 56},
        {"mobile/ui_summarization", 48}, {"mobile/widget_captioning", 42},
        {"general/general_passthrough", 145},
    };
    return m;
  }

  static MixSpec from_json(const json& j) {
    MixSpec m;
    for (auto it = j.at("weights").begin(); it != j.at("weights").end(); ++it)
      m.weights[it.key()] = it.value().get<long long>();
    m.budget = j.value("budget", 0LL);
    m.seed = j.value("seed", 0ULL);
    m.shard_size = j.value("shard_size", std::size_t{100000});
    return m;
  }
};

// Largest-remainder apportionment of the budget over cells; counts sum
// to the budget exactly.
inline std::map<std::string, long long> plan_mix(const MixSpec& mix) {
  long long total_weight = 0;
  for (const auto& [k, w] : mix.weights) {
    if (w < 0) throw Error(ErrorKind::InvalidArgument, "negative weight for " + k);
    total_weight += w;
  }
  if (total_weight == 0) throw Error(ErrorKind::InvalidArgument, "all weights zero");

  std::map<std::string, long long> counts;
  std::vector<std::pair<double, std::string>> remainders;
  long long assigned = 0;
  for (const auto& [k, w] : mix.weights) {
    double exact = static_cast<double>(mix.budget) * w / total_weight;
    long long base = static_cast<long long>(std::floor(exact));
    counts[k] = base;
    assigned += base;
    remainders.push_back({exact - base, k});
  }
  // stable: larger remainder first, map order breaks ties
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < mix.budget; ++i, ++assigned)
    counts[remainders[i % remainders.size()].second] += 1;
  return counts;
}

struct CorpusManifest {
  std::uint64_t seed = 0;
  long long budget = 0;
  std::map<std::string, long long> cells;
  std::vector<std::string> shards;

  json to_json() const {
    return {{"seed", seed},
            {"budget", budget},
            {"cells", cells},
            {"shards", shards},
            {"toolkit_version", std::string(kToolkitVersion)}};
  }
};

// Draws without replacement per cell, shuffles globally, writes JSONL
// shards plus manifest.json.
inline CorpusManifest assemble_corpus(
    const std::map<std::string, std::vector<GroundingSample>>& pools,
    const MixSpec& mix, const std::filesystem::path& out_dir) {
  auto counts = plan_mix(mix);
  for (const auto& [cell, want] : counts) {
    auto it = pools.find(cell);
    long long have = it == pools.end() ? 0 : static_cast<long long>(it->second.size());
    if (have < want)
      throw Error(ErrorKind::Underflow,
                  "cell " + cell + " has " + std::to_string(have) +
                      " samples, needs " + std::to_string(want) +
                      " (short by " + std::to_string(want - have) + ")");
  }

  std::vector<std::pair<std::string, const GroundingSample*>> picked;
  picked.reserve(static_cast<std::size_t>(mix.budget));
  for (const auto& [cell, want] : counts) {
    const auto& pool = pools.at(cell);
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(derive_seed(mix.seed, "cell\x1f" + cell));
    rng.shuffle(idx);
    for (long long i = 0; i < want; ++i)
      picked.push_back({cell, &pool[idx[static_cast<std::size_t>(i)]]});
  }
  Rng global(derive_seed(mix.seed, "global"));
  global.shuffle(picked);

  CorpusManifest manifest;
  manifest.seed = mix.seed;
  manifest.budget = mix.budget;
  manifest.cells = counts;

  std::filesystem::create_directories(out_dir);
  std::size_t shard_no = 0;
  for (std::size_t begin = 0; begin < picked.size() || shard_no == 0;
       begin += mix.shard_size) {
    std::string name = "shard-" + std::to_string(shard_no++) + ".jsonl";
    std::string buf;
    std::size_t end = std::min(picked.size(), begin + mix.shard_size);
    for (std::size_t i = begin; i < end; ++i) {
      json j = picked[i].second->to_json();
      j["meta"]["cell"] = picked[i].first;
      buf += j.dump();
      buf += '\n';
    }
    write_file(out_dir / name, buf);
    manifest.shards.push_back(name);
    if (end >= picked.size()) break;
  }
  write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace ggb
