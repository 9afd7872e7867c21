#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ggb/error.hpp"
#include "ggb/geometry.hpp"
#include "ggb/rng.hpp"

namespace ggb {

// Agent action space. Ids follow the AITW convention.
namespace action_type {
inline constexpr int kSwipeDown = 0;
inline constexpr int kSwipeUp = 1;
inline constexpr int kSelect = 2;
inline constexpr int kType = 3;
inline constexpr int kClick = 4;
inline constexpr int kPressBack = 5;
inline constexpr int kPressHome = 6;
inline constexpr int kPressEnter = 7;
inline constexpr int kSwipeLeft = 8;
inline constexpr int kSwipeRight = 9;

inline bool valid(int id) { return id >= 0 && id <= 9; }

inline const char* name(int id) {
  switch (id) {
    case kSwipeDown: return "swipe down";
    case kSwipeUp: return "swipe up";
    case kSelect: return "select";
    case kType: return "type";
    case kClick: return "click";
    case kPressBack: return "press back";
    case kPressHome: return "press home";
    case kPressEnter: return "press enter";
    case kSwipeLeft: return "swipe left";
    case kSwipeRight: return "swipe right";
  }
  return "unknown";
}
}  // namespace action_type

struct Action {
  int type_id = 0;
  std::optional<NormPoint> click_point;   // required iff type_id == 4
  std::optional<std::string> typed_text;  // required iff type_id == 3
  std::optional<std::string> value;       // required iff type_id == 2

  bool valid() const {
    if (!action_type::valid(type_id)) return false;
    if (click_point.has_value() != (type_id == action_type::kClick)) return false;
    if (typed_text.has_value() != (type_id == action_type::kType)) return false;
    if (value.has_value() != (type_id == action_type::kSelect)) return false;
    if (click_point && !click_point->valid()) return false;
    return true;
  }

  static Action click(NormPoint p) {
    return {action_type::kClick, p, std::nullopt, std::nullopt};
  }
  static Action type_text(std::string text) {
    return {action_type::kType, std::nullopt, std::move(text), std::nullopt};
  }
  static Action select(std::string v) {
    return {action_type::kSelect, std::nullopt, std::nullopt, std::move(v)};
  }
  static Action bare(int id) { return {id, std::nullopt, std::nullopt, std::nullopt}; }

  friend bool operator==(const Action&, const Action&) = default;
};

enum class EpisodeStatus { task_complete, task_impossible };

using AgentOutput = std::variant<Action, EpisodeStatus>;

namespace detail {

inline std::string quote_escaped(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string encode_action(const Action& a) {
  if (!a.valid())
    throw Error(ErrorKind::InvalidArgument,
                "action payload does not match type_id " +
                    std::to_string(a.type_id));
  std::string out = "action_type: " + std::to_string(a.type_id);
  if (a.click_point)
    out += ", click_point: " + format_location(*a.click_point);
  else if (a.typed_text)
    out += ", typed_text: " + detail::quote_escaped(*a.typed_text);
  else if (a.value)
    out += ", value: " + detail::quote_escaped(*a.value);
  return out;
}

inline std::string encode_action(EpisodeStatus s) {
  return s == EpisodeStatus::task_complete ? "TASK COMPLETE" : "TASK IMPOSSIBLE";
}

inline std::string encode_action(const AgentOutput& o) {
  return std::visit([](const auto& v) { return encode_action(v); }, o);
}

namespace detail {

inline std::optional<std::string> scan_quoted(std::string_view text,
                                              std::size_t& pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos >= text.size() || text[pos] != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      out += text[++i];
    } else if (text[i] == '"') {
      pos = i + 1;
      return out;
    } else {
      out += text[i];
    }
  }
  return std::nullopt;  // unterminated
}

}  // namespace detail

// Reads the first well-formed action or episode status out of free text.
inline AgentOutput parse_action(std::string_view text) {
  // Earliest match wins between an action literal and a status token.
  const std::size_t npos = std::string_view::npos;
  std::size_t at = text.find("action_type");
  std::size_t complete = text.find("TASK COMPLETE");
  std::size_t impossible = text.find("TASK IMPOSSIBLE");
  std::size_t status_at = std::min(complete, impossible);

  if (at == npos && status_at == npos)
    throw Error(ErrorKind::Parse, "no action found");
  if (status_at < at)
    return complete < impossible ? EpisodeStatus::task_complete
                                 : EpisodeStatus::task_impossible;

  std::string_view rest = text.substr(at + std::string_view("action_type").size());
  std::size_t pos = 0;
  while (pos < rest.size() && (rest[pos] == ' ' || rest[pos] == '\t')) ++pos;
  if (pos < rest.size() && rest[pos] == ':') ++pos;
  while (pos < rest.size() && (rest[pos] == ' ' || rest[pos] == '\t')) ++pos;
  std::size_t digits = pos;
  while (digits < rest.size() && std::isdigit(static_cast<unsigned char>(rest[digits])))
    ++digits;
  if (digits == pos)
    throw Error(ErrorKind::Parse, "action_type without numeric id");
  int id = std::stoi(std::string(rest.substr(pos, digits - pos)));
  if (!action_type::valid(id))
    throw Error(ErrorKind::Parse, "unknown action_type id " + std::to_string(id));
  std::string_view payload = rest.substr(digits);

  if (id == action_type::kClick) {
    auto loc = try_parse_location(payload);
    if (!loc || !std::holds_alternative<NormPoint>(*loc))
      throw Error(ErrorKind::Parse, "missing-click-point for action_type 4");
    return Action::click(std::get<NormPoint>(*loc));
  }
  if (id == action_type::kType || id == action_type::kSelect) {
    const char* field = id == action_type::kType ? "typed_text" : "value";
    std::size_t f = payload.find(field);
    if (f == npos)
      throw Error(ErrorKind::Parse,
                  std::string("missing ") + field + " for action_type " +
                      std::to_string(id));
    std::size_t qpos = f + std::string_view(field).size();
    while (qpos < payload.size() &&
           (payload[qpos] == ' ' || payload[qpos] == ':' || payload[qpos] == '\t'))
      ++qpos;
    auto s = detail::scan_quoted(payload, qpos);
    if (!s)
      throw Error(ErrorKind::Parse,
                  std::string("unquoted ") + field + " for action_type " +
                      std::to_string(id));
    return id == action_type::kType ? Action::type_text(*s) : Action::select(*s);
  }
  return Action::bare(id);
}

inline std::optional<AgentOutput> try_parse_action(std::string_view text,
                                                   std::string* error = nullptr) {
  try {
    return parse_action(text);
  } catch (const Error& e) {
    if (error) *error = e.what();
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Prompt construction.

struct PromptSpec {
  std::string instruction;
  std::vector<Action> history;  // chronological, oldest first
  int k = 4;                    // most recent k actions are rendered
};

inline constexpr std::string_view kDefaultAgentTemplate =
    "Please generate the next move according to the UI screenshot, "
    "instruction and previous actions.\n"
    "Instruction: {instruction}\n"
    "Previous actions:\n{history}\n"
    "Next action:";

inline constexpr std::string_view kDefaultGroundingPrompt =
    "In the UI, where should I click if I want to {instruction}?";

namespace detail {

inline std::string substitute(std::string_view tmpl, std::string_view key,
                              std::string_view value) {
  std::string out;
  std::string token = "{" + std::string(key) + "}";
  std::size_t pos = 0;
  for (;;) {
    std::size_t at = tmpl.find(token, pos);
    if (at == std::string_view::npos) {
      out += tmpl.substr(pos);
      return out;
    }
    out += tmpl.substr(pos, at - pos);
    out += value;
    pos = at + token.size();
  }
}

}  // namespace detail

inline std::string build_agent_prompt(
    const PromptSpec& spec, std::string_view tmpl = kDefaultAgentTemplate) {
  if (spec.instruction.empty())
    throw Error(ErrorKind::InvalidArgument, "empty instruction");
  std::string history;
  std::size_t n = spec.history.size();
  std::size_t from = n > static_cast<std::size_t>(spec.k)
                         ? n - static_cast<std::size_t>(spec.k)
                         : 0;
  if (from == n) {
    history = "None";
  } else {
    for (std::size_t i = from; i < n; ++i) {
      if (!history.empty()) history += '\n';
      history += encode_action(spec.history[i]);
    }
  }
  std::string out = detail::substitute(tmpl, "instruction", spec.instruction);
  return detail::substitute(out, "history", history);
}

// Uniform draw from a prompt pool with {instruction} substituted.
inline std::string build_grounding_prompt(std::string_view instruction,
                                          const std::vector<std::string>& pool,
                                          Rng& rng) {
  if (pool.empty()) throw Error(ErrorKind::InvalidArgument, "empty prompt pool");
  const std::string& tmpl = pool[rng.next_below(pool.size())];
  return detail::substitute(tmpl, "instruction", instruction);
}

// ---------------------------------------------------------------------------
// JSON (de)serialization for step files and predictions.

inline nlohmann::json action_to_json(const Action& a) {
  nlohmann::json j{{"type_id", a.type_id}};
  if (a.click_point) j["click_point"] = {a.click_point->x, a.click_point->y};
  if (a.typed_text) j["typed_text"] = *a.typed_text;
  if (a.value) j["value"] = *a.value;
  return j;
}

inline Action action_from_json(const nlohmann::json& j) {
  Action a;
  a.type_id = j.at("type_id").get<int>();
  if (j.contains("click_point")) {
    auto& p = j.at("click_point");
    a.click_point = NormPoint{p.at(0).get<double>(), p.at(1).get<double>()};
  }
  if (j.contains("typed_text")) a.typed_text = j.at("typed_text").get<std::string>();
  if (j.contains("value")) a.value = j.at("value").get<std::string>();
  if (!a.valid())
    throw Error(ErrorKind::Schema, "action payload mismatch for type_id " +
                                       std::to_string(a.type_id));
  return a;
}

}  // namespace ggb
