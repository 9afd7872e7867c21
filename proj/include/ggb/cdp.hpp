#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <httplib.h>
#include <json.hpp>

#include "ggb/error.hpp"
#include "ggb/harvest.hpp"
#include "ggb/io.hpp"

namespace ggb {

// Client for a browser remote-debugging endpoint. Only three kinds of
// query are issued: navigation, screenshot capture, and layout capture.

struct RenderOptions {
  double timeout_s = 30.0;
  std::filesystem::path screenshot_path;  // where the PNG is written
};

namespace cdp_detail {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;
using Clock = std::chrono::steady_clock;

struct WsUrl {
  std::string host;
  std::string port;
  std::string path;
};

inline WsUrl parse_ws_url(const std::string& url) {
  std::string rest = url;
  if (rest.rfind("ws://", 0) == 0) rest = rest.substr(5);
  std::size_t slash = rest.find('/');
  std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  WsUrl out;
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = hostport.rfind(':');
  if (colon == std::string::npos) {
    out.host = hostport;
    out.port = "80";
  } else {
    out.host = hostport.substr(0, colon);
    out.port = hostport.substr(colon + 1);
  }
  return out;
}

// One debugging session over a WebSocket. Synchronous surface backed by
// async operations so every wait is bounded by the deadline.
class Session {
 public:
  Session(const WsUrl& url, Clock::time_point deadline)
      : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    boost::system::error_code ec;
    auto endpoints = resolver.resolve(url.host, url.port, ec);
    if (ec) throw Error(ErrorKind::Connection, "resolve: " + ec.message(), true);
    beast::get_lowest_layer(ws_).expires_at(deadline);
    beast::get_lowest_layer(ws_).connect(endpoints, ec);
    if (ec) throw Error(ErrorKind::Connection, "connect: " + ec.message(), true);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
    ws_.handshake(url.host + ":" + url.port, url.path, ec);
    if (ec) throw Error(ErrorKind::Protocol, "ws handshake: " + ec.message(), true);
    // the websocket stream owns timeouts from here on
    beast::get_lowest_layer(ws_).expires_never();
    start_read();
  }

  ~Session() {
    boost::system::error_code ec;
    ws_.next_layer().socket().close(ec);
  }

  json command(const std::string& method, json params,
               Clock::time_point deadline) {
    int id = ++next_id_;
    json msg{{"id", id}, {"method", method}, {"params", std::move(params)}};
    async_write_text(msg.dump(), deadline, method);
    auto reply = wait([&] {
      auto it = responses_.find(id);
      if (it == responses_.end()) return std::optional<json>{};
      std::optional<json> out = std::move(it->second);
      responses_.erase(it);
      return out;
    }, deadline, method);
    if (reply.contains("error"))
      throw Error(ErrorKind::Protocol, method + ": " + reply["error"].dump());
    return reply.value("result", json::object());
  }

  json wait_event(const std::string& method, Clock::time_point deadline) {
    return wait([&]() -> std::optional<json> {
      for (auto it = events_.begin(); it != events_.end(); ++it) {
        if ((*it)["method"] == method) {
          json out = std::move(*it);
          events_.erase(it);
          return out;
        }
      }
      return std::nullopt;
    }, deadline, "event " + method);
  }

 private:
  // A sync write would race the outstanding async_read on the stream's
  // shared state; one async_read plus one async_write is permitted.
  void async_write_text(std::string payload, Clock::time_point deadline,
                        const std::string& what) {
    struct WriteState {
      std::string payload;
      bool done = false;
      boost::system::error_code ec;
    };
    auto state = std::make_shared<WriteState>();
    state->payload = std::move(payload);
    ws_.async_write(boost::asio::buffer(state->payload),
                    [state](boost::system::error_code ec, std::size_t) {
                      state->done = true;
                      state->ec = ec;
                    });
    while (!state->done) {
      if (read_error_)
        throw Error(ErrorKind::Protocol,
                    what + " write: " + read_error_->message(), true);
      if (Clock::now() >= deadline)
        throw Error(ErrorKind::Timeout, what + " write timed out", true);
      ioc_.restart();
      ioc_.run_for(std::chrono::milliseconds(25));
    }
    if (state->ec)
      throw Error(ErrorKind::Protocol, what + " write: " + state->ec.message(),
                  true);
  }

  template <typename Pred>
  json wait(Pred ready, Clock::time_point deadline, const std::string& what) {
    for (;;) {
      if (auto found = ready()) return *found;
      if (read_error_)
        throw Error(ErrorKind::Protocol, what + ": " + read_error_->message(), true);
      if (Clock::now() >= deadline)
        throw Error(ErrorKind::Timeout, what + " timed out", true);
      ioc_.restart();
      ioc_.run_for(std::chrono::milliseconds(25));
    }
  }

  void start_read() {
    ws_.async_read(buffer_, [this](boost::system::error_code ec, std::size_t) {
      if (ec) {
        read_error_ = ec;
        return;
      }
      json msg = json::parse(beast::buffers_to_string(buffer_.data()), nullptr, false);
      buffer_.consume(buffer_.size());
      if (!msg.is_discarded()) {
        if (msg.contains("id")) {
          // json::operator= takes its operand by value and the right side is
          // sequenced first, so the id must be read before moving msg
          int id = msg["id"].get<int>();
          responses_[id] = std::move(msg);
        } else
          events_.push_back(std::move(msg));
      }
      start_read();
    });
  }

  boost::asio::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::map<int, json> responses_;
  std::deque<json> events_;
  std::optional<boost::system::error_code> read_error_;
  int next_id_ = 0;
};

inline int string_at(const json& arr, std::size_t i) {
  return i < arr.size() ? arr[i].get<int>() : -1;
}

inline std::string lookup(const json& strings, int idx) {
  if (idx < 0 || idx >= static_cast<int>(strings.size())) return "";
  return strings[idx].get<std::string>();
}

// Folds a DOMSnapshot document into one LayoutNode per element:
// rendered text from text-node children, title from element attributes,
// bbox from the element box (or the union of its text boxes).
inline std::vector<LayoutNode> fold_snapshot(const json& result, PixelDims dims) {
  std::vector<LayoutNode> out;
  if (!result.contains("documents") || result["documents"].empty()) return out;
  const json& doc = result["documents"][0];
  const json& strings = result["strings"];
  const json& nodes = doc["nodes"];
  const json& layout = doc["layout"];
  const json& node_type = nodes["nodeType"];
  const json& parent_index = nodes.value("parentIndex", json::array());
  const json& attributes = nodes.value("attributes", json::array());
  const json& node_index = layout["nodeIndex"];
  const json& bounds = layout["bounds"];
  const json& text_idx = layout.value("text", json::array());
  const json& styles = layout.value("styles", json::array());

  struct Agg {
    LayoutNode node;
    bool has_box = false;
    bool seen = false;
  };
  std::map<long long, Agg> by_element;
  std::vector<long long> order;

  for (std::size_t i = 0; i < node_index.size(); ++i) {
    long long ni = node_index[i].get<long long>();
    double x = bounds[i][0].get<double>(), y = bounds[i][1].get<double>();
    double w = bounds[i][2].get<double>(), h = bounds[i][3].get<double>();
    std::string display, visibility;
    if (i < styles.size() && styles[i].is_array()) {
      display = lookup(strings, string_at(styles[i], 0));
      visibility = lookup(strings, string_at(styles[i], 1));
    }
    bool style_visible = display != "none" && visibility != "hidden";
    bool on_screen = w > 0 && h > 0 && x < dims.width && y < dims.height &&
                     x + w > 0 && y + h > 0;

    bool is_text_node = ni < static_cast<long long>(node_type.size()) &&
                        node_type[ni].get<int>() == 3;
    long long elem = is_text_node && ni < static_cast<long long>(parent_index.size())
                         ? parent_index[ni].get<long long>()
                         : ni;
    auto [it, inserted] = by_element.try_emplace(elem);
    Agg& agg = it->second;
    if (inserted) {
      order.push_back(elem);
      agg.node.id = elem;
    }
    agg.seen = true;
    std::string text = lookup(strings, i < text_idx.size()
                                           ? string_at(text_idx, i)
                                           : -1);
    if (!text.empty()) {
      if (!agg.node.text.empty()) agg.node.text += ' ';
      agg.node.text += text;
    }
    // element's own box wins over text-child boxes
    if (!is_text_node || !agg.has_box) {
      double l = std::max(0.0, x), t = std::max(0.0, y);
      double r = std::min(static_cast<double>(dims.width), x + w);
      double d = std::min(static_cast<double>(dims.height), y + h);
      if (r > l && d > t) {
        agg.node.left = l;
        agg.node.top = t;
        agg.node.right = r;
        agg.node.down = d;
        agg.has_box = !is_text_node;
      }
    }
    agg.node.visible = agg.node.visible || (style_visible && on_screen);
    if (inserted) agg.node.visible = style_visible && on_screen;
    if (elem < static_cast<long long>(attributes.size()) &&
        attributes[elem].is_array()) {
      const json& attrs = attributes[elem];
      for (std::size_t a = 0; a + 1 < attrs.size(); a += 2)
        if (lookup(strings, attrs[a].get<int>()) == "title")
          agg.node.title = lookup(strings, attrs[a + 1].get<int>());
    }
  }

  for (long long id : order) {
    const Agg& agg = by_element[id];
    if (agg.node.right > agg.node.left && agg.node.down > agg.node.top)
      out.push_back(agg.node);
  }
  return out;
}

}  // namespace cdp_detail

inline RenderedPageSnapshot render_page(const std::string& url,
                                        const std::string& renderer_endpoint,
                                        const RenderOptions& opts = {}) {
  using cdp_detail::Clock;
  auto deadline = Clock::now() + std::chrono::milliseconds(
                                     static_cast<long long>(opts.timeout_s * 1000));

  httplib::Client http("http://" + renderer_endpoint);
  http.set_connection_timeout(std::chrono::duration<double>(opts.timeout_s));
  http.set_read_timeout(std::chrono::duration<double>(opts.timeout_s));
  auto list = http.Get("/json/list");
  if (!list || list->status != 200)
    throw Error(ErrorKind::Connection,
                "renderer endpoint " + renderer_endpoint + " unreachable", true);
  json targets = json::parse(list->body, nullptr, false);
  if (targets.is_discarded() || !targets.is_array())
    throw Error(ErrorKind::Protocol, "bad /json/list response");
  std::string ws_url;
  for (const auto& t : targets) {
    if (!t.contains("webSocketDebuggerUrl")) continue;
    ws_url = t["webSocketDebuggerUrl"].get<std::string>();
    if (t.value("type", "") == "page") break;
  }
  if (ws_url.empty())
    throw Error(ErrorKind::Protocol, "no debuggable page target");

  cdp_detail::Session session(cdp_detail::parse_ws_url(ws_url), deadline);
  session.command("Page.enable", json::object(), deadline);
  auto nav = session.command("Page.navigate", {{"url", url}}, deadline);
  if (nav.contains("errorText") && !nav["errorText"].get<std::string>().empty())
    throw Error(ErrorKind::Protocol,
                "navigation failed: " + nav["errorText"].get<std::string>(), true);
  session.wait_event("Page.loadEventFired", deadline);

  auto evaluated = session.command(
      "Runtime.evaluate",
      {{"expression", "document.contentType"}, {"returnByValue", true}}, deadline);
  std::string content_type =
      evaluated.value("result", json::object()).value("value", "");
  if (content_type != "text/html")
    throw Error(ErrorKind::UnsupportedContent,
                "content type " + content_type + " for " + url);

  auto metrics = session.command("Page.getLayoutMetrics", json::object(), deadline);
  PixelDims dims;
  if (metrics.contains("cssLayoutViewport")) {
    dims.width = metrics["cssLayoutViewport"].value("clientWidth", 0);
    dims.height = metrics["cssLayoutViewport"].value("clientHeight", 0);
  }
  if (!dims.valid())
    throw Error(ErrorKind::Protocol, "renderer returned empty layout viewport");

  RenderedPageSnapshot snap;
  snap.url = url;
  snap.dims = dims;

  auto shot = session.command("Page.captureScreenshot", json::object(), deadline);
  if (!shot.contains("data"))
    throw Error(ErrorKind::Protocol, "captureScreenshot returned no data");
  if (!opts.screenshot_path.empty()) {
    write_file(opts.screenshot_path,
               base64_decode(shot["data"].get<std::string>()));
    snap.screenshot = opts.screenshot_path.string();
  }

  auto dom = session.command(
      "DOMSnapshot.captureSnapshot",
      {{"computedStyles", {"display", "visibility"}}}, deadline);
  snap.nodes = cdp_detail::fold_snapshot(dom, dims);
  return snap;
}

}  // namespace ggb
