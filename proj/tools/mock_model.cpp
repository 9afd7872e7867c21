// Standalone mock model server speaking the /predict wire protocol.
// Modes: oracle (answers from a JSONL answer key), constant, gibberish.

#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ggb/io.hpp"
#include "ggb/mock_model.hpp"

using namespace ggb;

int main(int argc, char** argv) {
  CLI::App app{"Mock model endpoint for the evaluation toolkit"};
  std::string mode_name = "oracle";
  std::string answers;
  std::string text = "(0.00, 0.00)";
  int port = 0;
  app.add_option("--mode", mode_name, "oracle|constant|gibberish")
      ->check(CLI::IsMember({"oracle", "constant", "gibberish"}));
  app.add_option("--answers", answers, "Answer key JSONL (oracle mode)");
  app.add_option("--text", text, "Response text (constant mode)");
  app.add_option("--port", port, "Port to bind (0 = ephemeral)");
  CLI11_PARSE(app, argc, argv);

  try {
    MockMode mode = mode_name == "constant"    ? MockMode::constant
                    : mode_name == "gibberish" ? MockMode::gibberish
                                               : MockMode::oracle;
    AnswerKey key;
    if (mode == MockMode::oracle) {
      if (answers.empty()) {
        std::cerr << "error: oracle mode needs --answers\n";
        return 1;
      }
      key = AnswerKey::from_jsonl(read_jsonl(answers));
    }
    MockModelServer server(mode, std::move(key), text);
    int bound = port == 0 ? server.start() : server.start_on(port);
    std::cout << "listening on http://127.0.0.1:" << bound << std::endl;
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
