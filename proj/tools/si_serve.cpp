// HTTP service for interactive sessions over one or more corpora.

#include <csignal>
#include <iostream>
#include <thread>

#include "sitext/error.hpp"
#include "sitext/http_api.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> corpora;
  std::string glove, host = "127.0.0.1", static_dir;
  int port = 8080;
  std::size_t dims = sitext::kDefaultDims;
  double lambda = 0.5;
  CLI::App app{"Serve the interactive session API"};
  app.add_option("--corpus", corpora, "name=path.jsonl (repeatable)")->required();
  app.add_option("--glove", glove, "GloVe text file; enables embedding sessions");
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "port, 0 for any")->check(CLI::Range(0, 65535));
  app.add_option("--static", static_dir, "directory served at /");
  app.add_option("--dims", dims, "feature dimensionality")->check(CLI::PositiveNumber);
  app.add_option("--lambda", lambda, "proximal regularization weight")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  sitext::ServiceConfig config;
  config.dims = dims;
  config.inversion.lambda = lambda;
  sitext::SessionManager manager(config);
  try {
    std::unordered_set<std::string> vocab;
    for (const std::string& spec : corpora) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw sitext::Error(sitext::ErrorCode::invalid_argument, "--corpus expects name=path, got \"" + spec + "\"");
      }
      manager.add_corpus(spec.substr(0, eq), sitext::load_jsonl(spec.substr(eq + 1)));
      if (!glove.empty()) vocab.merge(sitext::vocabulary(manager.corpus(spec.substr(0, eq))));
    }
    if (!glove.empty()) {
      auto loaded = sitext::load_embedding_table(glove, dims, {&vocab});
      for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
      manager.set_embeddings(std::make_shared<sitext::EmbeddingTable>(std::move(loaded.table)));
    }
  } catch (const sitext::Error& e) {
    std::cerr << "si-serve: " << e.what() << '\n';
    return 2;
  }

  sitext::HttpService service(manager, {static_dir});
  if (port == 0) {
    port = service.bind_to_any_port(host);
    if (port < 0) {
      std::cerr << "si-serve: cannot bind " << host << '\n';
      return 1;
    }
  } else if (!service.bind(host, port)) {
    std::cerr << "si-serve: cannot bind " << host << ':' << port << '\n';
    return 1;
  }

  // Route SIGINT/SIGTERM to a waiting thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  waiter.detach();

  std::cout << "listening on http://" << host << ':' << port << std::endl;
  return service.listen_after_bind() ? 0 : 1;
}
