// HTTP front for the explorer: GET /api/{tile,julia,arc,ray,probe}.

// the library comes first: httplib pulls in <resolv.h>, whose _res macro
// breaks Eigen's parameter names
#include "multicorn/explorer.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Multicorn explorer service"};
  int port = 8080;
  std::string host = "127.0.0.1";
  multicorn::ExplorerConfig cfg;
  int budget_ms = static_cast<int>(cfg.arc_budget.count());
  app.add_option("--port", port, "Listen port")->check(CLI::Range(1, 65535));
  app.add_option("--host", host, "Bind address");
  app.add_option("--cache", cfg.cache_capacity, "Tile cache capacity (entries)");
  app.add_option("--arc-budget-ms", budget_ms, "Time budget for arc requests")->check(CLI::PositiveNumber);
  app.add_option("--cors-origin", cfg.cors_origin, "Allowed browser origin");
  CLI11_PARSE(app, argc, argv);
  cfg.arc_budget = std::chrono::milliseconds(budget_ms);

  multicorn::Explorer explorer(cfg);
  httplib::Server srv;

  srv.Get(R"(/api/.*)", [&](const httplib::Request& req, httplib::Response& res) {
    multicorn::QueryParams params(req.params.begin(), req.params.end());
    const multicorn::Response r = explorer.handle(req.path, params);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, r.content_type);
  });
  srv.Options(R"(/api/.*)", [&](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", cfg.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!srv.listen(host, port)) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
