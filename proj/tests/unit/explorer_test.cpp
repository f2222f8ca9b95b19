#include <gtest/gtest.h>

#include <thread>

#include "multicorn/explorer.hpp"

using namespace multicorn;

namespace {

nlohmann::json body(const Response& r) { return nlohmann::json::parse(r.body); }

std::string header(const Response& r, const std::string& name) {
  for (const auto& [k, v] : r.headers)
    if (k == name) return v;
  return {};
}

// mirror rows of a square PPM payload
std::string mirror_rows(const std::string& ppm, int size) {
  const std::size_t head = ppm.size() - static_cast<std::size_t>(size) * size * 3;
  std::string out = ppm.substr(0, head);
  for (int j = size - 1; j >= 0; --j) out += ppm.substr(head + static_cast<std::size_t>(j) * size * 3, size * 3);
  return out;
}

}  // namespace

TEST(Lru, EvictsLeastRecentlyUsed) {
  LruCache c(2);
  c.put("a", "1");
  c.put("b", "2");
  std::string v;
  ASSERT_TRUE(c.get("a", v));
  c.put("c", "3");
  EXPECT_TRUE(c.get("a", v));
  EXPECT_FALSE(c.get("b", v));
  EXPECT_TRUE(c.get("c", v));
  EXPECT_EQ(c.size(), 2u);
}

TEST(Explorer, DefaultTileIsTheTricorn) {
  Explorer ex;
  const Response r = ex.handle("/api/tile", {{"size", "128"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type, "image/x-portable-pixmap");
  const std::string expected = ppm_bytes(render_multicorn(2, Viewport{0.0, 4.0, 128, 128}, 500), Palette::standard());
  EXPECT_EQ(r.body, expected);
  EXPECT_EQ(header(r, "Access-Control-Allow-Origin"), "*");
}

TEST(Explorer, ConjugateTilesAgreeAfterRowMirror) {
  Explorer ex;
  const QueryParams up = {{"cx", "-0.75"}, {"cy", "0.3"}, {"scale", "0.8"}, {"size", "128"}};
  const QueryParams down = {{"cx", "-0.75"}, {"cy", "-0.3"}, {"scale", "0.8"}, {"size", "128"}};
  const Response a = ex.handle("/api/tile", up), b = ex.handle("/api/tile", down);
  ASSERT_EQ(a.status, 200);
  EXPECT_EQ(mirror_rows(a.body, 128), b.body);
}

TEST(Explorer, TilesAreCachedAndStable) {
  Explorer ex;
  const QueryParams q = {{"cx", "0.1"}, {"size", "128"}, {"max_iter", "50"}};
  std::vector<std::string> bodies(4);
  std::vector<std::thread> ts;
  for (int i = 0; i < 4; ++i) ts.emplace_back([&, i] { bodies[i] = ex.handle("/api/tile", q).body; });
  for (auto& t : ts) t.join();
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
  EXPECT_EQ(ex.cache().size(), 1u);
}

TEST(Explorer, RejectsBadRequests) {
  Explorer ex;
  EXPECT_EQ(ex.handle("/api/tile", {{"size", "100"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/tile", {{"zoom", "2"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/tile", {{"scale", "-1"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/tile", {{"cx", "1"}, {"cx", "2"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/julia", {{"cre", "abc"}, {"cim", "0"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/julia", {{"cre", "0"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/ray", {{"angle", "1/0"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/ray", {{"angle", "1/3"}, {"kind", "sideways"}}).status, 400);
  EXPECT_EQ(ex.handle("/api/nothing", {}).status, 404);
  const Response r = ex.handle("/api/probe", {{"cre", "0"}, {"cim", "0"}, {"extra", "1"}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body(r)["schema_version"], kSchemaVersion);
  EXPECT_NE(body(r)["error"].get<std::string>().find("extra"), std::string::npos);
}

TEST(Explorer, JuliaOfZeroIsTheDisk) {
  Explorer ex;
  const Response r = ex.handle("/api/julia", {{"cre", "0"}, {"cim", "0"}, {"size", "128"}, {"scale", "4"}});
  ASSERT_EQ(r.status, 200);
  const PixelGrid g = render_julia(MapSpec(2, 0.0), Viewport{0.0, 4.0, 128, 128}, 500);
  EXPECT_EQ(r.body, ppm_bytes(g, Palette::standard()));
  EXPECT_FALSE(g.at(64, 64).escaped);
  EXPECT_TRUE(g.at(0, 0).escaped);
}

TEST(Explorer, ArcCarriesHeightsAndIndices) {
  Explorer ex;
  const Response r = ex.handle("/api/arc", {{"d", "2"}, {"k", "1"}, {"seed", "0"}, {"steps", "5"}});
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = body(r);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  ASSERT_EQ(j["samples"].size(), 11u);
  for (const auto& s : j["samples"]) {
    EXPECT_TRUE(s["h"].is_number());
    EXPECT_TRUE(s["iota"].is_number());
  }
  // matches the library dump that the CLI prints
  TraceOptions opt;
  opt.max_steps = 5;
  EXPECT_EQ(j["samples"], arc_json(trace_full_arc(seed_arc(2, 1, 0), opt), 2, 1)["samples"]);

  EXPECT_EQ(ex.handle("/api/arc", {{"k", "1"}, {"seed", "3"}}).status, 404);
  EXPECT_EQ(ex.handle("/api/arc", {{"k", "2"}}).status, 404);
}

TEST(Explorer, ArcOverBudgetAsksForRetry) {
  ExplorerConfig cfg;
  cfg.arc_budget = std::chrono::milliseconds(0);
  Explorer ex(cfg);
  const Response r = ex.handle("/api/arc", {{"k", "1"}});
  EXPECT_EQ(r.status, 202);
  EXPECT_TRUE(body(r)["retry"].get<bool>());
}

TEST(Explorer, RayEndpoint) {
  Explorer ex;
  const Response r = ex.handle("/api/ray", {{"angle", "0/1"}, {"pot_min", "-4"}});
  ASSERT_EQ(r.status, 200);
  const auto j = body(r);
  EXPECT_EQ(j["kind"], "parameter");
  EXPECT_EQ(j["angle"], "0/1");
  for (const auto& p : j["points"]) EXPECT_EQ(p[2].get<double>(), 0.0);
  const Response dyn = ex.handle("/api/ray", {{"angle", "12/33"}, {"kind", "dynamic"}, {"cre", "0"}, {"cim", "0"}});
  ASSERT_EQ(dyn.status, 200);
  EXPECT_EQ(body(dyn)["angle"], "4/11");
  EXPECT_EQ(ex.handle("/api/ray", {{"angle", "1/3"}, {"cre", "0"}, {"cim", "0"}}).status, 400);
}

TEST(Explorer, ProbeClassifies) {
  Explorer ex;
  auto probe = [&](const char* re, const char* im) {
    const Response r = ex.handle("/api/probe", {{"cre", re}, {"cim", im}});
    EXPECT_EQ(r.status, 200);
    return body(r);
  };
  const auto zero = probe("0", "0");
  EXPECT_EQ(zero["period"], 1);
  EXPECT_EQ(zero["nearest_center"]["period"], 1);
  const auto minus_one = probe("-1", "0");
  EXPECT_EQ(minus_one["period"], 2);
  EXPECT_EQ(minus_one["nearest_center"]["period"], 2);
  EXPECT_LT(minus_one["nearest_center"]["distance"].get<double>(), 1e-9);
  const auto two = probe("2", "0");
  EXPECT_EQ(two["classification"], "exterior");
  EXPECT_TRUE(two["period"].is_null());
}
