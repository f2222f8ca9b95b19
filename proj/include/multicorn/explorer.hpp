#pragma once

// Request handling for the explorer HTTP service. Transport-free: the server
// binary feeds path and query pairs in and writes the Response out, so every
// endpoint is testable without sockets.

#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <list>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "multicorn/arc_seed.hpp"
#include "multicorn/census.hpp"
#include "multicorn/raster.hpp"
#include "multicorn/rays.hpp"
#include "multicorn/serialize.hpp"

namespace multicorn {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// Thread-safe LRU map from request key to response body.
class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

  bool get(const std::string& key, std::string& out) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = index_.find(key);
    if (it == index_.end()) return false;
    order_.splice(order_.begin(), order_, it->second);
    out = it->second->second;
    return true;
  }

  void put(const std::string& key, std::string value) {
    std::lock_guard<std::mutex> lock(mu_);
    if (capacity_ == 0) return;
    if (const auto it = index_.find(key); it != index_.end()) {
      it->second->second = std::move(value);
      order_.splice(order_.begin(), order_, it->second);
      return;
    }
    order_.emplace_front(key, std::move(value));
    index_[key] = order_.begin();
    if (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return order_.size();
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, std::string>> order_;
  std::unordered_map<std::string, std::list<std::pair<std::string, std::string>>::iterator> index_;
};

struct ExplorerConfig {
  std::size_t cache_capacity = 512;
  std::chrono::milliseconds arc_budget{30000};
  std::string cors_origin = "*";
  int max_period_probe = 5;
};

namespace detail {

struct BadRequest {
  std::string message;
};

// Strict query access: every key must be consumed by the handler.
class Query {
 public:
  Query(const QueryParams& params, std::set<std::string> allowed) {
    for (const auto& [k, v] : params) {
      if (!allowed.count(k)) throw BadRequest{"unknown parameter '" + k + "'"};
      if (!values_.emplace(k, v).second) throw BadRequest{"repeated parameter '" + k + "'"};
    }
  }

  bool has(const std::string& k) const { return values_.count(k) != 0; }

  const std::string* raw(const std::string& k) const {
    const auto it = values_.find(k);
    return it == values_.end() ? nullptr : &it->second;
  }

  double number(const std::string& k, std::optional<double> fallback = std::nullopt) const {
    const std::string* s = raw(k);
    if (!s) {
      if (fallback) return *fallback;
      throw BadRequest{"missing parameter '" + k + "'"};
    }
    double x = 0.0;
    const auto [end, ec] = std::from_chars(s->data(), s->data() + s->size(), x);
    if (ec != std::errc() || end != s->data() + s->size() || !std::isfinite(x))
      throw BadRequest{"parameter '" + k + "' is not a finite number"};
    return x;
  }

  int integer(const std::string& k, int fallback, int lo, int hi) const {
    const std::string* s = raw(k);
    if (!s) return fallback;
    int x = 0;
    const auto [end, ec] = std::from_chars(s->data(), s->data() + s->size(), x);
    if (ec != std::errc() || end != s->data() + s->size())
      throw BadRequest{"parameter '" + k + "' is not an integer"};
    if (x < lo || x > hi)
      throw BadRequest{"parameter '" + k + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
    return x;
  }

  // canonical key for caching: sorted pairs
  std::string key() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "&";
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline Response json_response(int status, const nlohmann::json& body) {
  nlohmann::json j = body;
  j["schema_version"] = kSchemaVersion;
  return {status, "application/json", j.dump(), {}};
}

inline Response error_response(int status, const std::string& message) {
  return json_response(status, {{"error", message}});
}

inline int tile_size(const Query& q) {
  const int size = q.integer("size", 256, 1, 4096);
  if (size != 128 && size != 256 && size != 512) throw BadRequest{"size must be 128, 256 or 512"};
  return size;
}

}  // namespace detail

class Explorer {
 public:
  explicit Explorer(ExplorerConfig cfg = {}) : cfg_(std::move(cfg)), cache_(cfg_.cache_capacity) {}

  Response handle(const std::string& path, const QueryParams& params) {
    Response r;
    try {
      if (path == "/api/tile") r = tile(params);
      else if (path == "/api/julia") r = julia(params);
      else if (path == "/api/arc") r = arc(params);
      else if (path == "/api/ray") r = ray(params);
      else if (path == "/api/probe") r = probe(params);
      else r = detail::error_response(404, "unknown endpoint " + path);
    } catch (const detail::BadRequest& e) {
      r = detail::error_response(400, e.message);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::invalid_argument) r = detail::error_response(400, e.what());
      else if (e.kind() == ErrorKind::not_periodic) r = detail::error_response(404, e.what());
      else if (e.kind() == ErrorKind::time_budget)
        r = detail::json_response(202, {{"retry", true}, {"error", e.what()}, {"hint", "retry with fewer steps"}});
      else r = detail::json_response(422, {{"error", e.what()}, {"kind", to_string(e.kind())}});
    }
    r.headers.emplace_back("Access-Control-Allow-Origin", cfg_.cors_origin);
    return r;
  }

  const LruCache& cache() const { return cache_; }

 private:
  Response cached_image(const std::string& key, const std::function<PixelGrid()>& render) {
    std::string body;
    if (!cache_.get(key, body)) {
      body = ppm_bytes(render(), Palette::standard());
      cache_.put(key, body);
    }
    return {200, "image/x-portable-pixmap", std::move(body), {}};
  }

  Response tile(const QueryParams& params) {
    const detail::Query q(params, {"d", "cx", "cy", "scale", "size", "max_iter"});
    const int d = q.integer("d", 2, 2, 16);
    const Cplx center(q.number("cx", 0.0), q.number("cy", 0.0));
    const double scale = q.number("scale", 4.0);
    if (!(scale > 0.0)) throw detail::BadRequest{"scale must be positive"};
    const int size = detail::tile_size(q);
    const int max_iter = q.integer("max_iter", 500, 1, 100000);
    const Viewport vp{center, scale, size, size};
    return cached_image("tile?" + q.key(), [&] { return render_multicorn(d, vp, max_iter); });
  }

  Response julia(const QueryParams& params) {
    const detail::Query q(params, {"d", "cre", "cim", "size", "max_iter", "scale"});
    const int d = q.integer("d", 2, 2, 16);
    const MapSpec m(d, Cplx(q.number("cre"), q.number("cim")));
    const double scale = q.number("scale", 2.0 * escape_radius(m));
    if (!(scale > 0.0)) throw detail::BadRequest{"scale must be positive"};
    const int size = detail::tile_size(q);
    const int max_iter = q.integer("max_iter", 500, 1, 100000);
    const Viewport vp{0.0, scale, size, size};
    return cached_image("julia?" + q.key(), [&] { return render_julia(m, vp, max_iter); });
  }

  Response arc(const QueryParams& params) {
    const detail::Query q(params, {"d", "k", "seed", "steps"});
    const int d = q.integer("d", 2, 2, 8);
    const int k = q.integer("k", 1, 1, 7);
    const int seed = q.integer("seed", 0, 0, 100000);
    TraceOptions opt;
    opt.max_steps = q.integer("steps", 400, 1, 5000);
    opt.deadline = std::chrono::steady_clock::now() + cfg_.arc_budget;
    const ArcSample start = seed_arc(d, k, seed, opt.sample);
    const auto samples = trace_full_arc(start, opt);
    nlohmann::json j = arc_json(samples, d, k);
    j["seed"] = seed;
    return detail::json_response(200, j);
  }

  Response ray(const QueryParams& params) {
    const detail::Query q(params, {"angle", "kind", "d", "cre", "cim", "pot_min"});
    const std::string* angle_text = q.raw("angle");
    if (!angle_text) throw detail::BadRequest{"missing parameter 'angle'"};
    RationalAngle a;
    try {
      a = parse_angle(*angle_text);
    } catch (const Error& e) {
      throw detail::BadRequest{e.what()};
    }
    const int d = q.integer("d", 2, 2, 16);
    const std::string kind = q.raw("kind") ? *q.raw("kind") : "parameter";
    RayOptions opt;
    opt.log_pot_min = std::log(10.0) * q.number("pot_min", -8.0);
    if (!(opt.log_pot_min < opt.log_pot_max)) throw detail::BadRequest{"pot_min must lie below the start potential"};
    if (opt.log_pot_min < std::log(10.0) * -300.0) throw detail::BadRequest{"pot_min below -300"};
    if (kind == "parameter") {
      if (q.has("cre") || q.has("cim")) throw detail::BadRequest{"parameter rays take no c"};
      return detail::json_response(200, ray_json(parameter_ray(a, d, opt)));
    }
    if (kind == "dynamic") {
      const MapSpec m(d, Cplx(q.number("cre"), q.number("cim")));
      return detail::json_response(200, ray_json(dynamic_ray(m, a, opt)));
    }
    throw detail::BadRequest{"kind must be 'parameter' or 'dynamic'"};
  }

  Response probe(const QueryParams& params) {
    const detail::Query q(params, {"d", "cre", "cim", "max_iter"});
    const int d = q.integer("d", 2, 2, 16);
    const Cplx c(q.number("cre"), q.number("cim"));
    const int max_iter = q.integer("max_iter", 5000, 1, 1000000);
    const PointClass p = classify_parameter(d, c, max_iter);
    nlohmann::json j = {{"c", {c.real(), c.imag()}},
                        {"d", d},
                        {"escaped", p.escaped},
                        {"iterations", p.iterations},
                        {"classification", p.escaped ? "exterior" : "interior"}};
    j["period"] = p.period > 0 ? nlohmann::json(p.period) : nlohmann::json(nullptr);
    nlohmann::json best = nullptr;
    double best_dist = 1e300;
    for (int n = 1; n <= max_probe_period(d); ++n) {
      for (Cplx z : centers(d, n)) {
        const double dist = std::abs(z - c);
        if (dist < best_dist) {
          best_dist = dist;
          best = {{"c", {z.real(), z.imag()}}, {"period", n}, {"distance", dist}};
        }
      }
    }
    j["nearest_center"] = best;
    return detail::json_response(200, j);
  }

  // keeps the start grid of find_centers bounded for larger degrees
  int max_probe_period(int d) const {
    int n = 1;
    while (n < cfg_.max_period_probe && (n + 1) * std::log2(static_cast<double>(d)) <= 6.0) ++n;
    return std::min(n, cfg_.max_period_probe);
  }

  const std::vector<Cplx>& centers(int d, int n) {
    std::lock_guard<std::mutex> lock(centers_mu_);
    auto it = centers_.find({d, n});
    if (it == centers_.end()) it = centers_.emplace(std::make_pair(d, n), find_centers(d, n)).first;
    return it->second;
  }

  ExplorerConfig cfg_;
  LruCache cache_;
  std::mutex centers_mu_;
  std::map<std::pair<int, int>, std::vector<Cplx>> centers_;
};

}  // namespace multicorn
