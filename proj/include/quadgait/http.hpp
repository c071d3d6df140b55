#pragma once

#include <functional>
#include <string>

// Eigen headers must come before httplib.h (<resolv.h> defines `_res`).
#include "quadgait/service.hpp"

#include <httplib.h>

namespace quadgait {

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void guarded(httplib::Response& res, const std::function<json()>& fn) {
  try {
    send_json(res, 200, fn());
  } catch (const ServiceError& e) {
    send_json(res, e.status(), {{"error", e.what()}});
  } catch (const json::exception& e) {
    send_json(res, 400, {{"error", std::string("malformed request body: ") + e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 400, {{"error", e.what()}});
  }
}

inline double query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) throw ServiceError(400, std::string("missing query parameter '") + key + "'");
  const std::string v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ServiceError(400, std::string("query parameter '") + key + "' must be a number");
  }
}

}  // namespace detail

/// Binds with SO_REUSEADDR only. httplib's default also sets SO_REUSEPORT,
/// which lets a second server share a port that is already serving.
inline void use_exclusive_port(httplib::Server& server) {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
}

/// Registers the studio API routes on `server`.
inline void mount_routes(httplib::Server& server, StudioService& svc) {
  using httplib::Request;
  using httplib::Response;

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const Request&, Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Get("/state", [&svc](const Request&, Response& res) { detail::guarded(res, [&] { return svc.state(); }); });
  server.Get("/skeleton",
             [&svc](const Request&, Response& res) { detail::guarded(res, [&] { return svc.skeleton(); }); });
  server.Get("/frame", [&svc](const Request& req, Response& res) {
    detail::guarded(res, [&] { return svc.frame(detail::query_number(req, "t")); });
  });
  server.Get("/clip", [&svc](const Request& req, Response& res) {
    detail::guarded(res, [&] {
      const double n = detail::query_number(req, "frames");
      if (n != std::floor(n) || n > 100000) throw ServiceError(400, "frames must be an integer ≤ 100000");
      return svc.clip(static_cast<int>(n));
    });
  });
  server.Post("/params", [&svc](const Request& req, Response& res) {
    detail::guarded(res, [&] { return svc.post_params(json::parse(req.body)); });
  });
  server.Post(R"(/preset/([A-Za-z0-9_\-]+))", [&svc](const Request& req, Response& res) {
    detail::guarded(res, [&] { return svc.post_preset(req.matches[1]); });
  });
  server.Post("/transition", [&svc](const Request& req, Response& res) {
    detail::guarded(res, [&] { return svc.post_transition(json::parse(req.body)); });
  });
}

}  // namespace quadgait
