#pragma once

#include <string>

#include <httplib.h>

#include "gamediag/service.hpp"

namespace gamediag {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::DuplicateTrial: return 409;
    default: return 400;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, Json{{"code", code}, {"message", message}});
}

template <class Handler>
void guarded(httplib::Response& res, Handler&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
  } catch (const Json::exception& e) {
    send_error(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

}  // namespace detail

/// Routes:
///   POST /v1/children/{id}/sessions/{sid}/trials
///   GET  /v1/children/{id}/report
///   GET  /v1/children/{id}/alerts?since=ms
///   GET  /v1/healthz
inline void register_routes(httplib::Server& server, Service& service) {
  server.Post(R"(/v1/children/([^/]+)/sessions/([^/]+)/trials)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                detail::guarded(res, [&] {
                  const Json body = Json::parse(req.body);
                  const Ack ack = service.ingest_trial(req.matches[1], req.matches[2], body);
                  detail::send_json(res, 200, Json{{"v", kSchemaVersion}, {"ack", true},
                                                   {"trial_id", ack.trial_id}, {"duplicate", ack.duplicate}});
                });
              });

  server.Get(R"(/v1/children/([^/]+)/report)", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] { detail::send_json(res, 200, service.get_report(req.matches[1])); });
  });

  server.Get(R"(/v1/children/([^/]+)/alerts)", [&service](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(res, [&] {
      std::int64_t since = 0;
      if (req.has_param("since")) {
        const std::string raw = req.get_param_value("since");
        std::size_t used = 0;
        try {
          since = std::stoll(raw, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != raw.size()) throw Error(ErrorCode::BadRequest, "since must be an integer (ms)");
      }
      Json alerts = Json::array();
      for (const auto& a : service.get_alerts(req.matches[1], since)) alerts.push_back(to_json(a));
      detail::send_json(res, 200, Json{{"v", kSchemaVersion}, {"alerts", std::move(alerts)}});
    });
  });

  server.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) {
    detail::send_json(res, 200, Json{{"v", kSchemaVersion}, {"status", "ok"}});
  });
}

}  // namespace gamediag
