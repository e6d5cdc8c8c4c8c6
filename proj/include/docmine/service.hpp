#pragma once

// HTTP surface over a loaded, immutable ModelBundle.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "docmine/bundle.hpp"
#include "docmine/eval.hpp"
#include "docmine/retrieval.hpp"

namespace docmine {

inline constexpr std::size_t kMaxRequestBytes = 1 << 20;
inline constexpr std::size_t kDefaultTopN = 10;

inline nlohmann::ordered_json classify_json(const ModelBundle& b, std::string_view text) {
  const auto feats = featurize(text, b.config().pipeline, b.models.vocab);
  auto out = nlohmann::ordered_json::array();
  for (const auto& p : classify_all(b.models, feats)) {
    out.push_back({{"family", std::string(family_name(p.family))},
                   {"method", std::string(p.method)},
                   {"predicted", p.predicted},
                   {"score", p.score}});
  }
  return out;
}

inline nlohmann::ordered_json search_json(const ModelBundle& b, std::string_view query, std::size_t n) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : search(b.index, query, n)) {
    out.push_back({{"doc_id", r.doc_id}, {"score", r.score}, {"title", r.title}, {"snippet", r.snippet}});
  }
  return out;
}

inline nlohmann::ordered_json report_json(const ModelBundle& b) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : parse_report_csv(b.report_csv)) {
    nlohmann::ordered_json obj;
    for (const auto& [k, v] : row) {
      if (k == "correct" || k == "total") obj[k] = std::stoull(v);
      else if (k == "family" || k == "method") obj[k] = v;
      else obj[k] = std::stod(v);
    }
    out.push_back(std::move(obj));
  }
  return out;
}

inline nlohmann::ordered_json health_json(const ModelBundle& b) {
  return {{"status", "ok"}, {"format_version", b.format_version}, {"corpus_checksum", b.corpus_checksum}};
}

namespace service_detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

// Request text from a JSON {"text": ...} body or a plain-text body.
inline std::optional<std::string> request_text(const httplib::Request& req, std::string& error) {
  const auto type = req.get_header_value("Content-Type");
  if (type.find("application/json") != std::string::npos) {
    const auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      error = "body is not a JSON object";
      return std::nullopt;
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      error = "missing string field 'text'";
      return std::nullopt;
    }
    return j["text"].get<std::string>();
  }
  return req.body;
}

}  // namespace service_detail

// Registers the API routes; `bundle` must outlive the server.
inline void install_routes(httplib::Server& server, const ModelBundle& bundle,
                           const std::optional<std::filesystem::path>& static_dir = std::nullopt) {
  using service_detail::send_error;
  using service_detail::send_json;
  server.set_payload_max_length(kMaxRequestBytes);

  server.Post("/api/classify", [&bundle](const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > kMaxRequestBytes) return send_error(res, 413, "request body exceeds 1 MiB");
    std::string error;
    const auto text = service_detail::request_text(req, error);
    if (!text) return send_error(res, 400, error);
    if (detail::trim(*text).empty()) return send_error(res, 400, "empty article text");
    send_json(res, 200, classify_json(bundle, *text));
  });

  server.Get("/api/search", [&bundle](const httplib::Request& req, httplib::Response& res) {
    const auto q = req.get_param_value("q");
    if (detail::trim(q).empty()) return send_error(res, 400, "missing query parameter 'q'");
    std::size_t n = kDefaultTopN;
    if (req.has_param("n")) {
      const auto raw = req.get_param_value("n");
      try {
        std::size_t used = 0;
        const long long v = std::stoll(raw, &used);
        if (used != raw.size() || v < 1) throw std::invalid_argument("n");
        n = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        return send_error(res, 400, "parameter 'n' must be a positive integer");
      }
    }
    send_json(res, 200, search_json(bundle, q, n));
  });

  server.Get("/api/report", [&bundle](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, report_json(bundle));
  });

  server.Get("/api/health", [&bundle](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, health_json(bundle));
  });

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 413) return send_error(res, 413, "request body exceeds 1 MiB");
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not found" : "request failed");
    }
  });

  if (static_dir && std::filesystem::is_directory(*static_dir)) {
    server.set_mount_point("/", static_dir->string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>docmine</title><p>Web UI assets not installed. API: "
          "<code>/api/health</code>, <code>/api/search?q=</code>, <code>POST /api/classify</code>, "
          "<code>/api/report</code>.</p>",
          "text/html");
    });
  }
}

}  // namespace docmine
