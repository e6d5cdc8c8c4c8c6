#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "docmine/service.hpp"
#include "support/fixtures.hpp"

using namespace docmine;

namespace {

struct RunningServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  explicit RunningServer(const ModelBundle& b) {
    install_routes(server, b);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~RunningServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60, 0);
    return c;
  }
};

nlohmann::json body_of(const httplib::Result& r) { return nlohmann::json::parse(r->body); }

}  // namespace

TEST_CASE("service endpoints", "[service]") {
  const auto& b = fixtures::shared_bundle();
  RunningServer srv(b);
  auto c = srv.client();

  SECTION("health") {
    const auto r = c.Get("/api/health");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(body_of(r)["status"] == "ok");
    CHECK(body_of(r)["corpus_checksum"] == b.corpus_checksum);
  }

  SECTION("classify JSON and plain text give 20 cells") {
    const std::string text = b.corpus[0].text();
    const auto r = c.Post("/api/classify", nlohmann::json{{"text", text}}.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto j = body_of(r);
    REQUIRE(j.size() == 20);
    for (const auto& cell : j) {
      CHECK(cell.contains("family"));
      CHECK(cell.contains("method"));
      CHECK(cell["predicted"].is_boolean());
      CHECK(cell["score"].get<double>() >= 0.0);
      CHECK(cell["score"].get<double>() <= 1.0);
    }
    const auto plain = c.Post("/api/classify", text, "text/plain");
    REQUIRE(plain);
    CHECK(body_of(plain) == j);
  }

  SECTION("classify rejects bad input") {
    auto r = c.Post("/api/classify", "{not json", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(body_of(r).contains("error"));
    r = c.Post("/api/classify", R"({"text":"   "})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    r = c.Post("/api/classify", std::string(kMaxRequestBytes + 10, 'a'), "text/plain");
    REQUIRE(r);
    CHECK(r->status == 413);
  }

  SECTION("search") {
    auto r = c.Get("/api/search?q=");
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(body_of(r).contains("error"));
    r = c.Get("/api/search?q=wheat&n=zero");
    REQUIRE(r);
    CHECK(r->status == 400);
    r = c.Get("/api/search?q=wheat%20harvest&n=3");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto j = body_of(r);
    CHECK(j.size() <= 3);
    const auto direct = search(b.index, "wheat harvest", 3);
    REQUIRE(j.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) CHECK(j[i]["doc_id"] == direct[i].doc_id);
    r = c.Get("/api/search?q=the%20of");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(body_of(r).empty());
  }

  SECTION("report and root page") {
    const auto r = c.Get("/api/report");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(body_of(r).size() == 25);
    const auto root = c.Get("/");
    REQUIRE(root);
    CHECK(root->status == 200);
    const auto missing = c.Get("/api/nothing");
    REQUIRE(missing);
    CHECK(missing->status == 404);
  }
}

TEST_CASE("concurrent requests do not change the report", "[service]") {
  const auto& b = fixtures::shared_bundle();
  RunningServer srv(b);
  const auto before = srv.client().Get("/api/report")->body;
  std::atomic<int> ok{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      auto c = srv.client();
      for (int i = 0; i < 5; ++i) {
        const auto r = c.Post("/api/classify", b.corpus[static_cast<std::size_t>(t * 5 + i)].text(), "text/plain");
        if (r && r->status == 200 && nlohmann::json::parse(r->body).size() == 20) ++ok;
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(ok == 20);
  CHECK(srv.client().Get("/api/report")->body == before);
}
