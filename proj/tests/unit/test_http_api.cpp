#include <gtest/gtest.h>

#include <thread>

// Eigen must be parsed before httplib drags in <resolv.h> and its _res macro.
#include "sitext/http_api.hpp"

#include "httplib.h"
#include "json.hpp"

using namespace sitext;
using nlohmann::json;

namespace {

Corpus http_corpus() {
  std::vector<Document> docs;
  const char* words[] = {"engine wheel brake", "engine clutch gear", "faith church prayer", "church gospel saint",
                         "wheel gear piston", "bible prayer saint"};
  for (int i = 0; i < 6; ++i) {
    docs.push_back({"d" + std::to_string(i), words[i], i == 2 || i == 3 || i == 5 ? "god" : "car", {}});
  }
  docs.push_back({"nolabel", "engine prayer", std::nullopt, {}});
  return Corpus(std::move(docs));
}

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    ServiceConfig c;
    c.dims = 16;
    manager = std::make_unique<SessionManager>(c);
    manager->add_corpus("toy", http_corpus());
    service = std::make_unique<HttpService>(*manager);
    port = service->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { service->listen_after_bind(); });
    service->wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  void TearDown() override {
    service->stop();
    if (thread.joinable()) thread.join();
  }

  json post(const std::string& path, const json& body, int expected_status) {
    auto res = client->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expected_status) {
    auto res = client->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << res->body;
    return json::parse(res->body);
  }

  std::string new_session() {
    return post("/sessions", {{"corpus", "toy"}, {"feature_mode", "keyword"}}, 201)["session_id"];
  }

  std::unique_ptr<SessionManager> manager;
  std::unique_ptr<HttpService> service;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = -1;
};

}  // namespace

TEST_F(HttpApi, CreateAndGetSession) {
  const json created = post("/sessions", {{"corpus", "toy"}, {"feature_mode", "keyword"}}, 201);
  EXPECT_EQ(created["revision"], 0);
  const std::string id = created["session_id"];
  const json state = get("/sessions/" + id, 200);
  EXPECT_EQ(state["session_id"], id);
  EXPECT_EQ(state["feature_mode"], "keyword");
  EXPECT_EQ(state["revision"], 0);
  EXPECT_EQ(state["doc_ids"].size(), 7u);
  ASSERT_EQ(state["layout"].size(), 7u);
  for (const json& p : state["layout"]) {
    ASSERT_EQ(p.size(), 2u);
    EXPECT_GE(p[0].get<double>(), 0.0);
    EXPECT_LE(p[1].get<double>(), 1.0);
  }
  EXPECT_TRUE(state["pinned"].empty());
  EXPECT_EQ(state["weights_digest"]["dims"], 16);
  EXPECT_EQ(state["documents"][0]["label"], "car");
  EXPECT_FALSE(state["documents"][6].contains("label"));
}

TEST_F(HttpApi, InteractionIncrementsRevision) {
  const std::string id = new_session();
  const json moves{{"moves", {{{"doc_id", "d0"}, {"x", 0.5}, {"y", 0.5}}, {{"doc_id", "d1"}, {"x", 0.5}, {"y", 0.5}}}}};
  const json update = post("/sessions/" + id + "/interactions", moves, 200);
  EXPECT_EQ(update["revision"], 1);
  EXPECT_EQ(update["layout"].size(), 7u);
  EXPECT_EQ(update["approximate"], true);
  EXPECT_EQ(update["replayed"], false);
  EXPECT_FALSE(update["top_weights"].empty());
  EXPECT_TRUE(update["top_weights"][0].contains("dimension"));

  const json again = post("/sessions/" + id + "/interactions", moves, 200);
  EXPECT_EQ(again["revision"], 1);
  EXPECT_EQ(again["replayed"], true);

  const json state = get("/sessions/" + id, 200);
  EXPECT_EQ(state["revision"], 1);
  EXPECT_EQ(state["pinned"].size(), 2u);
  EXPECT_EQ(state["pinned"][0]["doc_id"], "d0");
}

TEST_F(HttpApi, ReleaseAndReset) {
  const std::string id = new_session();
  post("/sessions/" + id + "/interactions",
       {{"moves", {{{"doc_id", "d0"}, {"x", 0}, {"y", 0}}, {{"doc_id", "d2"}, {"x", 1}, {"y", 1}}}}}, 200);
  const json released = post("/sessions/" + id + "/release", {{"doc_ids", {"d0"}}}, 200);
  EXPECT_EQ(released["revision"], 2);
  EXPECT_EQ(released["pinned"].size(), 1u);
  const json reset = post("/sessions/" + id + "/reset", json::object(), 200);
  EXPECT_EQ(reset["revision"], 3);
  EXPECT_EQ(reset["layout"].size(), 7u);
  EXPECT_TRUE(get("/sessions/" + id, 200)["pinned"].empty());
}

TEST_F(HttpApi, CorpusDocument) {
  const json doc = get("/corpus/d2", 200);
  EXPECT_EQ(doc["id"], "d2");
  EXPECT_EQ(doc["text"], "faith church prayer");
  EXPECT_EQ(doc["label"], "god");
  EXPECT_FALSE(get("/corpus/nolabel?corpus=toy", 200).contains("label"));
  EXPECT_EQ(get("/corpus/ghost", 404)["code"], "not_found");
}

TEST_F(HttpApi, ErrorStatuses) {
  const std::string id = new_session();
  const json ghost = post("/sessions/" + id + "/interactions",
                          {{"moves", {{{"doc_id", "ghost"}, {"x", 0}, {"y", 0}}, {{"doc_id", "d1"}, {"x", 1}, {"y", 1}}}}},
                          404);
  EXPECT_EQ(ghost["code"], "not_found");
  EXPECT_TRUE(ghost.contains("message"));
  EXPECT_EQ(get("/sessions/" + id, 200)["revision"], 0);

  EXPECT_EQ(post("/sessions/" + id + "/interactions", {{"moves", {{{"doc_id", "d1"}, {"x", 1}, {"y", 1}}}}}, 409)["code"],
            "precondition_failed");
  EXPECT_EQ(post("/sessions/" + id + "/interactions", {{"moves", {{{"doc_id", "d1"}, {"x", 2}, {"y", 1}}}}}, 400)["code"],
            "invalid_argument");
  EXPECT_EQ(post("/sessions/" + id + "/interactions", {{"moves", "nope"}}, 400)["code"], "invalid_argument");
  EXPECT_EQ(post("/sessions", {{"feature_mode", "embedding"}}, 409)["code"], "precondition_failed");
  EXPECT_EQ(post("/sessions", {{"feature_mode", "bogus"}}, 400)["code"], "invalid_argument");
  get("/sessions/s404", 404);

  auto res = client->Post("/sessions/" + id + "/interactions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["code"], "parse_error");
  EXPECT_EQ(get("/no/such/route", 404)["code"], "not_found");
}
