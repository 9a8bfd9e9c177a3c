#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <nlohmann/json.hpp>
#include <thread>

#include "lmprobe/error.hpp"
#include "lmprobe/scorer.hpp"

using namespace lmprobe;
using nlohmann::json;

namespace {

class MockServer {
 public:
  explicit MockServer(std::string prefix = "") : prefix_(std::move(prefix)) {
    server_.Get(prefix_ + "/v1/capabilities", [this](const httplib::Request&, httplib::Response& res) {
      ++caps_calls;
      res.set_content(R"({"mask_anywhere": false, "mask_token": "<mask>", "vocab_size": 50265, "model_name": "mock-roberta"})",
                      "application/json");
    });
    server_.Post(prefix_ + "/v1/fill", [this](const httplib::Request& req, httplib::Response& res) {
      ++fill_calls;
      last_fill = json::parse(req.body);
      if (fail_fills > 0) {
        --fail_fills;
        res.status = 500;
        return;
      }
      res.set_content(R"({"predictions": [{"token": "b", "logprob": -2.0}, {"token": "a", "logprob": -1.0}, {"token": "c", "logprob": -3.0}]})",
                      "application/json");
    });
    server_.Post(prefix_ + "/v1/perplexity", [this](const httplib::Request& req, httplib::Response& res) {
      ++ppl_calls;
      auto body = json::parse(req.body);
      if (body.at("sentence") == "bad request") {
        res.status = 422;
        res.set_content("unprocessable", "text/plain");
        return;
      }
      res.set_content(R"({"perplexity": 17.25})", "application/json");
    });
    server_.Post(prefix_ + "/v1/finetune", [this](const httplib::Request&, httplib::Response& res) {
      ++finetune_calls;
      res.status = 503;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + prefix_; }

  std::atomic<int> caps_calls{0}, fill_calls{0}, ppl_calls{0}, finetune_calls{0};
  std::atomic<int> fail_fills{0};
  json last_fill;

 private:
  std::string prefix_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RemoteOptions fast() {
  RemoteOptions o;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST(RemoteScorer, CapabilitiesCached) {
  MockServer m;
  RemoteScorer s(m.url(), fast());
  auto c = s.capabilities();
  EXPECT_FALSE(c.mask_anywhere);
  EXPECT_EQ(c.mask_token, "<mask>");
  EXPECT_EQ(c.vocab_size, 50265);
  EXPECT_EQ(c.model_name, "mock-roberta");
  s.capabilities();
  EXPECT_EQ(m.caps_calls.load(), 1);
  EXPECT_EQ(s.identity(), "remote:" + m.url() + ":mock-roberta");
}

TEST(RemoteScorer, FillRequestAndCanonicalOrder) {
  MockServer m;
  RemoteScorer s(m.url(), fast());
  auto r = s.score_fill("x is <mask> .", 2, std::vector<std::string>{"a", "b"});
  EXPECT_EQ(r.top_tokens(5), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.last_fill.at("sentence"), "x is <mask> .");
  EXPECT_EQ(m.last_fill.at("top_n"), 2);
  EXPECT_EQ(m.last_fill.at("candidates"), json::array({"a", "b"}));
  s.score_fill("x is <mask> .", 2);
  EXPECT_TRUE(m.last_fill.at("candidates").is_null());
  EXPECT_THROW(s.score_fill("x is [MASK] .", 2), ContractError);
}

TEST(RemoteScorer, Perplexity) {
  MockServer m;
  RemoteScorer s(m.url(), fast());
  EXPECT_DOUBLE_EQ(s.perplexity("a b c"), 17.25);
  EXPECT_THROW(s.perplexity("  "), ContractError);
}

TEST(RemoteScorer, RetriesServerErrors) {
  MockServer m;
  m.fail_fills = 2;
  RemoteScorer s(m.url(), fast());
  auto r = s.score_fill("q <mask>", 3);
  EXPECT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(m.fill_calls.load(), 3);

  m.fail_fills = 5;
  m.fill_calls = 0;
  EXPECT_THROW(s.score_fill("q <mask>", 3), TransportError);
  EXPECT_EQ(m.fill_calls.load(), 3);
}

TEST(RemoteScorer, ClientErrorsNotRetried) {
  MockServer m;
  RemoteScorer s(m.url(), fast());
  EXPECT_THROW(s.perplexity("bad request"), TransportError);
  EXPECT_EQ(m.ppl_calls.load(), 1);
}

TEST(RemoteScorer, FinetuneNotRetried) {
  MockServer m;
  RemoteScorer s(m.url(), fast());
  EXPECT_THROW(s.finetune("train.tsv", "val.tsv", 3), TransportError);
  EXPECT_EQ(m.finetune_calls.load(), 1);
}

TEST(RemoteScorer, PathPrefix) {
  MockServer m("/models/base");
  RemoteScorer s(m.url() + "/", fast());
  EXPECT_EQ(s.capabilities().model_name, "mock-roberta");
  EXPECT_DOUBLE_EQ(s.perplexity("a"), 17.25);
}

TEST(RemoteScorer, ConcurrentCalls) {
  MockServer m;
  auto o = fast();
  o.max_in_flight = 2;
  RemoteScorer s(m.url(), o);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] {
      if (s.perplexity("a b") == 17.25) ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 8);
}

TEST(RemoteScorer, UnreachableServer) {
  auto o = fast();
  o.max_attempts = 2;
  o.timeout = std::chrono::seconds(1);
  RemoteScorer s("http://127.0.0.1:1", o);
  EXPECT_THROW(s.capabilities(), TransportError);
  EXPECT_THROW(RemoteScorer("no-scheme"), ConfigError);
  EXPECT_THROW(RemoteScorer("https://127.0.0.1:1"), ConfigError);
}
