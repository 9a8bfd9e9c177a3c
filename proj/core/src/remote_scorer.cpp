#include <httplib.h>

#include <nlohmann/json.hpp>
#include <mutex>
#include <semaphore>
#include <thread>

#include "lmprobe/error.hpp"
#include "lmprobe/scorer.hpp"
#include "lmprobe/text.hpp"

namespace lmprobe {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("scorer URL needs a scheme: " + url);
  if (url.compare(0, scheme, "http") != 0)
    throw ConfigError("only http:// scorer URLs are supported: " + url);
  auto slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  if (slash != std::string::npos) e.prefix = url.substr(slash);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

}  // namespace

struct RemoteScorer::Impl {
  Impl(std::string url, RemoteOptions o)
      : base_url(std::move(url)),
        endpoint(split_url(base_url)),
        options(o),
        slots(std::max(1, o.max_in_flight)) {}

  json call(const std::string& method, const std::string& path,
            const json* body, bool retry) const {
    SlotGuard guard(slots);
    const int attempts = retry ? std::max(1, options.max_attempts) : 1;
    std::string last_error;
    auto backoff = options.initial_backoff;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      httplib::Client cli(endpoint.origin);
      cli.set_connection_timeout(options.timeout);
      cli.set_read_timeout(options.timeout);
      cli.set_write_timeout(options.timeout);
      const std::string full = endpoint.prefix + path;
      auto res = method == "GET"
                     ? cli.Get(full)
                     : cli.Post(full, body ? body->dump() : std::string("{}"),
                                "application/json");
      if (res && res->status == 200) {
        try {
          return json::parse(res->body);
        } catch (const json::parse_error& e) {
          throw TransportError(path + ": malformed JSON response: " + e.what());
        }
      }
      if (res) {
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status >= 400 && res->status < 500)
          throw TransportError(path + ": " + last_error + ": " + res->body);
      } else {
        last_error = httplib::to_string(res.error());
      }
      if (attempt < attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    throw TransportError(method + " " + base_url + path + " failed after " +
                         std::to_string(attempts) + " attempt(s): " + last_error);
  }

  std::string base_url;
  Endpoint endpoint;
  RemoteOptions options;
  mutable std::counting_semaphore<> slots;
  mutable std::mutex caps_mutex;
  mutable std::optional<ScorerCapabilities> caps;
};

RemoteScorer::RemoteScorer(std::string base_url, RemoteOptions options)
    : impl_(std::make_unique<Impl>(std::move(base_url), options)) {}

RemoteScorer::~RemoteScorer() = default;

ScorerCapabilities RemoteScorer::capabilities() const {
  std::lock_guard lock(impl_->caps_mutex);
  if (impl_->caps) return *impl_->caps;
  auto doc = impl_->call("GET", "/v1/capabilities", nullptr, true);
  ScorerCapabilities c;
  try {
    c.mask_anywhere = doc.at("mask_anywhere").get<bool>();
    c.mask_token = doc.at("mask_token").get<std::string>();
    c.vocab_size = doc.at("vocab_size").get<std::int64_t>();
    c.model_name = doc.at("model_name").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("/v1/capabilities: bad response: ") + e.what());
  }
  if (c.mask_token.empty() || c.vocab_size <= 0)
    throw TransportError("/v1/capabilities: invalid values");
  impl_->caps = c;
  return c;
}

RankedPredictions RemoteScorer::score_fill(
    std::string_view prompt, std::size_t top_n,
    const std::optional<std::vector<std::string>>& candidates) const {
  check_fill_request(prompt, capabilities().mask_token, top_n);
  json body{{"sentence", std::string(prompt)}, {"top_n", top_n}};
  body["candidates"] = candidates ? json(*candidates) : json(nullptr);
  auto doc = impl_->call("POST", "/v1/fill", &body, true);

  RankedPredictions out{std::string(prompt), {}};
  try {
    for (const auto& p : doc.at("predictions"))
      out.entries.push_back({p.at("token").get<std::string>(), p.at("logprob").get<double>()});
  } catch (const json::exception& e) {
    throw TransportError(std::string("/v1/fill: bad response: ") + e.what());
  }
  canonicalize(out.entries, top_n);
  return out;
}

double RemoteScorer::perplexity(std::string_view sentence) const {
  if (collapse_whitespace(sentence).empty())
    throw ContractError("perplexity of an empty sentence");
  json body{{"sentence", std::string(sentence)}};
  auto doc = impl_->call("POST", "/v1/perplexity", &body, true);
  double ppl = 0;
  try {
    ppl = doc.at("perplexity").get<double>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("/v1/perplexity: bad response: ") + e.what());
  }
  if (!(ppl > 0)) throw TransportError("/v1/perplexity: non-positive perplexity");
  return ppl;
}

std::string RemoteScorer::identity() const {
  return "remote:" + impl_->base_url + ":" + capabilities().model_name;
}

std::string RemoteScorer::finetune(const std::string& train_path,
                                   const std::string& val_path, int epochs) const {
  json body{{"triples_train", train_path}, {"triples_val", val_path}, {"epochs", epochs}};
  auto doc = impl_->call("POST", "/v1/finetune", &body, false);
  try {
    return doc.at("checkpoint").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("/v1/finetune: bad response: ") + e.what());
  }
}

}  // namespace lmprobe
