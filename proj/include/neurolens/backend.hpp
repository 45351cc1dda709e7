#pragma once

#include "json.hpp"
#include "neurolens/error.hpp"
#include "neurolens/util.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

namespace neurolens {

enum class RequestKind { propose, cohyponym, caption, image, activation };

std::string to_string(RequestKind kind);
RequestKind parse_request_kind(const std::string &name);

// Parameter keys a request may carry.
const std::vector<std::string> &allowed_param_keys();

struct BackendRequest {
  RequestKind kind = RequestKind::propose;
  std::string prompt;
  std::optional<Bytes> image;
  nlohmann::json params = nlohmann::json::object();

  // Image payload is required for propose/activation and forbidden otherwise.
  void validate() const;
};

struct BackendResponse {
  nlohmann::json payload;
  bool refusal = false;
  std::string provenance;

  std::string text() const;
  double number() const;
  // Base64 entries decoded; null entries become empty buffers.
  std::vector<Bytes> images() const;
};

// Stable key order, whitespace-collapsed prompt, image replaced by its SHA-256.
nlohmann::json canonical_request(const BackendRequest &request);
std::string request_digest(const BackendRequest &request);

// Adapter wire format.
nlohmann::json request_to_wire(const BackendRequest &request);
BackendRequest request_from_wire(const nlohmann::json &j);
nlohmann::json response_to_wire(const BackendResponse &response);
BackendResponse response_from_wire(const nlohmann::json &j, const std::string &raw_body = {});

class CacheMissError : public Error {
public:
  CacheMissError(const std::string &digest, RequestKind kind)
      : Error("no stored response for " + to_string(kind) + " request " + digest),
        digest_(digest) {}
  const std::string &digest() const noexcept { return digest_; }

private:
  std::string digest_;
};

class Transport {
public:
  virtual ~Transport() = default;
  // Throws TransportError for retryable failures, ProtocolError otherwise.
  virtual BackendResponse send(const BackendRequest &request) = 0;
};

struct RetryPolicy {
  std::size_t max_attempts = 5;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};

  std::chrono::milliseconds delay_before(std::size_t retry) const;
};

struct RefusalDetector {
  // Case-insensitive substrings.
  std::vector<std::string> patterns{"i'm sorry", "i am sorry", "cannot identify",
                                    "can't identify", "unable to identify"};
  // Case-insensitive whole replies, ignoring surrounding punctuation.
  std::vector<std::string> exact{"refuse"};

  bool matches(const std::string &text) const;
};

class BackendClient {
public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit BackendClient(std::shared_ptr<Transport> transport, RetryPolicy policy = {},
                         RefusalDetector refusals = {}, std::size_t max_in_flight = 4,
                         Sleeper sleeper = {});

  BackendResponse call(const BackendRequest &request);

  std::size_t total_attempts() const noexcept { return attempts_.load(); }
  const RetryPolicy &policy() const noexcept { return policy_; }

private:
  std::shared_ptr<Transport> transport_;
  RetryPolicy policy_;
  RefusalDetector refusals_;
  std::counting_semaphore<> in_flight_;
  Sleeper sleeper_;
  std::atomic<std::size_t> attempts_{0};
};

inline constexpr int default_inference_steps = 4;
inline constexpr std::size_t default_images_per_caption = 5;

// One image request for `n` images; fails as a whole if any slot is missing
// or undecodable.
std::vector<Bytes> generate_images(BackendClient &client, const std::string &caption,
                                   std::size_t n, nlohmann::json params = nlohmann::json::object());

// The three generative services plus the activation probe.
struct BackendBundle {
  std::shared_ptr<BackendClient> mllm;
  std::shared_ptr<BackendClient> llm;
  std::shared_ptr<BackendClient> diffusion;
  std::shared_ptr<BackendClient> activation;
};

} // namespace neurolens
