#pragma once

#include "neurolens/backend.hpp"

#include <chrono>
#include <string>

namespace neurolens {

// POSTs the adapter request JSON to a single endpoint URL. 429, 5xx and
// connection failures surface as TransportError; anything else that is not a
// well-formed 200 reply is a ProtocolError.
class HttpTransport : public Transport {
public:
  HttpTransport(std::string url, std::string api_key = {},
                std::chrono::seconds timeout = std::chrono::seconds(120));
  BackendResponse send(const BackendRequest &request) override;

  const std::string &url() const noexcept { return url_; }

private:
  std::string url_;
  std::string host_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

} // namespace neurolens
