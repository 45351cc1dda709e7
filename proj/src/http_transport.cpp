#include "neurolens/http_transport.hpp"

#include "httplib.h"

namespace neurolens {

HttpTransport::HttpTransport(std::string url, std::string api_key, std::chrono::seconds timeout)
    : url_(std::move(url)), api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend URL must include a scheme: " + url_);
  }
  const auto path_start = url_.find('/', scheme_end + 3);
  host_ = url_.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url_.substr(path_start);
}

BackendResponse HttpTransport::send(const BackendRequest &request) {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }
  const std::string body = request_to_wire(request).dump();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    throw TransportError("POST " + url_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("POST " + url_ + " returned HTTP " + std::to_string(res->status),
                         res->status);
  }
  if (res->status != 200) {
    throw ProtocolError("POST " + url_ + " returned HTTP " + std::to_string(res->status),
                        res->body);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error &e) {
    throw ProtocolError(std::string("reply is not JSON: ") + e.what(), res->body);
  }
  BackendResponse r = response_from_wire(doc, res->body);
  if (r.provenance.empty()) {
    r.provenance = url_;
  }
  return r;
}

} // namespace neurolens
