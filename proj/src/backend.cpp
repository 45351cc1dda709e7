#include "neurolens/backend.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

namespace neurolens {

namespace {

bool needs_image(RequestKind kind) {
  return kind == RequestKind::propose || kind == RequestKind::activation;
}

std::string strip_punctuation(const std::string &s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  auto junk = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c));
  };
  while (b < e && junk(s[b])) {
    ++b;
  }
  while (e > b && junk(s[e - 1])) {
    --e;
  }
  return s.substr(b, e - b);
}

} // namespace

std::string to_string(RequestKind kind) {
  switch (kind) {
  case RequestKind::propose:
    return "propose";
  case RequestKind::cohyponym:
    return "cohyponym";
  case RequestKind::caption:
    return "caption";
  case RequestKind::image:
    return "image";
  case RequestKind::activation:
    return "activation";
  }
  return "unknown";
}

RequestKind parse_request_kind(const std::string &name) {
  for (RequestKind k : {RequestKind::propose, RequestKind::cohyponym, RequestKind::caption,
                        RequestKind::image, RequestKind::activation}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ParameterError("unknown request kind '" + name + "'");
}

const std::vector<std::string> &allowed_param_keys() {
  static const std::vector<std::string> keys{
      "temperature", "max_tokens", "num_inference_steps", "num_images", "seed",
      "width",       "height",     "neuron",              "uri"};
  return keys;
}

void BackendRequest::validate() const {
  if (needs_image(kind) != image.has_value()) {
    throw ParameterError(to_string(kind) + (image ? " request must not carry an image"
                                                  : " request requires an image payload"));
  }
  if (!params.is_object()) {
    throw ParameterError("request params must be an object");
  }
  const auto &allowed = allowed_param_keys();
  for (const auto &[key, value] : params.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParameterError("request parameter '" + key + "' is not in the whitelist");
    }
  }
}

std::string BackendResponse::text() const {
  if (!payload.is_string()) {
    throw ProtocolError("expected a text payload", payload.dump());
  }
  return payload.get<std::string>();
}

double BackendResponse::number() const {
  if (!payload.is_number()) {
    throw ProtocolError("expected a numeric payload", payload.dump());
  }
  return payload.get<double>();
}

std::vector<Bytes> BackendResponse::images() const {
  if (!payload.is_array()) {
    throw ProtocolError("expected an array of images", payload.dump());
  }
  std::vector<Bytes> out;
  for (const auto &item : payload) {
    if (item.is_string()) {
      try {
        out.push_back(base64_decode(item.get<std::string>()));
      } catch (const ParameterError &) {
        out.emplace_back();
      }
    } else {
      out.emplace_back();
    }
  }
  return out;
}

nlohmann::json canonical_request(const BackendRequest &request) {
  nlohmann::json c{{"kind", to_string(request.kind)},
                   {"prompt", collapse_whitespace(request.prompt)},
                   {"params", request.params.is_null() ? nlohmann::json::object() : request.params}};
  if (request.image) {
    c["image_sha256"] = sha256_hex(*request.image);
  }
  return c;
}

std::string request_digest(const BackendRequest &request) {
  return sha256_hex(canonical_request(request).dump());
}

nlohmann::json request_to_wire(const BackendRequest &request) {
  nlohmann::json j{{"kind", to_string(request.kind)},
                   {"prompt", request.prompt},
                   {"params", request.params}};
  if (request.image) {
    j["image_b64"] = base64_encode(*request.image);
  }
  return j;
}

BackendRequest request_from_wire(const nlohmann::json &j) {
  BackendRequest r;
  try {
    r.kind = parse_request_kind(j.at("kind").get<std::string>());
    r.prompt = j.value("prompt", std::string{});
    if (j.contains("image_b64") && !j.at("image_b64").is_null()) {
      r.image = base64_decode(j.at("image_b64").get<std::string>());
    }
    r.params = j.value("params", nlohmann::json::object());
  } catch (const nlohmann::json::exception &e) {
    throw ProtocolError(std::string("malformed request: ") + e.what(), j.dump());
  }
  return r;
}

nlohmann::json response_to_wire(const BackendResponse &response) {
  return nlohmann::json{{"payload", response.payload},
                        {"refusal", response.refusal},
                        {"provenance", response.provenance}};
}

BackendResponse response_from_wire(const nlohmann::json &j, const std::string &raw_body) {
  if (!j.is_object() || !j.contains("payload")) {
    throw ProtocolError("response lacks a payload field", raw_body.empty() ? j.dump() : raw_body);
  }
  BackendResponse r;
  r.payload = j.at("payload");
  const auto &refusal = j.value("refusal", nlohmann::json(false));
  if (!refusal.is_boolean()) {
    throw ProtocolError("response refusal field must be boolean",
                        raw_body.empty() ? j.dump() : raw_body);
  }
  r.refusal = refusal.get<bool>();
  const auto &prov = j.value("provenance", nlohmann::json(""));
  r.provenance = prov.is_string() ? prov.get<std::string>() : prov.dump();
  return r;
}

std::chrono::milliseconds RetryPolicy::delay_before(std::size_t retry) const {
  double ms = static_cast<double>(initial_delay.count());
  for (std::size_t i = 1; i < retry; ++i) {
    ms *= multiplier;
  }
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

bool RefusalDetector::matches(const std::string &text) const {
  const std::string lower = to_lower(text);
  for (const auto &p : patterns) {
    if (!p.empty() && lower.find(to_lower(p)) != std::string::npos) {
      return true;
    }
  }
  const std::string bare = strip_punctuation(lower);
  return std::any_of(exact.begin(), exact.end(),
                     [&](const std::string &e) { return bare == to_lower(e); });
}

BackendClient::BackendClient(std::shared_ptr<Transport> transport, RetryPolicy policy,
                             RefusalDetector refusals, std::size_t max_in_flight, Sleeper sleeper)
    : transport_(std::move(transport)), policy_(policy), refusals_(std::move(refusals)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(max_in_flight, 1))),
      sleeper_(std::move(sleeper)) {
  if (!transport_) {
    throw ParameterError("backend client needs a transport");
  }
  if (policy_.max_attempts == 0) {
    throw ParameterError("retry policy needs at least one attempt");
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

BackendResponse BackendClient::call(const BackendRequest &request) {
  request.validate();
  BackendResponse response;
  {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<> &s;
      ~Release() { s.release(); }
    } release{in_flight_};

    for (std::size_t attempt = 1;; ++attempt) {
      attempts_.fetch_add(1);
      try {
        response = transport_->send(request);
        break;
      } catch (const TransportError &e) {
        if (attempt >= policy_.max_attempts) {
          throw TransportError("giving up after " + std::to_string(attempt) +
                                   " attempts: " + e.what(),
                               e.status());
        }
        sleeper_(policy_.delay_before(attempt));
      }
    }
  }

  if (request.kind == RequestKind::propose) {
    if (!response.refusal && response.payload.is_string() &&
        refusals_.matches(response.payload.get<std::string>())) {
      response.refusal = true;
    }
    if (response.refusal) {
      response.payload = nullptr;
    }
  } else if (response.refusal) {
    throw ProtocolError(to_string(request.kind) + " backend refused; refusal is only valid for "
                        "concept proposals",
                        response_to_wire(response).dump());
  }
  return response;
}

std::vector<Bytes> generate_images(BackendClient &client, const std::string &caption,
                                   std::size_t n, nlohmann::json params) {
  if (n == 0) {
    throw ParameterError("image count must be positive");
  }
  if (trim(caption).empty()) {
    throw ParameterError("caption must be non-empty");
  }
  if (!params.contains("num_inference_steps")) {
    params["num_inference_steps"] = default_inference_steps;
  }
  params["num_images"] = n;
  const BackendRequest request{RequestKind::image, caption, std::nullopt, std::move(params)};
  const auto response = client.call(request);
  std::vector<Bytes> images = response.images();
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= images.size() || images[i].empty()) {
      failed.push_back(i);
    }
  }
  if (!failed.empty() || images.size() != n) {
    std::string list;
    for (std::size_t f : failed) {
      list += (list.empty() ? "" : ",") + std::to_string(f);
    }
    throw PartialResultError("image generation for '" + caption + "' returned " +
                                 std::to_string(images.size()) + "/" + std::to_string(n) +
                                 " images; failed slots [" + list + "]",
                             failed);
  }
  return images;
}

} // namespace neurolens
