#include "neurolens/mock_store.hpp"

#include <chrono>
#include <fstream>

namespace neurolens {

ResponseStore::ResponseStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ResponseStore::entry_path(const std::string &digest) const {
  return dir_ / (digest + ".json");
}

std::optional<BackendResponse> ResponseStore::lookup(const std::string &digest) const {
  const auto path = entry_path(digest);
  if (!std::filesystem::exists(path)) {
    return std::nullopt;
  }
  const std::string raw = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error &e) {
    throw ProtocolError("stored response " + path.string() + " is not JSON: " + e.what(), raw);
  }
  if (!doc.contains("response")) {
    throw ProtocolError("stored response " + path.string() + " lacks a response field", raw);
  }
  return response_from_wire(doc.at("response"), raw);
}

void ResponseStore::record(const BackendRequest &request, const BackendResponse &response,
                           bool journal) {
  const std::string digest = request_digest(request);
  const nlohmann::json entry{{"request", canonical_request(request)},
                             {"response", response_to_wire(response)}};
  write_file_atomic(entry_path(digest), entry.dump(1) + "\n");
  if (journal) {
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    const nlohmann::json line{{"digest", digest},
                              {"kind", to_string(request.kind)},
                              {"recorded_at_ms", now},
                              {"response", response_to_wire(response)}};
    std::lock_guard lock(journal_mutex_);
    std::ofstream out(dir_ / "journal.jsonl", std::ios::app);
    out << line.dump() << '\n';
  }
}

MissPolicy parse_miss_policy(const std::string &name) {
  if (name == "refuse") {
    return MissPolicy::refuse;
  }
  if (name == "error") {
    return MissPolicy::error;
  }
  throw ConfigError("unknown mock fallback '" + name + "' (expected refuse|error)");
}

MockTransport::MockTransport(std::shared_ptr<ResponseStore> store, MissPolicy on_miss)
    : store_(std::move(store)), on_miss_(on_miss) {}

BackendResponse MockTransport::send(const BackendRequest &request) {
  const std::string digest = request_digest(request);
  if (auto hit = store_->lookup(digest)) {
    return *hit;
  }
  if (on_miss_ == MissPolicy::refuse) {
    BackendResponse r;
    r.payload = nullptr;
    r.refusal = true;
    r.provenance = "mock:miss:" + digest;
    return r;
  }
  throw CacheMissError(digest, request.kind);
}

RecordingTransport::RecordingTransport(std::shared_ptr<Transport> inner,
                                       std::shared_ptr<ResponseStore> store, bool journal)
    : inner_(std::move(inner)), store_(std::move(store)), journal_(journal) {}

BackendResponse RecordingTransport::send(const BackendRequest &request) {
  BackendResponse response = inner_->send(request);
  store_->record(request, response, journal_);
  return response;
}

} // namespace neurolens
