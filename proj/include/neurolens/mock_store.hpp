#pragma once

#include "neurolens/backend.hpp"

#include <filesystem>
#include <mutex>

namespace neurolens {

// Directory of <digest>.json files, each holding the canonical request and
// its response. Writes are atomic renames, so concurrent writers of the
// same key leave exactly one complete file (last write wins).
class ResponseStore {
public:
  explicit ResponseStore(std::filesystem::path dir);

  const std::filesystem::path &dir() const noexcept { return dir_; }
  std::filesystem::path entry_path(const std::string &digest) const;

  std::optional<BackendResponse> lookup(const std::string &digest) const;
  // `journal` additionally appends a timestamped line to journal.jsonl.
  void record(const BackendRequest &request, const BackendResponse &response, bool journal);

private:
  std::filesystem::path dir_;
  std::mutex journal_mutex_;
};

enum class MissPolicy { refuse, error };

MissPolicy parse_miss_policy(const std::string &name);

class MockTransport : public Transport {
public:
  MockTransport(std::shared_ptr<ResponseStore> store, MissPolicy on_miss);
  BackendResponse send(const BackendRequest &request) override;

private:
  std::shared_ptr<ResponseStore> store_;
  MissPolicy on_miss_;
};

// Forwards to `inner` and stores each successful response.
class RecordingTransport : public Transport {
public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::shared_ptr<ResponseStore> store,
                     bool journal);
  BackendResponse send(const BackendRequest &request) override;

private:
  std::shared_ptr<Transport> inner_;
  std::shared_ptr<ResponseStore> store_;
  bool journal_;
};

} // namespace neurolens
