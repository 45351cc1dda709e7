#pragma once

#include "neurolens/backend.hpp"

#include <atomic>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <unistd.h>

namespace testing {

// Directory removed on scope exit.
class TempDir {
public:
  explicit TempDir(const std::string &tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("neurolens-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &p) const { return path_ / p; }

private:
  std::filesystem::path path_;
};

// Answers from a queue of handlers; records every request it sees.
class ScriptedTransport : public neurolens::Transport {
public:
  using Handler = std::function<neurolens::BackendResponse(const neurolens::BackendRequest &)>;

  void push(Handler h) {
    std::lock_guard lock(mutex_);
    script_.push_back(std::move(h));
  }
  void push_text(const std::string &text) {
    push([text](const neurolens::BackendRequest &) {
      return neurolens::BackendResponse{text, false, "scripted"};
    });
  }

  neurolens::BackendResponse send(const neurolens::BackendRequest &request) override {
    Handler h;
    {
      std::lock_guard lock(mutex_);
      requests.push_back(request);
      if (script_.empty()) {
        throw neurolens::ProtocolError("script exhausted", request.prompt);
      }
      h = std::move(script_.front());
      script_.pop_front();
    }
    return h(request);
  }

  std::vector<neurolens::BackendRequest> requests;

private:
  std::mutex mutex_;
  std::deque<Handler> script_;
};

inline std::shared_ptr<neurolens::BackendClient>
instant_client(std::shared_ptr<neurolens::Transport> t) {
  return std::make_shared<neurolens::BackendClient>(
      std::move(t), neurolens::RetryPolicy{}, neurolens::RefusalDetector{}, 4,
      [](std::chrono::milliseconds) {});
}

// Uniform doubles straight from the engine, so test streams are portable.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

private:
  std::mt19937_64 engine_;
};

} // namespace testing

namespace testing {

// Transport backed by a single function.
class FnTransport : public neurolens::Transport {
public:
  using Fn = std::function<neurolens::BackendResponse(const neurolens::BackendRequest &)>;
  explicit FnTransport(Fn fn) : fn_(std::move(fn)) {}
  neurolens::BackendResponse send(const neurolens::BackendRequest &r) override {
    ++calls;
    return fn_(r);
  }
  std::atomic<int> calls{0};

private:
  Fn fn_;
};

} // namespace testing
