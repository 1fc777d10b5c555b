#pragma once

// HTTP service for recovery jobs, recoloring, transfer and the bundled
// colormap library. Results live under the work directory in the same
// layout the CLI reads and writes.

#include "cmr/recovery.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace cmr {

enum class JobStatus { queued, running, done, failed };

const char* toString(JobStatus s);

struct JobRecord {
  std::string jobId;
  JobStatus status = JobStatus::queued;
  Index done = 0;
  Index total = 0;
  std::string error;
  std::filesystem::path resultDir;  // set once done
};

struct ServiceOptions {
  std::filesystem::path workdir = "cmr-work";
  std::filesystem::path colormapDir;  // empty: bundled library
  std::size_t workers = 1;
  std::size_t maxUploadBytes = 16u << 20;
  OptimizerConfig defaults;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool run();
  void stop();
  void waitUntilReady() const;

  std::optional<JobRecord> job(const std::string& id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cmr
