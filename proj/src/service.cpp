#include "cmr/service.hpp"

#include "cmr/apps.hpp"
#include "cmr/io.hpp"
#include "cmr/palette.hpp"
#include "cmr/store.hpp"
#include "cmr/synth.hpp"

#include <httplib.h>

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <random>
#include <thread>

namespace cmr {

namespace fs = std::filesystem;

const char* toString(JobStatus s) {
  switch (s) {
    case JobStatus::queued: return "queued";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "unknown";
}

namespace {

constexpr const char* kJson = "application/json";

void sendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(roundFloats(body).dump(), kJson);
}

void sendError(httplib::Response& res, int status, const std::string& message) {
  sendJson(res, status, {{"error", message}});
}

struct Task {
  std::string id;
  RgbImage image;
  OptimizerConfig config;
};

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  ColormapLibrary library;

  mutable std::mutex mutex;
  std::condition_variable wake;
  std::map<std::string, JobRecord> jobs;
  std::deque<Task> queue;
  bool stopping = false;
  std::vector<std::thread> workers;
  std::uint64_t counter = 0;
  std::mt19937_64 idRng{std::random_device{}()};

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) {
    fs::create_directories(options.workdir);
    library = loadColormapLibrary(options.colormapDir.empty() ? bundledColormapDir() : options.colormapDir);
    routes();
    const std::size_t n = std::max<std::size_t>(1, options.workers);
    for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { workLoop(); });
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    server.stop();
    {
      std::lock_guard lock(mutex);
      stopping = true;
    }
    wake.notify_all();
    for (auto& t : workers) {
      if (t.joinable()) t.join();
    }
    workers.clear();
  }

  std::optional<JobRecord> snapshot(const std::string& id) const {
    std::lock_guard lock(mutex);
    const auto it = jobs.find(id);
    if (it == jobs.end()) return std::nullopt;
    return it->second;
  }

  std::string enqueue(RgbImage image, OptimizerConfig config) {
    std::lock_guard lock(mutex);
    char buf[48];
    std::snprintf(buf, sizeof buf, "job-%06llu-%08llx", static_cast<unsigned long long>(++counter),
                  static_cast<unsigned long long>(idRng() & 0xffffffffull));
    const std::string id = buf;
    jobs[id] = JobRecord{id, JobStatus::queued, 0, config.iterations, {}, {}};
    queue.push_back({id, std::move(image), std::move(config)});
    wake.notify_one();
    return id;
  }

  void workLoop() {
    for (;;) {
      Task task;
      {
        std::unique_lock lock(mutex);
        wake.wait(lock, [this] { return stopping || !queue.empty(); });
        if (stopping) return;
        task = std::move(queue.front());
        queue.pop_front();
        jobs[task.id].status = JobStatus::running;
      }
      const fs::path dir = options.workdir / task.id;
      try {
        const RecoveryResult result = recover(task.image, task.config, [&](Index done, Index total) {
          std::lock_guard lock(mutex);
          JobRecord& rec = jobs[task.id];
          rec.done = std::max(rec.done, done);
          rec.total = total;
        });
        writePng(dir / "input.png", task.image);
        writeResult(dir, result);
        std::lock_guard lock(mutex);
        JobRecord& rec = jobs[task.id];
        rec.done = rec.total;
        rec.resultDir = dir;
        rec.status = JobStatus::done;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        JobRecord& rec = jobs[task.id];
        rec.error = e.what();
        rec.status = JobStatus::failed;
      }
    }
  }

  // Resolves a colormap from {"colormap": {...}} or {"library": name} or the job's result.
  std::optional<Colormap> colormapFromRequest(const json& body, httplib::Response& res) {
    if (body.contains("colormap")) {
      try {
        return colormapFromJson(body["colormap"]);
      } catch (const std::exception& e) {
        sendError(res, 400, e.what());
        return std::nullopt;
      }
    }
    if (body.contains("library")) {
      const auto* c = body["library"].is_string() ? library.find(body["library"].get<std::string>()) : nullptr;
      if (!c) {
        sendError(res, 400, "unknown library colormap");
        return std::nullopt;
      }
      return c->cmap;
    }
    if (body.contains("jobId")) {
      const auto rec = finishedJob(body["jobId"], res);
      if (!rec) return std::nullopt;
      return readColormap(rec->resultDir / kColormapFile);
    }
    sendError(res, 400, "request needs 'colormap', 'library' or 'jobId'");
    return std::nullopt;
  }

  std::optional<JobRecord> finishedJob(const json& id, httplib::Response& res) {
    if (!id.is_string()) {
      sendError(res, 400, "'jobId' must be a string");
      return std::nullopt;
    }
    const auto rec = snapshot(id.get<std::string>());
    if (!rec) {
      sendError(res, 404, "unknown job");
      return std::nullopt;
    }
    if (rec->status != JobStatus::done) {
      sendError(res, 409, std::string("job is ") + toString(rec->status));
      return std::nullopt;
    }
    return rec;
  }

  static std::optional<json> parseBody(const httplib::Request& req, httplib::Response& res) {
    try {
      json body = json::parse(req.body);
      if (!body.is_object()) throw IoError("expected a JSON object");
      return body;
    } catch (const std::exception& e) {
      sendError(res, 400, std::string("malformed JSON body: ") + e.what());
      return std::nullopt;
    }
  }

  void routes() {
    server.set_payload_max_length(options.maxUploadBytes + (1u << 16));
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        msg = e.what();
      } catch (...) {
      }
      sendError(res, 500, msg);
    });

    server.Post("/api/recover", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_file("image")) return sendError(res, 400, "multipart field 'image' is required");
      const auto file = req.get_file_value("image");
      if (file.content.size() > options.maxUploadBytes) return sendError(res, 413, "image exceeds 16 MB");
      OptimizerConfig config = options.defaults;
      if (req.has_file("config")) {
        try {
          config = configFromJson(json::parse(req.get_file_value("config").content), config);
        } catch (const std::exception& e) {
          return sendError(res, 400, e.what());
        }
      }
      RgbImage image;
      try {
        image = decodePng(file.content);
      } catch (const std::exception& e) {
        return sendError(res, 400, e.what());
      }
      sendJson(res, 202, {{"jobId", enqueue(std::move(image), config)}});
    });

    server.Get(R"(/api/jobs/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = snapshot(req.matches[1]);
      if (!rec) return sendError(res, 404, "unknown job");
      json body = {{"jobId", rec->jobId},
                   {"status", toString(rec->status)},
                   {"progress", {{"done", rec->done}, {"total", rec->total}}}};
      if (rec->status == JobStatus::failed) body["error"] = rec->error;
      if (rec->status == JobStatus::done) {
        const RecoveryResult result = readResult(rec->resultDir);
        const json cmap = colormapToJson(result.cmap);
        body["colormap"] = cmap;
        body["controlPoints"] = cmap["control_points"];
        body["histogram"] = fieldHistogram(result.field);
        body["converged"] = result.converged;
        body["direction"] = toString(result.direction);
        body["preview"] = "data:image/png;base64," + base64Encode(readFile(rec->resultDir / kReconstructionFile));
      }
      sendJson(res, 200, body);
    });

    server.Post("/api/recolor", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parseBody(req, res);
      if (!body) return;
      if (!body->contains("jobId")) return sendError(res, 400, "'jobId' is required");
      const auto rec = finishedJob((*body)["jobId"], res);
      if (!rec) return;
      if (!body->contains("colormap")) return sendError(res, 400, "'colormap' is required");
      std::optional<Colormap> cmap;
      try {
        cmap = colormapFromJson((*body)["colormap"]);
      } catch (const std::exception& e) {
        return sendError(res, 400, e.what());
      }
      const RecoveryResult stored = readResult(rec->resultDir);
      res.set_content(encodePng(adjust(stored, *cmap)), "image/png");
    });

    server.Post("/api/transfer", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parseBody(req, res);
      if (!body) return;
      if (!body->contains("field") || !(*body)["field"].is_string()) {
        return sendError(res, 400, "'field' (CSV text) is required");
      }
      ScalarField field;
      try {
        field = parseField((*body)["field"].get<std::string>());
      } catch (const std::exception& e) {
        return sendError(res, 400, e.what());
      }
      const auto cmap = colormapFromRequest(*body, res);
      if (!cmap) return;
      res.set_content(encodePng(transfer(*cmap, field)), "image/png");
    });

    server.Post("/api/palette", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parseBody(req, res);
      if (!body) return;
      if (!body->contains("jobId")) return sendError(res, 400, "'jobId' is required");
      const auto rec = finishedJob((*body)["jobId"], res);
      if (!rec) return;
      DbscanParams params;
      try {
        params.eps = body->value("eps", params.eps);
        params.minPts = body->value("minPts", params.minPts);
        params.validate();
      } catch (const std::exception& e) {
        return sendError(res, 400, e.what());
      }
      try {
        sendJson(res, 200, paletteToJson(extractPalette(readResult(rec->resultDir), params)));
      } catch (const PaletteError& e) {
        sendError(res, 422, e.what());
      }
    });

    // Colormap samples at t_k = k / (m - 1), for client-side rendering fixtures.
    server.Post("/api/sample", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = parseBody(req, res);
      if (!body) return;
      std::optional<Colormap> cmap;
      Index m = kDefaultSamples;
      try {
        cmap = colormapFromJson(body->at("colormap"));
        m = body->value("m", m);
        if (m < 2) throw IoError("'m' must be >= 2");
      } catch (const std::exception& e) {
        return sendError(res, 400, e.what());
      }
      const ColorTable samples = cmap->sampleRange(m);
      json rows = json::array();
      for (Index k = 0; k < m; ++k) {
        rows.push_back({Colormap::sampleParameter<double>(k, m), samples(k, 0), samples(k, 1), samples(k, 2)});
      }
      sendJson(res, 200, {{"m", m}, {"samples", rows}});
    });

    server.Get("/api/colormaps", [this](const httplib::Request&, httplib::Response& res) {
      json list = json::array();
      for (const auto& c : library.colormaps) {
        list.push_back({{"name", c.name}, {"colormap", colormapToJson(c.cmap)}, {"fitResidual", c.fitResidual}});
      }
      sendJson(res, 200, {{"colormaps", list}});
    });
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::waitUntilReady() const { impl_->server.wait_until_ready(); }

std::optional<JobRecord> Service::job(const std::string& id) const { return impl_->snapshot(id); }

}  // namespace cmr
