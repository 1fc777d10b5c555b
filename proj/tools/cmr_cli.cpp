#include "cmr/apps.hpp"
#include "cmr/io.hpp"
#include "cmr/metrics.hpp"
#include "cmr/palette.hpp"
#include "cmr/service.hpp"
#include "cmr/store.hpp"
#include "cmr/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotConverged = 2;

cmr::Service* gService = nullptr;

void onSignal(int) {
  if (gService) gService->stop();
}

struct RecoverArgs {
  std::string input, outCmap, outField, outDir, trace, config, init;
  std::optional<cmr::Index> iters;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
};

int runRecover(const RecoverArgs& a) {
  cmr::OptimizerConfig config;
  if (!a.config.empty()) config = cmr::configFromJson(cmr::json::parse(cmr::readFile(a.config)), config);
  if (a.iters) config.iterations = *a.iters;
  if (a.lr) config.learningRate = *a.lr;
  if (a.seed) config.seed = *a.seed;
  if (!a.init.empty()) config.init = a.init == "random" ? cmr::InitMode::random : cmr::InitMode::luminance;
  config.validate();

  const cmr::RgbImage image = cmr::readPng(a.input);
  const cmr::RecoveryResult result = cmr::recover(image, config);

  if (!a.outCmap.empty()) cmr::writeColormap(a.outCmap, result.cmap);
  if (!a.outField.empty()) cmr::writeField(a.outField, result.field);
  if (!a.outDir.empty()) cmr::writeResult(a.outDir, result);
  if (!a.trace.empty()) cmr::writeFile(a.trace, cmr::formatTrace(result, config));

  const auto& last = result.trace.empty() ? cmr::LossReport{} : result.trace.back();
  std::fprintf(stderr, "iterations=%zu reconstruction=%.6g converged=%s direction=%s\n", result.trace.size(),
               last.reconstruction, result.converged ? "yes" : "no", cmr::toString(result.direction));
  return result.converged ? kOk : kNotConverged;
}

int runBench(const fs::path& manifestPath, const fs::path& outDir, const std::string& configPath) {
  cmr::OptimizerConfig config;
  if (!configPath.empty()) config = cmr::configFromJson(cmr::json::parse(cmr::readFile(configPath)), config);
  const cmr::Manifest manifest = cmr::manifestFromJson(cmr::json::parse(cmr::readFile(manifestPath)));
  const fs::path base = manifestPath.parent_path();
  for (const auto& e : manifest.entries) {
    const auto start = std::chrono::steady_clock::now();
    const cmr::RecoveryResult result = cmr::recover(cmr::readPng(base / e.image), config);
    cmr::writeResult(outDir / e.id, result);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "%-40s reconstruction=%.6g iterations=%zu %.2fs\n", e.id.c_str(),
                 result.trace.back().reconstruction, result.trace.size(), secs);
  }
  return kOk;
}

int runEval(const fs::path& manifestPath, const fs::path& resultsDir, const fs::path& out) {
  const cmr::Manifest manifest = cmr::manifestFromJson(cmr::json::parse(cmr::readFile(manifestPath)));
  const fs::path base = manifestPath.parent_path();
  std::vector<std::pair<std::string, cmr::Colormap>> truth;
  std::map<std::string, cmr::Colormap> results;
  for (const auto& e : manifest.entries) {
    truth.emplace_back(e.id, cmr::readColormap(base / e.cmap));
    const fs::path found = resultsDir / e.id / cmr::kColormapFile;
    if (fs::exists(found)) results.emplace(e.id, cmr::readColormap(found));
  }
  const cmr::CorpusEvaluation eval = cmr::evaluateCorpus(truth, results);
  cmr::writeFile(out, cmr::formatEvaluationCsv(eval));
  for (const auto& id : eval.missing) std::fprintf(stderr, "missing result: %s\n", id.c_str());
  return eval.missing.empty() ? kOk : kInputError;
}

int runServe(int port, const std::string& host, const fs::path& workdir, std::size_t workers) {
  cmr::ServiceOptions options;
  options.workdir = workdir;
  options.workers = workers;
  cmr::Service service(options);
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
    return kInputError;
  }
  gService = &service;
  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  std::fprintf(stderr, "listening on http://%s:%d (workdir %s)\n", host.c_str(), bound, workdir.c_str());
  service.run();
  gService = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colormap and scalar field recovery from a single visualization image"};
  app.require_subcommand(1);

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Recover a colormap and field from a PNG");
  recover->add_option("--input", rec.input, "Input PNG")->required()->check(CLI::ExistingFile);
  recover->add_option("--out-cmap", rec.outCmap, "Output colormap JSON");
  recover->add_option("--out-field", rec.outField, "Output field CSV");
  recover->add_option("--out-dir", rec.outDir, "Also write a result directory (colormap, field, reconstruction)");
  recover->add_option("--iters", rec.iters, "Iterations")->check(CLI::NonNegativeNumber);
  recover->add_option("--lr", rec.lr, "Initial learning rate")->check(CLI::PositiveNumber);
  recover->add_option("--seed", rec.seed, "Seed for random initialization");
  recover->add_option("--init", rec.init, "Initialization")->check(CLI::IsMember({"luminance", "random"}));
  recover->add_option("--config", rec.config, "Optimizer config JSON")->check(CLI::ExistingFile);
  recover->add_option("--trace", rec.trace, "Per-iteration loss trace (JSON lines)");

  std::string resultDir, cmapPath, fieldPath, outPath, specsPath, manifestPath, configPath;
  auto* recolor = app.add_subcommand("recolor", "Re-render a recovered field under another colormap");
  recolor->add_option("--result", resultDir, "Result directory")->required()->check(CLI::ExistingDirectory);
  recolor->add_option("--cmap", cmapPath, "Colormap JSON")->required()->check(CLI::ExistingFile);
  recolor->add_option("--out", outPath, "Output PNG")->required();

  auto* transfer = app.add_subcommand("transfer", "Render a field CSV under a colormap");
  transfer->add_option("--cmap", cmapPath, "Colormap JSON")->required()->check(CLI::ExistingFile);
  transfer->add_option("--field", fieldPath, "Field CSV")->required()->check(CLI::ExistingFile);
  transfer->add_option("--out", outPath, "Output PNG")->required();

  std::string cmapsDir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--cmaps", cmapsDir, "Colormap directory (.json or .csv)")->required()->check(CLI::ExistingDirectory);
  synth->add_option("--specs", specsPath, "Field spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", outPath, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Run recovery on every manifest entry");
  bench->add_option("--manifest", manifestPath, "Corpus manifest")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", outPath, "Results directory")->required();
  bench->add_option("--config", configPath, "Optimizer config JSON")->check(CLI::ExistingFile);

  std::string resultsDir;
  auto* eval = app.add_subcommand("eval", "Score recovered colormaps against a corpus");
  eval->add_option("--manifest", manifestPath, "Corpus manifest")->required()->check(CLI::ExistingFile);
  eval->add_option("--results", resultsDir, "Results directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", outPath, "Output CSV")->required();

  cmr::DbscanParams dbscan;
  auto* palette = app.add_subcommand("palette", "Extract a discrete palette from a result");
  palette->add_option("--result", resultDir, "Result directory")->required()->check(CLI::ExistingDirectory);
  palette->add_option("--eps", dbscan.eps, "Neighbourhood radius")->check(CLI::PositiveNumber);
  palette->add_option("--min-pts", dbscan.minPts, "Core point threshold (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  palette->add_option("--out", outPath, "Output JSON")->required();

  cmr::Index samples = cmr::kDefaultSamples;
  auto* sample = app.add_subcommand("sample", "Sample a colormap at t_k = k/(m-1) as CSV");
  sample->add_option("--cmap", cmapPath, "Colormap JSON")->required()->check(CLI::ExistingFile);
  sample->add_option("-m,--samples", samples, "Sample count")->check(CLI::Range(2, 1 << 20));
  sample->add_option("--out", outPath, "Output CSV (default stdout)");

  int port = 8080;
  std::string host = "127.0.0.1", workdir = "cmr-work";
  std::size_t workers = 1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port (0: any free port)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--workdir", workdir, "Job working directory");
  serve->add_option("--workers", workers, "Recovery worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*recover) return runRecover(rec);
    if (*recolor) {
      cmr::writePng(outPath, cmr::adjust(cmr::readResult(resultDir), cmr::readColormap(cmapPath)));
    } else if (*transfer) {
      cmr::writePng(outPath, cmr::transfer(cmr::readColormap(cmapPath), cmr::readField(fieldPath)));
    } else if (*synth) {
      const cmr::ColormapLibrary lib = cmr::loadColormapLibrary(cmapsDir);
      for (const auto& w : lib.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      const auto specs = cmr::fieldSpecsFromJson(cmr::json::parse(cmr::readFile(specsPath)));
      const cmr::Manifest m = cmr::makeCorpus(lib.colormaps, specs, outPath);
      std::fprintf(stderr, "wrote %zu entries to %s\n", m.entries.size(), outPath.c_str());
    } else if (*bench) {
      return runBench(manifestPath, outPath, configPath);
    } else if (*eval) {
      return runEval(manifestPath, resultsDir, outPath);
    } else if (*palette) {
      dbscan.validate();
      const cmr::Palette p = cmr::extractPalette(cmr::readResult(resultDir), dbscan);
      cmr::writeFile(outPath, cmr::paletteToJson(p).dump(2) + "\n");
    } else if (*sample) {
      const cmr::ColorTable t = cmr::readColormap(cmapPath).sampleRange(samples);
      std::string csv;
      char line[128];
      for (cmr::Index k = 0; k < t.rows(); ++k) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", t(k, 0), t(k, 1), t(k, 2));
        csv += line;
      }
      if (outPath.empty()) {
        std::cout << csv;
      } else {
        cmr::writeFile(outPath, csv);
      }
    } else if (*serve) {
      return runServe(port, host, workdir, workers);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kOk;
}
