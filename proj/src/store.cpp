#include "cmr/store.hpp"

#include <cmath>

namespace cmr {

namespace fs = std::filesystem;

json resultSummary(const RecoveryResult& result) {
  json j = {{"converged", result.converged},
            {"direction", toString(result.direction)},
            {"iterations", result.trace.size()}};
  if (!result.trace.empty()) j["final"] = lossReportToJson(result.trace.back());
  return j;
}

void writeResult(const fs::path& dir, const RecoveryResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create result directory " + dir.string());
  writeColormap(dir / kColormapFile, result.cmap);
  writeField(dir / kFieldFile, result.field);
  writePng(dir / kReconstructionFile, render(result.field, result.cmap));
  writeFile(dir / kResultFile, resultSummary(result).dump(2) + "\n");
}

RecoveryResult readResult(const fs::path& dir) {
  RecoveryResult result{readColormap(dir / kColormapFile), readField(dir / kFieldFile), {}, false,
                        Direction::canonical};
  const fs::path summary = dir / kResultFile;
  if (fs::exists(summary)) {
    try {
      const json j = json::parse(readFile(summary));
      result.converged = j.value("converged", false);
      result.direction = j.value("direction", std::string("canonical")) == "flipped" ? Direction::flipped
                                                                                     : Direction::canonical;
    } catch (const json::exception& e) {
      throw IoError(summary.string() + ": " + e.what());
    }
  }
  return result;
}

std::string formatTrace(const RecoveryResult& result, const OptimizerConfig& config) {
  const auto anchored = std::lround(config.anchorPhaseFraction * double(config.iterations));
  std::string out;
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    json line = lossReportToJson(result.trace[k]);
    line["iteration"] = k;
    line["phase"] = static_cast<long>(k) < anchored ? 1 : 2;
    out += line.dump() + "\n";
  }
  return out;
}

OptimizerConfig configFromJson(const json& j, OptimizerConfig c) {
  if (!j.is_object()) throw IoError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "iterations") {
        c.iterations = value.get<Index>();
      } else if (key == "learningRate") {
        c.learningRate = value.get<double>();
      } else if (key == "finalLearningRateFraction") {
        c.finalLearningRateFraction = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "anchorPhaseFraction") {
        c.anchorPhaseFraction = value.get<double>();
      } else if (key == "controlPoints") {
        c.controlPoints = value.get<Index>();
      } else if (key == "samples") {
        c.samples = value.get<Index>();
      } else if (key == "earlyStop") {
        c.earlyStop = value.get<bool>();
      } else if (key == "init") {
        const auto mode = value.get<std::string>();
        if (mode != "luminance" && mode != "random") throw IoError("config: init must be 'luminance' or 'random'");
        c.init = mode == "random" ? InitMode::random : InitMode::luminance;
      } else if (key == "weights") {
        c.weights.alpha = value.value("alpha", c.weights.alpha);
        c.weights.gamma = value.value("gamma", c.weights.gamma);
        c.weights.delta = value.value("delta", c.weights.delta);
        c.weights.eta = value.value("eta", c.weights.eta);
      } else {
        throw IoError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  return c;
}

}  // namespace cmr
