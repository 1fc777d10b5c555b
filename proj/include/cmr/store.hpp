#pragma once

// On-disk recovery results, shared by the CLI and the service:
//   <dir>/colormap.json  <dir>/field.csv  <dir>/reconstruction.png  <dir>/result.json

#include "cmr/io.hpp"
#include "cmr/recovery.hpp"

#include <filesystem>
#include <string>

namespace cmr {

inline constexpr const char* kColormapFile = "colormap.json";
inline constexpr const char* kFieldFile = "field.csv";
inline constexpr const char* kReconstructionFile = "reconstruction.png";
inline constexpr const char* kResultFile = "result.json";

void writeResult(const std::filesystem::path& dir, const RecoveryResult& result);

/// Loads colormap.json and field.csv; result.json is optional.
RecoveryResult readResult(const std::filesystem::path& dir);

/// One JSON object per line: iteration, phase (1 anchored, 2 free) and the loss terms.
std::string formatTrace(const RecoveryResult& result, const OptimizerConfig& config);

json resultSummary(const RecoveryResult& result);

/// Overrides fields of base from a JSON object with any of: iterations,
/// learningRate, finalLearningRateFraction, seed, anchorPhaseFraction,
/// controlPoints, samples, init ("luminance" | "random"), earlyStop and
/// weights {alpha, gamma, delta, eta}. Unknown keys are rejected.
OptimizerConfig configFromJson(const json& j, OptimizerConfig base = {});

}  // namespace cmr
