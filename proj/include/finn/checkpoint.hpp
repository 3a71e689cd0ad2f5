#pragma once

#include <cstdint>
#include <string>

#include "finn/model.hpp"

namespace finn {

/// Text form of a model configuration: one `key = value` line per field,
/// fixed key order, floating-point values printed round-trip exactly.
std::string serialize_model_config(const ModelConfig& cfg);
ModelConfig parse_model_config(const std::string& text);

/// Binary model container: magic and version header, the config block, the
/// fingerprint of the vocabulary the model was trained against, and every
/// persistent tensor by name with explicit shapes. The numeric payload is
/// little-endian IEEE-754 double regardless of platform. Writing the same
/// state twice produces byte-identical files; no optimizer state is kept.
void save_checkpoint(const std::string& path, const Model& g,
                     std::uint64_t vocab_fingerprint);

struct LoadedCheckpoint {
    Model model;
    std::uint64_t vocab_fingerprint;
};

/// Rebuilds the model from the stored config and tensor payload. A wrong
/// magic, unsupported version, truncated payload, or any name/shape
/// disagreement with the reconstructed model raises VerificationError.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace finn
