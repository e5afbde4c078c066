#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

namespace cmek {

struct CommandOptions {
    std::filesystem::path manifest;
    std::filesystem::path config;  ///< empty: built-in defaults
    std::filesystem::path spec;    ///< synth only
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> n;
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed_override;
};

/// distances.csv: "source,target,chi2,mmd,emd,kld,inner_error" over all ordered pairs.
void cmd_distances(const CommandOptions& opts);

/// selection.csv ("rank,candidate,predicted_error") and weights.json for the
/// single target in the manifest; the target's labels are never loaded.
void cmd_select(const CommandOptions& opts);

/// Outer leave-one-out benchmark over every corpus in the manifest.
void cmd_benchmark(const CommandOptions& opts);

/// Synthetic family: one JSONL per domain, family.json sidecar, manifest.json.
void cmd_synth(const CommandOptions& opts);

}  // namespace cmek
