#pragma once

#include <filesystem>

#include <json.hpp>

#include "cmek/bench.hpp"
#include "cmek/synthgen.hpp"

namespace cmek {

/// Single-file configuration for every command. Missing keys take defaults.
struct GlobalConfig {
    BenchConfig bench;  ///< bench.pipeline holds seed, top-k, fold count, distance and train settings
    std::filesystem::path output_dir = "out";

    PipelineConfig& pipeline() { return bench.pipeline; }
    const PipelineConfig& pipeline() const { return bench.pipeline; }
    void validate() const;
};

GlobalConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const GlobalConfig& cfg);
GlobalConfig load_config(const std::filesystem::path& path);

/// Spec file for the synth command.
struct SynthSpec {
    std::uint64_t reference_seed = 1;
    std::vector<double> shifts;
    DomainSpec domain;
    std::string name_prefix = "synth";
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace cmek
