#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cmek/commands.hpp"
#include "cmek/error.hpp"

namespace {

int fail(std::string msg) {
    for (auto& ch : msg) {
        if (ch == '\n') ch = ' ';
    }
    std::cerr << "cmek-error: " << msg << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source-domain selection for text classifiers"};
    app.require_subcommand(1);

    cmek::CommandOptions opts;
    std::string out;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "JSON config file");
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--seed-override", seed, "Replace the config seed");
    };

    auto* distances = app.add_subcommand("distances", "Pairwise distance table for every ordered pair");
    distances->add_option("--manifest", opts.manifest, "Corpus manifest")->required();
    add_common(distances);

    auto* select = app.add_subcommand("select", "Rank candidate sources for the manifest's target");
    select->add_option("--manifest", opts.manifest, "Corpus manifest")->required();
    select->add_option("--n", n, "Number of sources to return")->check(CLI::PositiveNumber);
    add_common(select);

    auto* benchmark = app.add_subcommand("benchmark", "Outer leave-one-out evaluation");
    benchmark->add_option("--manifest", opts.manifest, "Corpus manifest")->required();
    add_common(benchmark);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus family");
    synth->add_option("spec", opts.spec, "Synth spec JSON")->required();
    add_common(synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(e.what());
    }

    if (!out.empty()) opts.out = out;
    if (select->count("--n")) opts.n = n;
    for (auto* cmd : app.get_subcommands()) {
        if (cmd->count("--seed-override")) opts.seed_override = seed;
    }

    try {
        if (*distances) cmek::cmd_distances(opts);
        if (*select) cmek::cmd_select(opts);
        if (*benchmark) cmek::cmd_benchmark(opts);
        if (*synth) cmek::cmd_synth(opts);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 0;
}
