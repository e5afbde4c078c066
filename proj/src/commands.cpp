#include "cmek/commands.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cmek/config.hpp"
#include "cmek/error.hpp"
#include "cmek/parallel.hpp"

namespace cmek {

namespace {

GlobalConfig resolve_config(const CommandOptions& opts) {
    GlobalConfig cfg = opts.config.empty() ? config_from_json(nlohmann::json::object()) : load_config(opts.config);
    if (opts.seed_override) cfg.pipeline().seed = *opts.seed_override;
    cfg.pipeline().threads = std::max<std::size_t>(opts.threads, 1);
    if (opts.out) cfg.output_dir = *opts.out;
    return cfg;
}

std::filesystem::path prepare_out(const GlobalConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw Error("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
    return cfg.output_dir;
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<ManifestEntry> require_manifest(const CommandOptions& opts) {
    if (opts.manifest.empty()) throw Error("--manifest is required");
    return load_manifest(opts.manifest);
}

}  // namespace

void cmd_distances(const CommandOptions& opts) {
    const auto cfg = resolve_config(opts);
    const auto entries = require_manifest(opts);
    if (entries.size() < 2) throw Error("distances: need >= 2 corpora in the manifest");

    std::vector<Corpus> corpora;
    for (const auto& e : entries) corpora.push_back(load_corpus(e.path, e.name, LabelPolicy::optional));
    const auto& pc = cfg.pipeline();
    const std::size_t n = corpora.size();

    std::vector<std::optional<double>> inner(n);
    parallel_for(n, pc.threads, [&](std::size_t i) {
        if (corpora[i].fully_labeled()) {
            inner[i] = inner_error(corpora[i], pc.train_for(corpora[i].name), pc.fold_count).error;
        }
    });

    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s != t) order.emplace_back(s, t);
        }
    }
    std::vector<DistanceVector> dist(order.size());
    parallel_for(order.size(), pc.threads, [&](std::size_t k) {
        const auto& s = corpora[order[k].first];
        const auto& t = corpora[order[k].second];
        dist[k] = distance_vector(s, t, pc.distance, pc.top_k, pc.pair_seed(s.name, t.name));
    });

    std::ostringstream csv;
    csv << "source,target,chi2,mmd,emd,kld,inner_error\n";
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto [s, t] = order[k];
        const auto& d = dist[k];
        csv << corpora[s].name << ',' << corpora[t].name << ',' << num(d.chi2) << ',' << num(d.mmd) << ','
            << num(d.emd) << ',' << num(d.kld) << ',' << (inner[s] ? num(*inner[s]) : std::string("NA")) << '\n';
    }
    write_file(prepare_out(cfg) / "distances.csv", csv.str());
}

void cmd_select(const CommandOptions& opts) {
    const auto cfg = resolve_config(opts);
    const auto entries = require_manifest(opts);

    std::vector<Corpus> candidates;
    std::optional<Corpus> target;
    for (const auto& e : entries) {
        if (e.role == CorpusRole::target) {
            if (target) throw Error("select: manifest must name exactly one target");
            // Labels on the target are dropped at load time.
            target = strip_labels(load_corpus(e.path, e.name, LabelPolicy::optional));
        } else {
            Corpus c = load_corpus(e.path, e.name, LabelPolicy::optional);
            if (!c.fully_labeled()) throw Error("select: candidate " + e.name + " has unlabeled documents");
            candidates.push_back(std::move(c));
        }
    }
    if (!target) throw Error("select: manifest has no target");
    if (candidates.size() < 3) throw Error("select: need >= 3 candidates, got " + std::to_string(candidates.size()));
    const std::size_t n = opts.n.value_or(candidates.size());
    if (n < 1 || n > candidates.size()) {
        throw Error("select: --n must lie in 1.." + std::to_string(candidates.size()));
    }

    const auto& pc = cfg.pipeline();
    const auto weights = fit_weights(build_loo_training_set(candidates, pc));
    const auto ranked = select(weights, candidates, *target, n, pc);

    const auto out = prepare_out(cfg);
    std::ostringstream csv;
    csv << "rank,candidate,predicted_error\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        csv << i + 1 << ',' << ranked[i].name << ',' << num(ranked[i].predicted_error) << '\n';
    }
    write_file(out / "selection.csv", csv.str());
    write_file(out / "weights.json", weights_to_json(weights).dump(2) + "\n");
}

void cmd_benchmark(const CommandOptions& opts) {
    const auto cfg = resolve_config(opts);
    const auto entries = require_manifest(opts);
    std::vector<Corpus> corpora;
    for (const auto& e : entries) corpora.push_back(load_corpus(e.path, e.name, LabelPolicy::required));
    if (corpora.size() < 4) throw Error("benchmark: need >= 4 labeled corpora, got " + std::to_string(corpora.size()));
    const auto report = outer_loo_benchmark(corpora, cfg.bench);
    emit_report(report, prepare_out(cfg));
}

void cmd_synth(const CommandOptions& opts) {
    if (opts.spec.empty()) throw Error("synth: a spec file is required");
    const auto spec = load_synth_spec(opts.spec);
    const auto cfg = resolve_config(opts);
    const auto family = generate_family(spec.reference_seed, spec.shifts, spec.domain, spec.name_prefix);

    const auto out = prepare_out(cfg);
    std::vector<ManifestEntry> manifest;
    for (const auto& c : family.corpora) {
        const std::string file = c.name + ".jsonl";
        save_corpus(c, out / file);
        manifest.push_back({c.name, file, CorpusRole::candidate});
    }
    write_file(out / (spec.name_prefix + "_family.json"), family.sidecar.dump(2) + "\n");
    save_manifest(manifest, out / "manifest.json");
}

}  // namespace cmek
