#include "cmek/config.hpp"

#include <fstream>

#include "cmek/error.hpp"

namespace cmek {

using nlohmann::json;

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace

void GlobalConfig::validate() const {
    const auto& p = pipeline();
    p.distance.validate();
    p.train.validate();
    if (p.top_k < 1) throw Error("top_k_features must be at least 1");
    if (p.fold_count < 2) throw Error("fold_count must be at least 2");
    if (!(bench.histogram_bin_width > 0.0)) throw Error("histogram_bin_width must be > 0");
}

GlobalConfig config_from_json(const json& j) {
    GlobalConfig cfg;
    auto& p = cfg.pipeline();
    try {
        read(j, "seed", p.seed);
        read(j, "top_k_features", p.top_k);
        read(j, "fold_count", p.fold_count);
        read(j, "threads", p.threads);
        if (j.contains("distance")) {
            const auto& d = j["distance"];
            read(d, "chi2_lambda", p.distance.chi2_lambda);
            read(d, "kld_lambda", p.distance.kld_lambda);
            read(d, "mmd_max_samples", p.distance.mmd_max_samples);
            if (d.contains("mmd_sigma") && !d["mmd_sigma"].is_null()) p.distance.mmd_sigma = d["mmd_sigma"].get<double>();
            if (d.contains("ground_metric")) {
                const auto& g = d["ground_metric"];
                if (g.is_string()) {
                    if (g.get<std::string>() != "binary") throw Error("unknown ground_metric " + g.get<std::string>());
                } else {
                    const auto rows = g.at("matrix").get<std::vector<std::vector<double>>>();
                    GroundMatrix m{rows.size(), {}};
                    for (const auto& r : rows) {
                        if (r.size() != rows.size()) throw Error("ground_metric matrix must be square");
                        m.cost.insert(m.cost.end(), r.begin(), r.end());
                    }
                    p.distance.ground_matrix = std::move(m);
                }
            }
        }
        if (j.contains("train")) {
            const auto& t = j["train"];
            read(t, "alpha", p.train.alpha);
            read(t, "max_iterations", p.train.max_iterations);
            read(t, "tolerance", p.train.tolerance);
            read(t, "min_count", p.train.min_count);
            read(t, "max_df_fraction", p.train.max_df_fraction);
        }
        if (j.contains("benchmark")) {
            const auto& b = j["benchmark"];
            read(b, "worst_k", cfg.bench.worst_k);
            read(b, "random_subsets", cfg.bench.random_subsets);
            read(b, "histogram_bin_width", cfg.bench.histogram_bin_width);
            read(b, "topn", cfg.bench.topn);
            if (b.contains("n_max") && !b["n_max"].is_null()) cfg.bench.n_max = b["n_max"].get<std::size_t>();
        }
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("invalid config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const GlobalConfig& cfg) {
    const auto& p = cfg.pipeline();
    json ground = "binary";
    if (p.distance.ground_matrix) {
        const auto& g = *p.distance.ground_matrix;
        json rows = json::array();
        for (std::size_t i = 0; i < g.dim; ++i) {
            rows.push_back(std::vector<double>(g.cost.begin() + static_cast<std::ptrdiff_t>(i * g.dim),
                                               g.cost.begin() + static_cast<std::ptrdiff_t>((i + 1) * g.dim)));
        }
        ground = {{"matrix", rows}};
    }
    return {{"seed", p.seed},
            {"top_k_features", p.top_k},
            {"fold_count", p.fold_count},
            {"distance",
             {{"chi2_lambda", p.distance.chi2_lambda},
              {"kld_lambda", p.distance.kld_lambda},
              {"mmd_sigma", p.distance.mmd_sigma ? json(*p.distance.mmd_sigma) : json(nullptr)},
              {"mmd_max_samples", p.distance.mmd_max_samples},
              {"ground_metric", ground}}},
            {"train",
             {{"alpha", p.train.alpha},
              {"max_iterations", p.train.max_iterations},
              {"tolerance", p.train.tolerance},
              {"min_count", p.train.min_count},
              {"max_df_fraction", p.train.max_df_fraction}}},
            {"benchmark",
             {{"worst_k", cfg.bench.worst_k},
              {"random_subsets", cfg.bench.random_subsets},
              {"histogram_bin_width", cfg.bench.histogram_bin_width},
              {"topn", cfg.bench.topn},
              {"n_max", cfg.bench.n_max ? json(*cfg.bench.n_max) : json(nullptr)}}},
            {"output_dir", cfg.output_dir.generic_string()}};
}

GlobalConfig load_config(const std::filesystem::path& path) { return config_from_json(parse_file(path)); }

SynthSpec synth_spec_from_json(const json& j) {
    SynthSpec s;
    try {
        read(j, "reference_seed", s.reference_seed);
        s.shifts = j.at("shifts").get<std::vector<double>>();
        read(j, "name_prefix", s.name_prefix);
        if (j.contains("template")) {
            const auto& t = j["template"];
            read(t, "seed", s.domain.seed);
            read(t, "n_docs", s.domain.n_docs);
            read(t, "doc_len_min", s.domain.doc_len_min);
            read(t, "doc_len_max", s.domain.doc_len_max);
            read(t, "vocab", s.domain.vocab);
            read(t, "n_sentiment_words", s.domain.n_sentiment_words);
            read(t, "noise", s.domain.noise);
            read(t, "sentiment_rate", s.domain.sentiment_rate);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("invalid synth spec: ") + e.what());
    }
    if (s.shifts.empty()) throw Error("invalid synth spec: shifts must be non-empty");
    for (double shift : s.shifts) {
        DomainSpec probe = s.domain;
        probe.shift = shift;
        probe.validate();
    }
    return s;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) { return synth_spec_from_json(parse_file(path)); }

}  // namespace cmek
