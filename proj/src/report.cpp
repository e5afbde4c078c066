#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmek/bench.hpp"
#include "cmek/error.hpp"

namespace cmek {

namespace {

using nlohmann::json;

/// Shortest round-trip decimal form; '.' separator regardless of locale.
std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string num_or_na(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const MethodSummary& m) {
    return {{"prob_best", m.prob_best},
            {"prob_worstk", optional_json(m.prob_worstk)},
            {"avg_abs_error", m.avg_abs_error},
            {"avg_relative_error", m.avg_relative_error}};
}

json topn_json(const std::vector<TopnPoint>& pts) {
    json out = json::array();
    for (const auto& p : pts) {
        out.push_back({{"n", p.n},
                       {"cmek_error", p.cmek_error},
                       {"random_error", p.random_error},
                       {"all_domains_error", p.all_domains_error}});
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

std::size_t bin_of(double value, double width) {
    return static_cast<std::size_t>(std::floor(value / width + 1e-9));
}

}  // namespace

json report_to_json(const SelectionReport& report) {
    json j;
    j["settings"] = {{"seed", report.seed},
                     {"worst_k", report.worst_k},
                     {"random_subsets", report.random_subsets},
                     {"histogram_bin_width", report.histogram_bin_width},
                     {"predictor", report.predictor}};
    j["cmek"] = summary_json(report.cmek);
    j["random"] = summary_json(report.random);
    j["optimal"] = summary_json(report.optimal);
    j["topn_curve"] = topn_json(report.topn_curve);

    json tests = json::array();
    for (const auto& c : report.ttests) {
        json t{{"comparison", c.name}};
        if (c.result) {
            t["t"] = std::isfinite(c.result->t) ? json(c.result->t) : json(nullptr);
            t["p"] = c.result->p;
            t["normality_jb"] = c.result->normality;
            t["df"] = c.result->df;
        } else {
            t["t"] = nullptr;
            t["p"] = nullptr;
            t["normality_jb"] = nullptr;
            t["note"] = c.note;
        }
        tests.push_back(std::move(t));
    }
    j["ttests"] = std::move(tests);

    json runs = json::array();
    for (const auto& r : report.runs) {
        json run{{"target", r.target_name},
                 {"true_error", r.per_candidate_true_error},
                 {"predicted_error", r.per_candidate_predicted},
                 {"selected", r.selected},
                 {"selected_error", r.selected_error},
                 {"best_error", r.best_error},
                 {"relative_error", r.relative_error},
                 {"all_domains_error", r.all_domains_error},
                 {"topn", topn_json(r.topn)},
                 {"flags", r.flags}};
        run["weights"] = r.weights ? weights_to_json(*r.weights) : json(nullptr);
        runs.push_back(std::move(run));
    }
    j["runs"] = std::move(runs);
    return j;
}

void emit_report(const SelectionReport& report, const std::filesystem::path& out_dir) {
    if (report.runs.empty()) throw Error("no runs");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());

    write_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");

    {
        std::ostringstream t;
        t << "selection,prob_best,prob_worst" << report.worst_k << ",avg_abs_error\n";
        for (const auto& [name, m] : {std::pair{"cmek", &report.cmek}, std::pair{"random", &report.random},
                                      std::pair{"optimal", &report.optimal}}) {
            t << name << ',' << num(m->prob_best) << ',' << num_or_na(m->prob_worstk) << ','
              << num(m->avg_abs_error) << '\n';
        }
        write_file(out_dir / "table1.csv", t.str());
    }

    {
        // Raw relative errors (random: every candidate, each equally likely),
        // then the share of selections per bin.
        const double width = report.histogram_bin_width;
        std::ostringstream f;
        f << "record,method,target,candidate,bin_lower,bin_upper,value\n";
        std::vector<double> cmek_bins, random_bins;
        auto add = [&](std::vector<double>& bins, double rel, double weight) {
            const std::size_t b = bin_of(rel, width);
            if (bins.size() <= b) bins.resize(b + 1, 0.0);
            bins[b] += weight;
        };
        const double runs = static_cast<double>(report.runs.size());
        for (const auto& r : report.runs) {
            f << "raw,cmek," << r.target_name << ',' << r.selected.front() << ",,," << num(r.relative_error) << '\n';
            add(cmek_bins, r.relative_error, 1.0 / runs);
        }
        for (const auto& r : report.runs) {
            const double share = 1.0 / static_cast<double>(r.per_candidate_true_error.size());
            for (const auto& [name, e] : r.per_candidate_true_error) {
                f << "raw,random," << r.target_name << ',' << name << ",,," << num(e - r.best_error) << '\n';
                add(random_bins, e - r.best_error, share / runs);
            }
        }
        const std::size_t nb = std::max(cmek_bins.size(), random_bins.size());
        cmek_bins.resize(nb, 0.0);
        random_bins.resize(nb, 0.0);
        for (const auto& [name, bins] : {std::pair{"cmek", &cmek_bins}, std::pair{"random", &random_bins}}) {
            for (std::size_t b = 0; b < nb; ++b) {
                f << "bin," << name << ",,," << num(static_cast<double>(b) * width) << ','
                  << num(static_cast<double>(b + 1) * width) << ',' << num((*bins)[b]) << '\n';
            }
        }
        write_file(out_dir / "fig3.csv", f.str());
    }

    {
        std::ostringstream f;
        f << "n,cmek_error,random_error,all_domains_error\n";
        for (const auto& p : report.topn_curve) {
            f << p.n << ',' << num(p.cmek_error) << ',' << num(p.random_error) << ',' << num(p.all_domains_error)
              << '\n';
        }
        write_file(out_dir / "fig4.csv", f.str());
    }
}

}  // namespace cmek
