#include "themis/run/replicates.hpp"

#include "themis/errors.hpp"
#include "themis/run/manifest.hpp"
#include "themis/util/misc.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace themis::run {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return canon_real(v);
}

} // namespace

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<synth::IterationRecord>& records) {
    CsvWriter csv(path);
    csv.row({"iteration", "reusability", "fitness", "coverage", "parsimony", "consistency",
             "composite", "jaccard_vs_prev", "stop_reason"});
    for (const auto& r : records) {
        csv.row({std::to_string(r.iteration), fmt(r.report.reusability), fmt(r.report.fitness),
                 fmt(r.report.coverage), fmt(r.report.parsimony), fmt(r.report.consistency),
                 fmt(r.report.composite), fmt(r.jaccard_vs_prev), r.stop_reason});
    }
    csv.flush_and_close();
}

std::vector<synth::IterationRecord> read_trajectory_csv(const std::filesystem::path& path) {
    std::vector<synth::IterationRecord> records;
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot read trajectory " + path.string());
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        // trajectory fields are plain numbers except the free-text tail
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 8) continue;
        synth::IterationRecord r;
        r.iteration = std::stoi(fields[0]);
        r.report.reusability = std::stod(fields[1]);
        r.report.fitness = std::stod(fields[2]);
        r.report.coverage = std::stod(fields[3]);
        r.report.parsimony = std::stod(fields[4]);
        r.report.consistency = std::stod(fields[5]);
        r.report.composite = std::stod(fields[6]);
        r.jaccard_vs_prev = std::stod(fields[7]);
        if (fields.size() > 8) r.stop_reason = fields[8];
        records.push_back(r);
    }
    return records;
}

void write_stats_csv(const std::filesystem::path& path, const std::vector<eval::StatRow>& rows) {
    CsvWriter csv(path);
    csv.row({"metric", "iter1", "best", "delta", "t", "p", "sig", "d", "effect"});
    for (const auto& r : rows) {
        std::string t = r.skipped ? "---" : fmt(r.t);
        std::string p = r.skipped ? "---" : fmt(r.p);
        std::string d = r.skipped ? "---" : fmt(r.cohens_d);
        std::string effect = r.skipped ? "---" : eval::effect_size_label(r.cohens_d);
        csv.row({r.metric, fmt(r.mean_a), fmt(r.mean_b), fmt(r.delta), t, p,
                 r.skipped ? "" : eval::sig_label(r.p), d, effect});
    }
    csv.flush_and_close();
}

std::vector<eval::StatRow> aggregate_stats(const std::vector<ReplicateOutcome>& outcomes,
                                           bool per_metric_max) {
    std::vector<eval::StatRow> rows;
    if (outcomes.empty()) return rows;
    const std::size_t n = outcomes.size();

    auto metric_value = [](const eval::MetricReport& rep, std::size_t m) {
        switch (m) {
            case 0: return rep.reusability;
            case 1: return rep.fitness;
            case 2: return rep.coverage;
            case 3: return rep.parsimony;
            case 4: return rep.consistency;
            default: return rep.composite;
        }
    };

    for (std::size_t m = 0; m <= 5; ++m) {
        std::string name = m < 5 ? eval::kMetricNames[m] : "overall";
        std::vector<double> iter1(n);
        std::vector<double> best(n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto& records = outcomes[r].records;
            iter1[r] = metric_value(records.front().report, m);
            if (per_metric_max && m < 5) {
                double mx = iter1[r];
                for (const auto& rec : records) mx = std::max(mx, metric_value(rec.report, m));
                best[r] = mx;
            } else {
                best[r] = metric_value(records[outcomes[r].best_index].report, m);
            }
        }
        if (n < 2) {
            eval::StatRow row;
            row.metric = name;
            row.mean_a = iter1[0];
            row.mean_b = best[0];
            row.delta = best[0] - iter1[0];
            row.n = 1;
            row.skipped = true; // too few replicates for a paired test
            rows.push_back(row);
        } else {
            rows.push_back(eval::paired_stats(iter1, best, name));
        }
    }
    return rows;
}

ReplicatesResult run_replicates(const std::filesystem::path& corpus_dir, const Config& config,
                                const std::vector<std::uint64_t>& seeds,
                                const std::filesystem::path& out_dir, int max_rounds) {
    std::filesystem::create_directories(out_dir);
    ReplicatesResult result;
    for (std::uint64_t seed : seeds) {
        auto trajectory_path = out_dir / ("trajectory_seed" + std::to_string(seed) + ".csv");
        ReplicateOutcome outcome;
        outcome.seed = seed;
        if (std::filesystem::exists(trajectory_path)) {
            // checkpoint hit: reuse the finished replicate
            outcome.records = read_trajectory_csv(trajectory_path);
            if (!outcome.records.empty()) {
                outcome.best_index = synth::best_iteration_index(outcome.records);
                result.outcomes.push_back(std::move(outcome));
                continue;
            }
        }
        PipelineContext ctx = make_context(config, seed);
        auto manifest = build_manifest(config, seed, corpus_dir, ctx.prompts.hashes(),
                                       ctx.gateway->backend_id(), ctx.embedder->model_id());
        auto run_dir = out_dir / ("seed" + std::to_string(seed));
        write_manifest(manifest, run_dir);
        stage_ingest(ctx, corpus_dir);
        stage_code(ctx);
        stage_synthesize(ctx);
        auto snapshot_dir = run_dir / "snapshots";
        outcome.records = synth::refine_loop(
            ctx, max_rounds, [&](int iteration, const PipelineContext& c) {
                char name[32];
                std::snprintf(name, sizeof(name), "hierarchy_iter_%03d.json", iteration);
                write_file(snapshot_dir / name, c.state.hierarchy.canonical_dump() + "\n");
            });
        outcome.best_index = synth::best_iteration_index(outcome.records);
        ctx.state.ledger.seal();
        write_run_dir(ctx, run_dir);
        write_trajectory_csv(trajectory_path, outcome.records);
        ojson summary;
        summary["finished"] = now_rfc3339();
        summary["iterations"] = outcome.records.size();
        summary["best_iteration"] = outcome.records[outcome.best_index].iteration;
        summary["best_composite"] = outcome.records[outcome.best_index].report.composite;
        write_summary(run_dir, summary);
        result.outcomes.push_back(std::move(outcome));
    }
    result.stats = aggregate_stats(result.outcomes, false);
    result.stats_permetric = aggregate_stats(result.outcomes, true);
    write_stats_csv(out_dir / "stats.csv", result.stats);
    write_stats_csv(out_dir / "stats_permetric_max.csv", result.stats_permetric);
    return result;
}

} // namespace themis::run
