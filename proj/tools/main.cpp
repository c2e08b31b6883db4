// Batch CLI for the traceable thematic-analysis pipeline.

#include "themis/errors.hpp"
#include "themis/eval/align.hpp"
#include "themis/run/manifest.hpp"
#include "themis/run/replicates.hpp"
#include "themis/util/misc.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace themis;

struct CommonArgs {
    std::string corpus_dir;
    std::string config_path;
    std::string out_dir;
    std::string backend;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_rounds;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_corpus) {
    auto* corpus = cmd->add_option("--corpus", args.corpus_dir, "transcript directory (*.txt)");
    if (needs_corpus) corpus->required();
    cmd->add_option("--config", args.config_path, "config JSON file");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--backend", args.backend, "chat backend")
        ->check(CLI::IsMember({"http", "mock"}));
    cmd->add_option("--seed", args.seed, "run seed (overrides config)");
    cmd->add_option("--max-rounds", args.max_rounds, "refinement round cap");
}

run::Config load_config(const CommonArgs& args) {
    run::Config config;
    if (!args.config_path.empty()) config = run::Config::load(args.config_path);
    if (!args.backend.empty()) config.backend = args.backend;
    if (args.seed) config.seed = *args.seed;
    if (args.max_rounds) config.max_rounds = *args.max_rounds;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    return config;
}

enum Stage { kCode, kSynthesize, kEvaluate, kRefine };

int run_pipeline(const CommonArgs& args, Stage stage) {
    run::Config config = load_config(args);
    run::PipelineContext ctx = run::make_context(config);
    auto manifest = run::build_manifest(config, ctx.replicate_seed, args.corpus_dir,
                                        ctx.prompts.hashes(), ctx.gateway->backend_id(),
                                        ctx.embedder->model_id());
    std::filesystem::path out_dir = config.out_dir;
    run::write_manifest(manifest, out_dir);

    run::stage_ingest(ctx, args.corpus_dir);
    run::stage_code(ctx);
    std::vector<synth::IterationRecord> records;
    if (stage >= kSynthesize) {
        run::stage_synthesize(ctx);
    }
    if (stage == kEvaluate) {
        synth::IterationRecord rec;
        rec.iteration = 1;
        rec.report = run::stage_evaluate(ctx, 1);
        records.push_back(rec);
    } else if (stage == kRefine) {
        auto snapshot_dir = out_dir / "snapshots";
        records = synth::refine_loop(ctx, config.max_rounds,
                                     [&](int iteration, const run::PipelineContext& c) {
                                         char name[40];
                                         std::snprintf(name, sizeof(name),
                                                       "hierarchy_iter_%03d.json", iteration);
                                         write_file(snapshot_dir / name,
                                                    c.state.hierarchy.canonical_dump() + "\n");
                                     });
    }
    ctx.state.ledger.seal();
    run::write_run_dir(ctx, out_dir);
    if (!records.empty()) {
        run::write_trajectory_csv(out_dir / "trajectory.csv", records);
        std::size_t best = synth::best_iteration_index(records);
        run::write_trajectory_csv(out_dir / "metrics.csv", {records[best]});
        ojson summary;
        summary["finished"] = now_rfc3339();
        summary["iterations"] = records.size();
        summary["best_iteration"] = records[best].iteration;
        summary["best_composite"] = records[best].report.composite;
        run::write_summary(out_dir, summary);
        std::cout << "iterations: " << records.size()
                  << "  best: iter " << records[best].iteration << " (composite "
                  << canon_real(records[best].report.composite) << ")\n";
    }
    std::cout << "run artifacts in " << out_dir.string() << " (ledger entries: "
              << ctx.state.ledger.size() << ", warnings: " << ctx.warnings.size() << ")\n";
    return 0;
}

int cmd_replicates(const CommonArgs& args, std::uint64_t seed_from, std::uint64_t seed_to) {
    run::Config config = load_config(args);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = seed_from; s <= seed_to; ++s) seeds.push_back(s);
    auto result = run::run_replicates(args.corpus_dir, config, seeds, config.out_dir,
                                      config.max_rounds);
    std::cout << "replicates: " << result.outcomes.size() << "\n";
    for (const auto& o : result.outcomes) {
        std::cout << "  seed " << o.seed << ": " << o.records.size() << " iterations, best iter "
                  << o.records[o.best_index].iteration << " composite "
                  << canon_real(o.records[o.best_index].report.composite) << "\n";
    }
    std::cout << "stats table: " << (std::filesystem::path(config.out_dir) / "stats.csv").string()
              << "\n";
    return 0;
}

int cmd_trace(const std::string& run_dir, const std::string& artifact) {
    auto id = ArtifactId::parse(artifact);
    if (!id) {
        std::cerr << "unparseable artifact id: " << artifact << "\n";
        return 1;
    }
    Ledger ledger = Ledger::from_jsonl(read_file(std::filesystem::path(run_dir) / "ledger.jsonl"));
    ReplayResult state = replay(ledger.entries());
    auto chain = trace(state.hierarchy, &state.corpus, ledger, *id);
    std::cout << render_trace(chain);
    return 0;
}

int cmd_replay(const std::string& run_dir) {
    std::filesystem::path dir(run_dir);
    Ledger ledger = Ledger::from_jsonl(read_file(dir / "ledger.jsonl"));
    ReplayResult state;
    try {
        state = replay(ledger.entries());
    } catch (const Error& err) {
        if (err.code() != Errc::corrupt_ledger) throw;
        std::cout << "FAIL: " << err.what() << "\n";
        return 1;
    }
    std::string persisted = read_file(dir / "hierarchy.json");
    std::string rebuilt = state.hierarchy.canonical_dump() + "\n";
    if (persisted == rebuilt) {
        std::cout << "PASS: replayed hierarchy matches the persisted state ("
                  << ledger.size() << " entries)\n";
        return 0;
    }
    std::cout << "FAIL: replayed hierarchy differs from the persisted state\n";
    return 1;
}

int cmd_align(const CommonArgs& args, const std::string& run_dir, const std::string& human_path) {
    run::Config config = load_config(args);
    auto ctx_embedder = embed::Embedder(embed::make_mock_embed_backend(config.embed_dim));
    json hdoc = json::parse(read_file(human_path));
    std::vector<eval::ThemeText> human;
    for (const auto& t : hdoc) {
        human.push_back({t.at("label").get<std::string>(),
                         t.value("description", std::string())});
    }
    json hier = json::parse(read_file(std::filesystem::path(run_dir) / "hierarchy.json"));
    Hierarchy hierarchy = Hierarchy::from_json(hier);
    std::vector<eval::ThemeText> generated;
    for (const auto& [id, t] : hierarchy.themes()) {
        if (!t.deleted) generated.push_back({t.label, t.description});
    }
    auto report = eval::theme_alignment(ctx_embedder, generated, human);
    std::filesystem::path out =
        args.out_dir.empty() ? std::filesystem::path(run_dir) / "alignment.csv"
                             : std::filesystem::path(args.out_dir);
    CsvWriter csv(out);
    csv.row({"generated_theme", "closest_human_theme", "similarity"});
    for (const auto& row : report.rows) {
        csv.row({row.generated_label, row.human_label, canon_real(row.similarity)});
    }
    csv.row({"(mean)", "", canon_real(report.mean_similarity)});
    csv.flush_and_close();
    for (const auto& row : report.rows) {
        std::printf("%-60s %-50s %.3f\n", row.generated_label.c_str(), row.human_label.c_str(),
                    row.similarity);
    }
    std::printf("mean similarity: %.3f  (%zu themes)\n", report.mean_similarity,
                report.rows.size());
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& codebook_path) {
    run::Config config = load_config(args);
    run::PipelineContext ctx = run::make_context(config);
    run::stage_ingest(ctx, args.corpus_dir);
    ctx.codebook = coder::Codebook::from_json(json::parse(read_file(codebook_path)));
    if (ctx.codebook.codes.empty()) {
        raise(Errc::empty_codebook, "imported codebook has no codes");
    }
    auto report = run::stage_evaluate(ctx, 1);
    std::filesystem::path out = config.out_dir;
    std::filesystem::create_directories(out);
    CsvWriter csv(out / "compare_metrics.csv");
    csv.row({"reusability", "fitness", "coverage", "parsimony", "consistency", "composite"});
    csv.row({canon_real(report.reusability), canon_real(report.fitness),
             canon_real(report.coverage), canon_real(report.parsimony),
             canon_real(report.consistency), canon_real(report.composite)});
    csv.flush_and_close();
    std::cout << "composite " << canon_real(report.composite) << " -> "
              << (out / "compare_metrics.csv").string() << "\n";
    return 0;
}

int exit_code_for(const Error& err) {
    switch (err.code()) {
        case Errc::backend_unavailable: return 2;
        case Errc::corpus_error:
        case Errc::empty_document: return 3;
        default: return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"traceable thematic-analysis pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string run_dir;
    std::string artifact;
    std::string human_path;
    std::string codebook_path;
    std::uint64_t seed_from = 42;
    std::uint64_t seed_to = 46;

    auto* c_run = app.add_subcommand("run", "full pipeline: ingest, code, synthesize, refine, evaluate");
    add_common(c_run, args, true);
    auto* c_code = app.add_subcommand("code", "run through grounded coding and emit the codebook");
    add_common(c_code, args, true);
    auto* c_synth = app.add_subcommand("synthesize", "run through subtheme/theme synthesis");
    add_common(c_synth, args, true);
    auto* c_refine = app.add_subcommand("refine", "run with the iterative refinement loop");
    add_common(c_refine, args, true);
    auto* c_eval = app.add_subcommand("evaluate", "run and evaluate the initial codebook once");
    add_common(c_eval, args, true);

    auto* c_reps = app.add_subcommand("replicates", "seeded replicate experiment with stats table");
    add_common(c_reps, args, true);
    c_reps->add_option("--seed-from", seed_from, "first replicate seed");
    c_reps->add_option("--seed-to", seed_to, "last replicate seed");

    auto* c_trace = app.add_subcommand("trace", "print the provenance chain for an artifact");
    c_trace->add_option("--run", run_dir, "run directory")->required();
    c_trace->add_option("artifact", artifact, "artifact id, e.g. thid_000001")->required();

    auto* c_replay = app.add_subcommand("replay", "verify ledger -> hierarchy equality");
    c_replay->add_option("--run", run_dir, "run directory")->required();

    auto* c_align = app.add_subcommand("align", "match generated themes against human themes");
    add_common(c_align, args, false);
    c_align->add_option("--run", run_dir, "run directory")->required();
    c_align->add_option("--human", human_path, "human themes JSON")->required();

    auto* c_compare = app.add_subcommand("compare", "evaluate an external codebook on a split");
    add_common(c_compare, args, true);
    c_compare->add_option("--codebook", codebook_path, "codebook JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return run_pipeline(args, kRefine);
        if (c_code->parsed()) return run_pipeline(args, kCode);
        if (c_synth->parsed()) return run_pipeline(args, kSynthesize);
        if (c_eval->parsed()) return run_pipeline(args, kEvaluate);
        if (c_refine->parsed()) return run_pipeline(args, kRefine);
        if (c_reps->parsed()) return cmd_replicates(args, seed_from, seed_to);
        if (c_trace->parsed()) return cmd_trace(run_dir, artifact);
        if (c_replay->parsed()) return cmd_replay(run_dir);
        if (c_align->parsed()) return cmd_align(args, run_dir, human_path);
        if (c_compare->parsed()) return cmd_compare(args, codebook_path);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
