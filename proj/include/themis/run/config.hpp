#pragma once

#include "themis/core/artifacts.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

namespace themis::run {

// One versioned config file drives a run; CLI flags override individual
// fields and the API key comes from the environment. Unknown keys are
// rejected by name so typos cannot silently fall back to defaults.
struct Config {
    int version = 1;

    // chunking
    std::string chunk_unit = "words"; // "words" | "chars"
    std::size_t chunk_words = 2048;
    std::size_t chunk_word_overlap = 200;
    std::size_t chunk_chars = 8000;
    std::size_t chunk_char_overlap = 400;

    // split
    double train_ratio = 0.8;
    std::uint64_t seed = 42;

    // coder
    int codes_per_chunk = 20;
    std::size_t min_quote_chars = 20;
    std::size_t max_quote_chars = 1000;
    double sim_threshold = 0.5;
    std::uint64_t low_freq_threshold = 2;
    double merge_w_freq = 1.0;
    double merge_w_indeg = 1.0;
    double coder_temperature = 0.7;

    // synthesis + refinement
    double synth_temperature = 0.5;
    int min_quotes_per_theme = 3;
    int refine_sample_size = 5;
    int max_rounds = 10;
    double jaccard_stop = 0.95;

    // evaluation
    int judge_sample_size = 5;
    double judge_temperature = 0.3;
    int max_codes_per_assignment = 20;
    std::array<double, 5> metric_weights = {0.2, 0.2, 0.2, 0.2, 0.2};

    // backend
    std::string backend = "mock"; // "mock" | "http"
    std::string base_url = "https://api.openai.com";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string embed_base_url;
    std::string embed_model = "mock";
    std::size_t embed_dim = 384;
    int timeout_ms = 60000;
    int max_retries = 5;
    int backoff_base_ms = 1000;
    int inflight = 4;
    std::string trace_log; // optional request/response JSONL trace

    // paths
    std::string prompt_dir;
    std::string out_dir = "out";

    static Config load(const std::filesystem::path& path);
    static Config from_json(const json& doc);
    ojson to_json() const;
};

} // namespace themis::run
