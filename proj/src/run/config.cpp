#include "themis/run/config.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"

namespace themis::run {

namespace {

// Pulls a field if present, complaining about unknown keys afterwards.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {}

    template <typename T>
    void get(const char* key, T& out) {
        if (j_.contains(key)) {
            try {
                out = j_.at(key).get<T>();
            } catch (const json::exception&) {
                raise(Errc::invalid_config, "bad value for " + name_ + "." + key);
            }
            known_.insert(key);
        }
    }

    void finish() const {
        for (const auto& [key, v] : j_.items()) {
            if (!known_.count(key)) {
                raise(Errc::unknown_config_key, "unknown config key: " + name_ + "." + key);
            }
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> known_;
};

} // namespace

Config Config::from_json(const json& doc) {
    Config c;
    if (!doc.is_object()) raise(Errc::invalid_config, "config root must be a JSON object");
    std::set<std::string> known_sections = {"version",  "chunking", "split",   "coder",
                                            "synthesis", "evaluation", "backend", "paths"};
    for (const auto& [key, v] : doc.items()) {
        if (!known_sections.count(key)) {
            raise(Errc::unknown_config_key, "unknown config key: " + key);
        }
    }
    if (doc.contains("version")) c.version = doc.at("version").get<int>();

    if (doc.contains("chunking")) {
        Section s(doc.at("chunking"), "chunking");
        s.get("unit", c.chunk_unit);
        s.get("words", c.chunk_words);
        s.get("word_overlap", c.chunk_word_overlap);
        s.get("chars", c.chunk_chars);
        s.get("char_overlap", c.chunk_char_overlap);
        s.finish();
        if (c.chunk_unit != "words" && c.chunk_unit != "chars") {
            raise(Errc::invalid_config, "chunking.unit must be 'words' or 'chars'");
        }
    }
    if (doc.contains("split")) {
        Section s(doc.at("split"), "split");
        s.get("train_ratio", c.train_ratio);
        s.get("seed", c.seed);
        s.finish();
    }
    if (doc.contains("coder")) {
        Section s(doc.at("coder"), "coder");
        s.get("codes_per_chunk", c.codes_per_chunk);
        s.get("min_quote_chars", c.min_quote_chars);
        s.get("max_quote_chars", c.max_quote_chars);
        s.get("sim_threshold", c.sim_threshold);
        s.get("low_freq_threshold", c.low_freq_threshold);
        s.get("merge_w_freq", c.merge_w_freq);
        s.get("merge_w_indeg", c.merge_w_indeg);
        s.get("temperature", c.coder_temperature);
        s.finish();
    }
    if (doc.contains("synthesis")) {
        Section s(doc.at("synthesis"), "synthesis");
        s.get("temperature", c.synth_temperature);
        s.get("min_quotes_per_theme", c.min_quotes_per_theme);
        s.get("refine_sample_size", c.refine_sample_size);
        s.get("max_rounds", c.max_rounds);
        s.get("jaccard_stop", c.jaccard_stop);
        s.finish();
    }
    if (doc.contains("evaluation")) {
        Section s(doc.at("evaluation"), "evaluation");
        s.get("judge_sample_size", c.judge_sample_size);
        s.get("judge_temperature", c.judge_temperature);
        s.get("max_codes_per_assignment", c.max_codes_per_assignment);
        s.get("metric_weights", c.metric_weights);
        s.finish();
    }
    if (doc.contains("backend")) {
        Section s(doc.at("backend"), "backend");
        s.get("mode", c.backend);
        s.get("base_url", c.base_url);
        s.get("model", c.model);
        s.get("api_key_env", c.api_key_env);
        s.get("embed_base_url", c.embed_base_url);
        s.get("embed_model", c.embed_model);
        s.get("embed_dim", c.embed_dim);
        s.get("timeout_ms", c.timeout_ms);
        s.get("max_retries", c.max_retries);
        s.get("backoff_base_ms", c.backoff_base_ms);
        s.get("inflight", c.inflight);
        s.get("trace_log", c.trace_log);
        s.finish();
        if (c.backend != "mock" && c.backend != "http") {
            raise(Errc::invalid_config, "backend.mode must be 'mock' or 'http'");
        }
    }
    if (doc.contains("paths")) {
        Section s(doc.at("paths"), "paths");
        s.get("prompt_dir", c.prompt_dir);
        s.get("out_dir", c.out_dir);
        s.finish();
    }
    if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) {
        raise(Errc::invalid_config, "split.train_ratio must lie in (0, 1)");
    }
    if (c.codes_per_chunk <= 0) raise(Errc::invalid_config, "coder.codes_per_chunk must be > 0");
    if (c.max_rounds < 1) raise(Errc::invalid_config, "synthesis.max_rounds must be >= 1");
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        raise(Errc::invalid_config, "config parse failed: " + std::string(ex.what()));
    }
    return from_json(doc);
}

ojson Config::to_json() const {
    ojson doc;
    doc["version"] = version;
    doc["chunking"] = ojson{{"unit", chunk_unit},
                            {"words", chunk_words},
                            {"word_overlap", chunk_word_overlap},
                            {"chars", chunk_chars},
                            {"char_overlap", chunk_char_overlap}};
    doc["split"] = ojson{{"train_ratio", train_ratio}, {"seed", seed}};
    doc["coder"] = ojson{{"codes_per_chunk", codes_per_chunk},
                         {"min_quote_chars", min_quote_chars},
                         {"max_quote_chars", max_quote_chars},
                         {"sim_threshold", sim_threshold},
                         {"low_freq_threshold", low_freq_threshold},
                         {"merge_w_freq", merge_w_freq},
                         {"merge_w_indeg", merge_w_indeg},
                         {"temperature", coder_temperature}};
    doc["synthesis"] = ojson{{"temperature", synth_temperature},
                             {"min_quotes_per_theme", min_quotes_per_theme},
                             {"refine_sample_size", refine_sample_size},
                             {"max_rounds", max_rounds},
                             {"jaccard_stop", jaccard_stop}};
    doc["evaluation"] = ojson{{"judge_sample_size", judge_sample_size},
                              {"judge_temperature", judge_temperature},
                              {"max_codes_per_assignment", max_codes_per_assignment},
                              {"metric_weights", metric_weights}};
    doc["backend"] = ojson{{"mode", backend},
                           {"base_url", base_url},
                           {"model", model},
                           {"api_key_env", api_key_env},
                           {"embed_base_url", embed_base_url},
                           {"embed_model", embed_model},
                           {"embed_dim", embed_dim},
                           {"timeout_ms", timeout_ms},
                           {"max_retries", max_retries},
                           {"backoff_base_ms", backoff_base_ms},
                           {"inflight", inflight},
                           {"trace_log", trace_log}};
    doc["paths"] = ojson{{"prompt_dir", prompt_dir}, {"out_dir", out_dir}};
    return doc;
}

} // namespace themis::run
