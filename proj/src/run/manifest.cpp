#include "themis/run/manifest.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"

#include <algorithm>
#include <vector>

namespace themis::run {

ojson RunManifest::to_json() const {
    ojson j;
    j["run_id"] = run_id;
    j["seed"] = seed;
    j["started"] = started;
    j["chat_backend"] = chat_backend;
    j["embed_model"] = embed_model;
    ojson prompts = ojson::object();
    for (const auto& [role, hash] : prompt_hashes) prompts[role] = hash;
    j["prompt_sha256"] = prompts;
    ojson dataset = ojson::object();
    for (const auto& [file, hash] : dataset_sha256) dataset[file] = hash;
    j["dataset_sha256"] = dataset;
    j["config"] = config_snapshot;
    return j;
}

RunManifest build_manifest(const Config& config, std::uint64_t replicate_seed,
                           const std::filesystem::path& corpus_dir,
                           const std::map<std::string, std::string>& prompt_hashes,
                           const std::string& chat_backend, const std::string& embed_model) {
    namespace fs = std::filesystem;
    RunManifest m;
    m.seed = replicate_seed;
    m.started = now_rfc3339();
    m.config_snapshot = config.to_json();
    m.prompt_hashes = prompt_hashes;
    m.chat_backend = chat_backend;
    m.embed_model = embed_model;
    if (fs::is_directory(corpus_dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(corpus_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            m.dataset_sha256[f.filename().string()] = sha256_hex(read_file(f));
        }
    }
    // run id: dataset + config fingerprint + seed, stable for identical runs
    std::string fingerprint;
    for (const auto& [file, hash] : m.dataset_sha256) fingerprint += hash;
    fingerprint += m.config_snapshot.dump();
    fingerprint += std::to_string(replicate_seed);
    m.run_id = sha256_hex(fingerprint).substr(0, 16);
    return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

void write_summary(const std::filesystem::path& out_dir, const ojson& summary) {
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

} // namespace themis::run
