#pragma once

#include "themis/run/config.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace themis::run {

// Immutable run manifest, written before the first model call. Completion
// info (end timestamp, outcome) goes to a separate summary file so the
// manifest itself is never rewritten.
struct RunManifest {
    std::string run_id;
    ojson config_snapshot;
    std::map<std::string, std::string> prompt_hashes;   // role -> sha256
    std::map<std::string, std::string> dataset_sha256;  // file -> sha256
    std::uint64_t seed = 0;
    std::string chat_backend;
    std::string embed_model;
    std::string started;

    ojson to_json() const;
};

RunManifest build_manifest(const Config& config, std::uint64_t replicate_seed,
                           const std::filesystem::path& corpus_dir,
                           const std::map<std::string, std::string>& prompt_hashes,
                           const std::string& chat_backend, const std::string& embed_model);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);
void write_summary(const std::filesystem::path& out_dir, const ojson& summary);

} // namespace themis::run
