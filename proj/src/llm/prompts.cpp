#include "themis/llm/gateway.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"

#include <cstdlib>

namespace themis::llm {

namespace {

constexpr RoleTag kAllRoles[] = {
    RoleTag::coder,          RoleTag::relation_classifier, RoleTag::subtheme_synthesizer,
    RoleTag::theme_synthesizer, RoleTag::reviewer,         RoleTag::deductive_coder,
    RoleTag::judge_fitness,  RoleTag::judge_coverage,
};

std::filesystem::path resolve_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!dir.empty()) {
        if (fs::is_directory(dir)) return dir;
        raise(Errc::invalid_config, "prompt directory not found: " + dir.string());
    }
    if (const char* env = std::getenv("THEMIS_PROMPT_DIR")) {
        if (fs::is_directory(env)) return env;
    }
    if (fs::is_directory("prompts")) return "prompts";
#ifdef THEMIS_SOURCE_PROMPT_DIR
    if (fs::is_directory(THEMIS_SOURCE_PROMPT_DIR)) return THEMIS_SOURCE_PROMPT_DIR;
#endif
    raise(Errc::invalid_config, "no prompt template directory found");
}

} // namespace

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
    auto base = resolve_dir(dir);
    PromptLibrary lib;
    for (RoleTag role : kAllRoles) {
        auto path = base / (std::string(role_name(role)) + ".txt");
        if (!std::filesystem::is_regular_file(path)) {
            raise(Errc::invalid_config, "missing prompt template " + path.string());
        }
        lib.templates_[role] = read_file(path);
    }
    return lib;
}

std::string PromptLibrary::render(RoleTag role,
                                  const std::map<std::string, std::string>& vars) const {
    std::string out = raw(role);
    for (const auto& [key, value] : vars) {
        const std::string needle = "{" + key + "}";
        std::size_t at = 0;
        while ((at = out.find(needle, at)) != std::string::npos) {
            out.replace(at, needle.size(), value);
            at += value.size();
        }
    }
    return out;
}

const std::string& PromptLibrary::raw(RoleTag role) const {
    auto it = templates_.find(role);
    if (it == templates_.end()) {
        raise(Errc::invalid_config, std::string("no template for role ") + role_name(role));
    }
    return it->second;
}

std::map<std::string, std::string> PromptLibrary::hashes() const {
    std::map<std::string, std::string> out;
    for (const auto& [role, text] : templates_) {
        out[role_name(role)] = sha256_hex(text);
    }
    return out;
}

} // namespace themis::llm
