#include "themis/eval/judge.hpp"

#include "themis/errors.hpp"

namespace themis::eval {

double judge_score(llm::Gateway& gateway, const llm::PromptLibrary& prompts, const Chunk& chunk,
                   const std::vector<const Code*>& assigned_codes, JudgeKind kind,
                   double temperature, std::optional<std::uint64_t> seed_hint) {
    std::string code_lines;
    for (const Code* c : assigned_codes) {
        code_lines += c->id.str() + " :: " + c->label + "\n";
    }
    if (code_lines.empty()) {
        code_lines = "(no codes were assigned to this excerpt)";
    } else {
        code_lines.pop_back();
    }
    llm::CompletionRequest request;
    request.role = kind == JudgeKind::fitness ? llm::RoleTag::judge_fitness
                                              : llm::RoleTag::judge_coverage;
    request.temperature = temperature;
    request.seed_hint = seed_hint;
    request.prompt = prompts.render(request.role,
                                    {{"code_lines", code_lines}, {"chunk_text", chunk.text}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::judge_score);
    int score = parsed.at("score").get<int>();
    return static_cast<double>(score - 1) / 9.0;
}

double judge_dataset(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                     const coder::Codebook& codebook, const std::vector<Chunk>& test_chunks,
                     const std::vector<Assignment>& assignments, JudgeKind kind,
                     int sample_size, SplitMix64& rng, double temperature,
                     std::vector<std::string>* warnings) {
    if (test_chunks.empty()) {
        raise(Errc::invalid_request, "judge_dataset needs at least one test chunk");
    }
    // seeded sample order over all test chunks; failures fall through to the
    // next candidate so the sample refills when possible
    auto order = sample_indices(test_chunks.size(), test_chunks.size(), rng);
    double sum = 0.0;
    int used = 0;
    for (std::size_t idx : order) {
        if (used >= sample_size) break;
        const Chunk& chunk = test_chunks[idx];
        std::vector<const Code*> codes;
        for (const auto& a : assignments) {
            if (a.chunk_id != chunk.id) continue;
            for (const auto& id : a.code_ids) {
                if (const Code* c = codebook.find(id)) codes.push_back(c);
            }
            break;
        }
        try {
            sum += judge_score(gateway, prompts, chunk, codes, kind, temperature,
                               rng.next());
            ++used;
        } catch (const Error& err) {
            if (err.code() != Errc::malformed_response) throw;
            if (warnings) {
                warnings->push_back("judge response unparseable for " + chunk.id.str() +
                                    "; chunk excluded from the sample");
            }
        }
    }
    if (used == 0) {
        raise(Errc::malformed_response, "no judge scores could be collected");
    }
    return sum / static_cast<double>(used);
}

} // namespace themis::eval
