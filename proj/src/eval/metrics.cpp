#include "themis/eval/metrics.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace themis::eval {

Assignment deductive_code(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                          const coder::Codebook& codebook, const Chunk& chunk,
                          const DeductiveConfig& config, std::vector<std::string>* warnings) {
    if (codebook.codes.empty()) {
        raise(Errc::empty_codebook, "deductive coding needs a non-empty codebook");
    }
    std::string menu;
    for (const auto& c : codebook.codes) {
        menu += c.id.str() + " :: " + c.label + "\n";
    }
    if (!menu.empty()) menu.pop_back();

    llm::CompletionRequest request;
    request.role = llm::RoleTag::deductive_coder;
    request.temperature = config.temperature;
    request.seed_hint = config.seed_hint;
    request.prompt = prompts.render(llm::RoleTag::deductive_coder,
                                    {{"max_codes", std::to_string(config.max_codes)},
                                     {"menu_lines", menu},
                                     {"chunk_text", chunk.text}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::assignment_list);

    Assignment assignment;
    assignment.chunk_id = chunk.id;
    std::set<ArtifactId> seen;
    for (const auto& s : parsed) {
        std::string mention = s.get<std::string>();
        const Code* hit = nullptr;
        if (auto id = ArtifactId::parse(mention)) hit = codebook.find(*id);
        if (!hit) hit = codebook.find_label(normalize_label(mention));
        if (!hit) {
            if (warnings) {
                warnings->push_back("assignment named unknown code '" + mention + "'; dropped");
            }
            continue;
        }
        if (!seen.insert(hit->id).second) continue;
        if (static_cast<int>(assignment.code_ids.size()) >= config.max_codes) break;
        assignment.code_ids.push_back(hit->id);
    }
    return assignment;
}

double reusability(const coder::Codebook& codebook, const std::vector<Assignment>& assignments) {
    if (codebook.codes.empty()) {
        raise(Errc::empty_codebook, "reusability of an empty codebook is undefined");
    }
    std::set<ArtifactId> in_book;
    for (const auto& c : codebook.codes) in_book.insert(c.id);
    std::set<ArtifactId> used;
    for (const auto& a : assignments) {
        for (const auto& id : a.code_ids) {
            if (in_book.count(id)) used.insert(id);
        }
    }
    return static_cast<double>(used.size()) / static_cast<double>(in_book.size());
}

double parsimony(const std::vector<embed::Embedding>& representations,
                 std::vector<std::string>* log) {
    const std::size_t n = representations.size();
    if (n == 0) raise(Errc::empty_codebook, "parsimony needs at least one code");
    if (n == 1) {
        if (log) log->push_back("parsimony: single code, 1.0 by convention");
        return 1.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum += embed::cosine(representations[i], representations[j]);
        }
    }
    double mean = sum * 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    double value = 1.0 - mean;
    if (value < 0.0 || value > 1.0) {
        if (log) {
            log->push_back("parsimony clamped from " + canon_real(value) + " into [0,1]");
        }
        value = std::clamp(value, 0.0, 1.0);
    }
    return value;
}

double consistency(const std::vector<Assignment>& train_assignments,
                   const std::vector<Assignment>& test_assignments) {
    std::map<ArtifactId, double> p_counts;
    std::map<ArtifactId, double> q_counts;
    double p_total = 0.0;
    double q_total = 0.0;
    for (const auto& a : train_assignments) {
        for (const auto& id : a.code_ids) {
            p_counts[id] += 1.0;
            p_total += 1.0;
        }
    }
    for (const auto& a : test_assignments) {
        for (const auto& id : a.code_ids) {
            q_counts[id] += 1.0;
            q_total += 1.0;
        }
    }
    if (p_total == 0.0 || q_total == 0.0) {
        raise(Errc::empty_distribution, "consistency needs at least one assignment per side");
    }
    std::set<ArtifactId> support;
    for (const auto& [id, c] : p_counts) support.insert(id);
    for (const auto& [id, c] : q_counts) support.insert(id);

    auto lg2 = [](double x) { return std::log2(x); };
    double jsd = 0.0;
    for (const auto& id : support) {
        double p = (p_counts.count(id) ? p_counts[id] : 0.0) / p_total;
        double q = (q_counts.count(id) ? q_counts[id] : 0.0) / q_total;
        double m = 0.5 * (p + q);
        if (p > 0.0) jsd += 0.5 * p * lg2(p / m);
        if (q > 0.0) jsd += 0.5 * q * lg2(q / m);
    }
    jsd = std::clamp(jsd, 0.0, 1.0); // fp noise guard; base-2 JSD lies in [0,1]
    return 1.0 - jsd;
}

double composite(const std::array<double, 5>& values, const std::array<double, 5>& weights) {
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9) {
        raise(Errc::weight_sum_invalid, "metric weights sum to " + canon_real(wsum));
    }
    double out = 0.0;
    for (std::size_t i = 0; i < 5; ++i) out += weights[i] * values[i];
    return out;
}

ojson MetricReport::to_json() const {
    ojson j;
    j["reusability"] = reusability;
    j["fitness"] = fitness;
    j["coverage"] = coverage;
    j["parsimony"] = parsimony;
    j["consistency"] = consistency;
    j["composite"] = composite;
    j["judge_sample_size"] = judge_sample_size;
    return j;
}

} // namespace themis::eval
