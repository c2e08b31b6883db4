#include "themis/synth/synthesizer.hpp"

#include "themis/errors.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <map>

namespace themis::synth {

namespace {

void warn(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
}

std::string id_lines(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string out;
    for (const auto& [id, label] : rows) {
        out += id + " :: " + label + "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

} // namespace

std::vector<SubthemeDraft> synthesize_subthemes(llm::Gateway& gateway,
                                                const llm::PromptLibrary& prompts,
                                                const coder::Codebook& codebook,
                                                const SynthConfig& config,
                                                std::vector<std::string>* warnings) {
    if (codebook.codes.empty()) {
        raise(Errc::empty_codebook, "cannot synthesize subthemes from an empty codebook");
    }
    std::vector<std::pair<std::string, std::string>> rows;
    std::set<ArtifactId> all_codes;
    for (const auto& c : codebook.codes) {
        rows.emplace_back(c.id.str(), c.label);
        all_codes.insert(c.id);
    }
    llm::CompletionRequest request;
    request.role = llm::RoleTag::subtheme_synthesizer;
    request.temperature = config.temperature;
    request.seed_hint = config.seed_hint;
    request.prompt = prompts.render(llm::RoleTag::subtheme_synthesizer,
                                    {{"code_lines", id_lines(rows)}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::subtheme_list);

    std::vector<SubthemeDraft> drafts;
    std::map<std::string, std::size_t> by_label;
    std::set<ArtifactId> covered;
    for (const auto& item : parsed) {
        SubthemeDraft d;
        d.label = trim(item.at("label").get<std::string>());
        d.description = trim(item.at("description").get<std::string>());
        for (const auto& s : item.at("code_ids")) {
            auto id = ArtifactId::parse(s.get<std::string>());
            if (!id || !all_codes.count(*id)) {
                warn(warnings, "subtheme references unknown code '" + s.get<std::string>() +
                                   "'; dropped");
                continue;
            }
            d.code_ids.insert(*id);
        }
        if (d.code_ids.empty()) {
            warn(warnings, "subtheme '" + d.label + "' had no resolvable codes; dropped");
            continue;
        }
        std::string key = normalize_label(d.label);
        auto it = by_label.find(key);
        if (it != by_label.end()) {
            // duplicate labels merge rather than violate distinctness
            for (const auto& id : d.code_ids) drafts[it->second].code_ids.insert(id);
            warn(warnings, "duplicate subtheme label '" + d.label + "' merged");
        } else {
            by_label[key] = drafts.size();
            drafts.push_back(std::move(d));
        }
    }
    for (const auto& d : drafts) {
        for (const auto& id : d.code_ids) covered.insert(id);
    }
    std::set<ArtifactId> missing;
    for (const auto& id : all_codes) {
        if (!covered.count(id)) missing.insert(id);
    }
    if (!missing.empty()) {
        SubthemeDraft fallback;
        fallback.label = "Unassigned (review)";
        fallback.description =
            "Codes the synthesis pass left unassigned; queued for reviewer attention.";
        fallback.code_ids = missing;
        fallback.fallback = true;
        warn(warnings, std::to_string(missing.size()) +
                           " codes omitted by the model landed in the fallback subtheme");
        drafts.push_back(std::move(fallback));
    }
    if (drafts.empty()) {
        raise(Errc::malformed_response, "subtheme synthesis produced no usable groups");
    }
    return drafts;
}

bool theme_label_ok(const std::string& label) {
    std::size_t wc = word_count(label);
    return wc >= 5 && wc <= 10;
}

bool theme_description_ok(const std::string& description) {
    std::size_t wc = word_count(description);
    return wc >= 60 && wc <= 80;
}

std::vector<ThemeDraft> synthesize_themes(llm::Gateway& gateway,
                                          const llm::PromptLibrary& prompts,
                                          const std::vector<Subtheme>& subthemes,
                                          const SynthConfig& config,
                                          std::vector<std::string>* warnings) {
    if (subthemes.empty()) {
        raise(Errc::invalid_request, "cannot synthesize themes from zero subthemes");
    }
    std::vector<std::pair<std::string, std::string>> rows;
    std::set<ArtifactId> all_subs;
    for (const auto& s : subthemes) {
        rows.emplace_back(s.id.str(), s.label);
        all_subs.insert(s.id);
    }
    llm::CompletionRequest request;
    request.role = llm::RoleTag::theme_synthesizer;
    request.temperature = config.temperature;
    request.seed_hint = config.seed_hint;
    request.prompt = prompts.render(llm::RoleTag::theme_synthesizer,
                                    {{"subtheme_lines", id_lines(rows)}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::theme_list);

    auto harvest = [&](const json& arr, std::vector<ThemeDraft>& sink,
                       json& invalid) {
        for (const auto& item : arr) {
            ThemeDraft d;
            d.label = trim(item.at("label").get<std::string>());
            d.description = trim(item.at("description").get<std::string>());
            for (const auto& s : item.at("subtheme_ids")) {
                auto id = ArtifactId::parse(s.get<std::string>());
                if (id && all_subs.count(*id)) {
                    d.subtheme_ids.insert(*id);
                } else {
                    warn(warnings, "theme references unknown subtheme '" + s.get<std::string>() +
                                       "'; dropped");
                }
            }
            if (d.subtheme_ids.empty()) continue;
            if (theme_label_ok(d.label) && theme_description_ok(d.description)) {
                sink.push_back(std::move(d));
            } else {
                json bad;
                bad["label"] = d.label;
                bad["description"] = d.description;
                json ids = json::array();
                for (const auto& id : d.subtheme_ids) ids.push_back(id.str());
                bad["subtheme_ids"] = ids;
                invalid.push_back(bad);
            }
        }
    };

    std::vector<ThemeDraft> drafts;
    json invalid = json::array();
    harvest(parsed, drafts, invalid);
    if (!invalid.empty()) {
        llm::CompletionRequest repair = request;
        repair.prompt += "\n\nThese themes violate the word limits (label 5-10 words, description "
                         "60-80 words). Rewrite them to comply and return the same JSON array "
                         "schema:\n" + invalid.dump();
        json still_bad = json::array();
        try {
            json fixed = gateway.complete_parsed(repair, llm::SchemaTag::theme_list);
            harvest(fixed, drafts, still_bad);
        } catch (const Error&) {
            still_bad = invalid;
        }
        // mechanical repair as the last resort so limits always hold
        for (const auto& item : still_bad) {
            ThemeDraft d;
            d.label = fit_word_count(item.at("label").get<std::string>(), 5, 10);
            d.description = fit_word_count(item.at("description").get<std::string>(), 60, 80);
            for (const auto& s : item.at("subtheme_ids")) {
                if (auto id = ArtifactId::parse(s.get<std::string>())) d.subtheme_ids.insert(*id);
            }
            if (d.subtheme_ids.empty()) continue;
            warn(warnings, "theme '" + d.label + "' mechanically repaired to meet word limits");
            drafts.push_back(std::move(d));
        }
    }

    // distinct labels
    std::map<std::string, std::size_t> by_label;
    std::vector<ThemeDraft> unique;
    for (auto& d : drafts) {
        std::string key = normalize_label(d.label);
        auto it = by_label.find(key);
        if (it != by_label.end()) {
            for (const auto& id : d.subtheme_ids) unique[it->second].subtheme_ids.insert(id);
            warn(warnings, "duplicate theme label '" + d.label + "' merged");
        } else {
            by_label[key] = unique.size();
            unique.push_back(std::move(d));
        }
    }

    // coverage: re-home omitted subthemes to the largest theme
    std::set<ArtifactId> covered;
    for (const auto& d : unique) {
        for (const auto& id : d.subtheme_ids) covered.insert(id);
    }
    if (unique.empty()) {
        ThemeDraft fallback;
        fallback.label = fit_word_count("Unassigned subthemes pending review", 5, 10);
        fallback.description = fit_word_count(
            "Fallback theme holding subthemes the synthesis pass failed to organize.", 60, 80);
        fallback.subtheme_ids = all_subs;
        unique.push_back(std::move(fallback));
    } else {
        std::size_t largest = 0;
        for (std::size_t i = 1; i < unique.size(); ++i) {
            if (unique[i].subtheme_ids.size() > unique[largest].subtheme_ids.size()) largest = i;
        }
        for (const auto& id : all_subs) {
            if (!covered.count(id)) {
                unique[largest].subtheme_ids.insert(id);
                warn(warnings, "subtheme " + id.str() + " omitted by the model; re-homed");
            }
        }
    }
    return unique;
}

std::string review_context_json(const Hierarchy& hierarchy, const coder::Codebook& codebook) {
    ojson doc;
    ojson themes = ojson::array();
    for (const auto& [id, t] : hierarchy.themes()) {
        if (t.deleted) continue;
        // quote support = distinct quotes reachable through the theme
        std::set<ArtifactId> quotes;
        for (const auto& sid : t.subtheme_ids) {
            const Subtheme* s = hierarchy.subtheme(sid);
            if (!s || s->deleted) continue;
            for (const auto& cid : s->code_ids) {
                const Code* c = hierarchy.code(cid);
                if (!c || c->deleted) continue;
                for (const auto& qid : c->quote_ids) quotes.insert(qid);
            }
        }
        ojson j;
        j["id"] = id.str();
        j["label"] = t.label;
        j["description"] = t.description;
        j["quote_count"] = quotes.size();
        json subs = json::array();
        for (const auto& sid : t.subtheme_ids) subs.push_back(sid.str());
        j["subtheme_ids"] = subs;
        themes.push_back(std::move(j));
    }
    ojson subthemes = ojson::array();
    for (const auto& [id, s] : hierarchy.subthemes()) {
        if (s.deleted) continue;
        ojson j;
        j["id"] = id.str();
        j["label"] = s.label;
        j["description"] = s.description;
        json cids = json::array();
        for (const auto& cid : s.code_ids) cids.push_back(cid.str());
        j["code_ids"] = cids;
        subthemes.push_back(std::move(j));
    }
    ojson codes = ojson::array();
    for (const auto& c : codebook.codes) {
        ojson j;
        j["id"] = c.id.str();
        j["label"] = c.label;
        j["description"] = c.description;
        j["frequency"] = c.frequency;
        codes.push_back(std::move(j));
    }
    ojson doc_out;
    doc_out["themes"] = std::move(themes);
    doc_out["subthemes"] = std::move(subthemes);
    doc_out["codes"] = std::move(codes);
    return doc_out.dump(1);
}

namespace {

std::optional<ArtifactId> parse_id_field(const json& item, const char* field) {
    if (!item.contains(field) || !item.at(field).is_string()) return std::nullopt;
    return ArtifactId::parse(item.at(field).get<std::string>());
}

} // namespace

std::vector<EditProposal> review(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                                 const RunState& state, const coder::Codebook& codebook,
                                 const std::string& sample_text, const SynthConfig& config,
                                 std::vector<std::string>* warnings) {
    llm::CompletionRequest request;
    request.role = llm::RoleTag::reviewer;
    request.temperature = config.temperature;
    request.seed_hint = config.seed_hint;
    request.prompt = prompts.render(
        llm::RoleTag::reviewer,
        {{"min_quotes", std::to_string(config.min_quotes_per_theme)},
         {"hierarchy_json", review_context_json(state.hierarchy, codebook)},
         {"sample_text", sample_text.empty() ? std::string("(none)") : sample_text}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::edit_list);

    std::vector<EditProposal> proposals;
    for (const auto& item : parsed) {
        EditProposal p;
        auto action = action_type_from_name(item.at("action").get<std::string>());
        if (!action) continue; // schema already filtered, belt and braces
        p.action = *action;
        bool ok = true;
        if (item.contains("targets")) {
            for (const auto& s : item.at("targets")) {
                auto id = ArtifactId::parse(s.get<std::string>());
                if (!id || !state.hierarchy.is_live(*id)) {
                    warn(warnings, "proposal targets unknown or tombstoned artifact '" +
                                       s.get<std::string>() + "'; dropped");
                    ok = false;
                    break;
                }
                p.targets.push_back(*id);
            }
        }
        if (!ok) continue;
        if (item.contains("label") && item.at("label").is_string()) {
            p.label = item.at("label").get<std::string>();
        }
        if (item.contains("description") && item.at("description").is_string()) {
            p.description = item.at("description").get<std::string>();
        }
        if (item.contains("children")) {
            for (const auto& s : item.at("children")) {
                if (auto id = ArtifactId::parse(s.get<std::string>())) p.children.push_back(*id);
            }
        }
        if (item.contains("parts")) {
            for (const auto& part : item.at("parts")) {
                EditPart ep;
                ep.label = part.value("label", "");
                ep.description = part.value("description", "");
                if (part.contains("children")) {
                    for (const auto& s : part.at("children")) {
                        if (auto id = ArtifactId::parse(s.get<std::string>())) {
                            ep.children.push_back(*id);
                        }
                    }
                }
                p.parts.push_back(std::move(ep));
            }
        }
        p.move_to = parse_id_field(item, "move_to");
        p.move_from = parse_id_field(item, "move_from");
        p.assign_to = parse_id_field(item, "assign_to");
        if (item.contains("kind") && item.at("kind").is_string()) {
            if (auto k = kind_from_name(item.at("kind").get<std::string>())) p.kind = *k;
        }
        p.justification = item.value("justification", "");
        proposals.push_back(std::move(p));
    }
    return proposals;
}

double codebook_jaccard(const coder::Codebook& a, const coder::Codebook& b) {
    auto la = a.normalized_labels();
    auto lb = b.normalized_labels();
    std::set<std::string> sa(la.begin(), la.end());
    std::set<std::string> sb(lb.begin(), lb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& l : sa) {
        if (sb.count(l)) ++inter;
    }
    std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace themis::synth
