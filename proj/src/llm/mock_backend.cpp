// Deterministic offline chat backend. Responses are synthesized from a
// seeded hash of (role, prompt, seed_hint) plus the structured sections the
// prompt templates carry, so full pipeline runs work without a network and
// reproduce exactly.

#include "themis/llm/gateway.hpp"

#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace themis::llm {

namespace {

std::string extract_between(const std::string& text, const std::string& begin,
                            const std::string& end) {
    std::size_t b = text.find(begin);
    if (b == std::string::npos) return {};
    b += begin.size();
    std::size_t e = text.find(end, b);
    if (e == std::string::npos) return {};
    return text.substr(b, e - b);
}

// First integer following `marker`, or fallback.
int extract_int_after(const std::string& text, const std::string& marker, int fallback) {
    std::size_t at = text.find(marker);
    if (at == std::string::npos) return fallback;
    at += marker.size();
    while (at < text.size() && text[at] == ' ') ++at;
    int value = 0;
    bool any = false;
    while (at < text.size() && text[at] >= '0' && text[at] <= '9') {
        value = value * 10 + (text[at] - '0');
        ++at;
        any = true;
    }
    return any ? value : fallback;
}

const std::set<std::string>& filler_words() {
    static const std::set<std::string> kFiller = {
        "participant", "perspectives", "experiences", "concerns",  "balancing",
        "navigating",  "about",        "of",          "on",        "and",
        "with",        "in",           "daily",       "routines",  "related",
        "challenges",  "choices",      "shaping",     "the",       "a",
        "to",          "for",          "that",        "this",      "accounts",
        "centered",    "broader",      "patterns",    "around",    "grouped",
        // common stopwords kept out of generated labels and overlap scoring
        "have",        "been",         "were",        "they",      "their",
        "them",        "there",        "these",       "those",     "then",
        "than",        "when",         "what",        "where",     "which",
        "while",       "would",        "could",       "should",    "because",
        "before",      "after",        "into",        "from",      "over",
        "under",       "again",        "more",        "most",      "some",
        "such",        "very",         "just",        "also",      "once",
        "here",        "does",         "doing",       "being",     "every",
        "combined",    "account",      "topics",      "anew"};
    return kFiller;
}

// Content words of the text ranked by frequency (desc), then alphabetically.
std::vector<std::string> ranked_content_words(const std::string& text) {
    std::map<std::string, int> counts;
    for (const auto& tok : content_tokens(text)) {
        if (tok.size() >= 4 && !filler_words().count(tok)) ++counts[tok];
    }
    std::vector<std::pair<std::string, int>> items(counts.begin(), counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    for (auto& [w, c] : items) out.push_back(w);
    static const std::vector<std::string> kPad = {"routine", "support", "planning",
                                                  "effort",  "change",  "structure"};
    for (const auto& w : kPad) {
        if (out.size() >= 6) break;
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
}

std::string first_topic_token(const std::string& label) {
    for (const auto& tok : content_tokens(label)) {
        if (!filler_words().count(tok)) return tok;
    }
    auto toks = content_tokens(label);
    return toks.empty() ? std::string("general") : toks.front();
}

// "id :: label" lines between section markers.
std::vector<std::pair<std::string, std::string>> parse_id_lines(const std::string& block) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos <= block.size()) {
        std::size_t nl = block.find('\n', pos);
        std::string line = block.substr(pos, nl == std::string::npos ? block.size() - pos
                                                                     : nl - pos);
        std::size_t sep = line.find(" :: ");
        if (sep != std::string::npos) {
            std::string id = trim(line.substr(0, sep));
            std::string rest = line.substr(sep + 4);
            std::size_t sep2 = rest.find(" :: ");
            std::string label = trim(sep2 == std::string::npos ? rest : rest.substr(0, sep2));
            if (!id.empty() && !label.empty()) out.emplace_back(id, label);
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

std::uint64_t request_seed(const CompletionRequest& req) {
    std::uint64_t h = fnv1a64(req.prompt);
    h ^= fnv1a64(role_name(req.role)) * 0x9E3779B97F4A7C15ULL;
    if (req.seed_hint) h ^= *req.seed_hint + 0xD1B54A32D192ED03ULL;
    return h;
}

// ----------------------------------------------------------------------
// role responders
// ----------------------------------------------------------------------

std::string respond_coder(const CompletionRequest& req) {
    std::string text = extract_between(req.prompt, "### TEXT\n", "\n### END TEXT");
    if (text.empty()) text = req.prompt;
    int n_codes = extract_int_after(req.prompt, "exactly", 20);
    std::size_t min_quote = static_cast<std::size_t>(
        std::max(1, extract_int_after(req.prompt, "at least", 20)));

    auto words = ranked_content_words(text);
    auto spans = sentence_spans(text);
    std::vector<std::string> quotes;
    for (const auto& [b, e] : spans) {
        std::string s = trim(text.substr(b, e - b));
        if (s.size() >= min_quote) quotes.push_back(s);
    }
    if (quotes.empty()) {
        std::string whole = trim(text);
        quotes.push_back(whole.size() >= min_quote
                             ? whole
                             : std::string("no grounded passage available in source"));
    }

    SplitMix64 rng(request_seed(req));
    const std::size_t W = words.size();
    json arr = json::array();
    for (int k = 0; k < n_codes; ++k) {
        const std::string& w1 = words[(static_cast<std::size_t>(k) * 3) % W];
        const std::string& w2 = words[(static_cast<std::size_t>(k) * 3 + 1) % W];
        const std::string& w3 = words[(static_cast<std::size_t>(k) * 3 + 2) % W];
        std::string label;
        switch (rng.bounded(5)) {
            case 0: label = "Participant perspectives on " + w1 + " and " + w2; break;
            case 1: label = "Experiences of " + w1 + " shaping " + w2 + " choices"; break;
            case 2: label = "Concerns about " + w1 + " " + w2 + " and " + w3; break;
            case 3: label = "Balancing " + w1 + " with " + w2 + " in daily routines"; break;
            default: label = "Navigating " + w1 + " and " + w2 + " related challenges"; break;
        }
        std::string description =
            "Captures how participants talk about " + w1 + " in relation to " + w2 +
            " within this portion of the interview. Statements grouped here also mention " + w3 +
            " along with concrete consequences for everyday decisions and routines. The emphasis "
            "stays on first-hand experience rather than abstract opinion, with specific examples "
            "of how " + w1 + " affects what people actually do.";
        json item;
        item["label"] = label;
        item["description"] = description;
        json qs = json::array();
        qs.push_back(quotes[rng.bounded(quotes.size())]);
        if (quotes.size() > 1 && rng.bounded(3) == 0) {
            qs.push_back(quotes[rng.bounded(quotes.size())]);
        }
        item["quotes"] = qs;
        arr.push_back(item);
    }
    return arr.dump(2);
}

std::string respond_relation(const CompletionRequest& req) {
    auto grab = [&](const std::string& marker) -> std::string {
        std::size_t at = req.prompt.find(marker);
        if (at == std::string::npos) return {};
        at += marker.size();
        std::size_t end = req.prompt.find('"', at);
        if (end == std::string::npos) return {};
        return req.prompt.substr(at, end - at);
    };
    std::string a = grab("Code A: \"");
    std::string b = grab("Code B: \"");
    std::string relation = "orthogonal";
    if (!a.empty() && !b.empty()) {
        if (normalize_label(a) == normalize_label(b)) {
            relation = "equivalent";
        } else {
            auto ta = content_tokens(a);
            auto tb = content_tokens(b);
            std::set<std::string> sa(ta.begin(), ta.end());
            std::set<std::string> sb(tb.begin(), tb.end());
            bool a_superset = sa.size() > sb.size() &&
                              std::includes(sa.begin(), sa.end(), sb.begin(), sb.end());
            bool b_superset = sb.size() > sa.size() &&
                              std::includes(sb.begin(), sb.end(), sa.begin(), sa.end());
            if (a_superset) {
                relation = "subordinate"; // A is the more specific concept
            } else if (b_superset) {
                relation = "reverse";
            } else if (token_jaccard(a, b) >= 2.0 / 3.0) {
                relation = "equivalent";
            }
        }
    }
    json j;
    j["relation"] = relation;
    return j.dump();
}

std::string respond_subthemes(const CompletionRequest& req) {
    std::string block = extract_between(req.prompt, "### CODES\n", "\n### END CODES");
    auto codes = parse_id_lines(block);
    json arr = json::array();
    if (codes.empty()) {
        json item;
        item["label"] = "General accounts";
        item["description"] = "Fallback grouping when no codes were listed in the request.";
        item["code_ids"] = json::array();
        arr.push_back(item);
        return arr.dump(2);
    }
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& [id, label] : codes) {
        groups[first_topic_token(label)].push_back(id);
    }
    for (const auto& [key, ids] : groups) {
        json item;
        item["label"] = "Accounts centered on " + key;
        item["description"] = "Codes in this group return to " + key +
                              " as the organizing concern, describing how it surfaces in "
                              "participants' day-to-day accounts and what follows from it.";
        item["code_ids"] = ids;
        arr.push_back(item);
    }
    return arr.dump(2);
}

std::string respond_themes(const CompletionRequest& req) {
    std::string block = extract_between(req.prompt, "### SUBTHEMES\n", "\n### END SUBTHEMES");
    auto subs = parse_id_lines(block);
    json arr = json::array();
    if (subs.empty()) {
        json item;
        item["label"] = "General patterns across all accounts";
        item["description"] = fit_word_count(
            "Aggregated fallback theme produced when the request listed no subthemes.", 60, 80);
        item["subtheme_ids"] = json::array();
        arr.push_back(item);
        return arr.dump(2);
    }
    std::size_t n_buckets = (subs.size() + 2) / 3;
    std::map<std::size_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        std::size_t b = fnv1a64(first_topic_token(subs[i].second)) % n_buckets;
        buckets[b].push_back(i);
    }
    std::set<std::string> used_labels;
    for (const auto& [b, members] : buckets) {
        std::string k1 = first_topic_token(subs[members[0]].second);
        std::string k2 = first_topic_token(subs[members[members.size() / 2]].second);
        std::string k3 = first_topic_token(subs[members.back()].second);
        std::string label = "Broader patterns around " + k1 + " and " + k2;
        while (used_labels.count(normalize_label(label)) && word_count(label) < 10) {
            label += " more";
        }
        used_labels.insert(normalize_label(label));
        std::string description =
            "This theme brings together subthemes about " + k1 + ", " + k2 + ", and " + k3 +
            " that recur across the interviews. Participants repeatedly connect these areas when "
            "describing what changed for them, what support they relied on, and what remained "
            "difficult over time. Taken together the grouped subthemes outline a shared storyline "
            "in which practical constraints, personal expectations, and day-to-day adjustments "
            "interact and reinforce one another.";
        json item;
        item["label"] = fit_word_count(label, 5, 10);
        item["description"] = fit_word_count(description, 60, 80);
        json ids = json::array();
        for (std::size_t i : members) ids.push_back(subs[i].first);
        item["subtheme_ids"] = ids;
        arr.push_back(item);
    }
    return arr.dump(2);
}

std::string respond_reviewer(const CompletionRequest& req) {
    std::string block = extract_between(req.prompt, "### HIERARCHY\n", "\n### END HIERARCHY");
    int min_quotes = extract_int_after(req.prompt, "fewer than", 3);
    json edits = json::array();
    json h;
    try {
        h = json::parse(block);
    } catch (const json::exception&) {
        return edits.dump();
    }

    struct Item {
        std::string id;
        std::string label;
        json node;
    };
    auto collect = [&](const char* key) {
        std::vector<Item> out;
        if (h.contains(key)) {
            for (const auto& n : h.at(key)) {
                out.push_back({n.value("id", ""), n.value("label", ""), n});
            }
        }
        return out;
    };
    auto subthemes = collect("subthemes");
    auto codes = collect("codes");
    auto themes = collect("themes");

    // duplicated concepts: greedy non-overlapping near-duplicate merges
    auto near_dup_merges = [&](const std::vector<Item>& items, double threshold,
                               const char* note) {
        std::set<std::size_t> used;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (used.count(i)) continue;
            for (std::size_t j = i + 1; j < items.size(); ++j) {
                if (used.count(j)) continue;
                if (token_jaccard(items[i].label, items[j].label) >= threshold) {
                    json e;
                    e["action"] = "merge";
                    e["targets"] = json::array({items[i].id, items[j].id});
                    e["label"] = items[i].label;
                    e["description"] = items[i].node.value("description", "");
                    e["justification"] = note;
                    edits.push_back(e);
                    used.insert(i);
                    used.insert(j);
                    break;
                }
            }
        }
    };
    near_dup_merges(subthemes, 0.8, "duplicated concepts across branches");
    near_dup_merges(codes, 0.75, "duplicated code concepts");

    // consolidate overlapping low-frequency codes while the codebook is large
    if (codes.size() >= 6) {
        std::vector<std::size_t> order(codes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            int fa = codes[a].node.value("frequency", 1);
            int fb = codes[b].node.value("frequency", 1);
            if (fa != fb) return fa < fb;
            return codes[a].id < codes[b].id;
        });
        const Item& first = codes[order[0]];
        const Item& second = codes[order[1]];
        std::string k1 = first_topic_token(first.label);
        std::string k2 = first_topic_token(second.label);
        std::string label = "Combined account of " + k1 + " and " + k2 + " topics";
        std::set<std::string> taken;
        for (const auto& c : codes) taken.insert(normalize_label(c.label));
        while (taken.count(normalize_label(label)) && word_count(label) < 12) {
            label += " anew";
        }
        json e;
        e["action"] = "merge";
        e["targets"] = json::array({first.id, second.id});
        e["label"] = label;
        e["description"] = fit_word_count(
            "Consolidates two overlapping low-frequency codes about " + k1 + " and " + k2 +
                " whose statements describe the same underlying concern from adjacent angles, "
                "keeping the codebook compact while preserving the grounded quotes and the chunk "
                "provenance both original codes carried through earlier passes",
            40, 80);
        e["justification"] = "consolidating overlapping codes";
        edits.push_back(e);
    }

    // singleton subthemes read as inconsistent granularity: fold two together
    {
        std::vector<std::size_t> singles;
        for (std::size_t i = 0; i < subthemes.size(); ++i) {
            if (subthemes[i].node.contains("code_ids") &&
                subthemes[i].node.at("code_ids").size() == 1) {
                singles.push_back(i);
            }
        }
        if (singles.size() >= 2) {
            const Item& a = subthemes[singles[0]];
            const Item& b = subthemes[singles[1]];
            std::string label = "Combined accounts around " + first_topic_token(a.label) +
                                " and " + first_topic_token(b.label);
            std::set<std::string> taken;
            for (const auto& s : subthemes) taken.insert(normalize_label(s.label));
            while (taken.count(normalize_label(label))) label += " more";
            json e;
            e["action"] = "merge";
            e["targets"] = json::array({a.id, b.id});
            e["label"] = label;
            e["description"] = "Merged pair of single-code groups with adjacent concerns.";
            e["justification"] = "inconsistent granularity: singleton subthemes";
            edits.push_back(e);
        }
    }

    // weak grounding: merge a thin theme into the best-supported theme
    if (themes.size() >= 2) {
        std::size_t strongest = 0;
        for (std::size_t i = 1; i < themes.size(); ++i) {
            if (themes[i].node.value("quote_count", 0) >
                themes[strongest].node.value("quote_count", 0)) {
                strongest = i;
            }
        }
        for (std::size_t i = 0; i < themes.size(); ++i) {
            if (i == strongest) continue;
            if (themes[i].node.value("quote_count", 0) < min_quotes) {
                json e;
                e["action"] = "merge";
                e["targets"] = json::array({themes[strongest].id, themes[i].id});
                e["label"] = themes[strongest].label;
                e["description"] = themes[strongest].node.value("description", "");
                e["justification"] = "weak grounding: theme supported by fewer than " +
                                     std::to_string(min_quotes) + " quotes";
                edits.push_back(e);
                break; // one structural repair per pass
            }
        }
    }

    // inconsistent granularity: split oversized subthemes in half
    for (const auto& s : subthemes) {
        if (!s.node.contains("code_ids")) continue;
        auto ids = s.node.at("code_ids");
        if (ids.size() > 10) {
            json part1 = json::array();
            json part2 = json::array();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                (i < ids.size() / 2 ? part1 : part2).push_back(ids[i]);
            }
            json e;
            e["action"] = "split";
            e["targets"] = json::array({s.id});
            json parts = json::array();
            json p1;
            p1["label"] = s.label + " primary aspects";
            p1["description"] = "First half of an oversized grouping, kept tightly scoped.";
            p1["children"] = part1;
            json p2;
            p2["label"] = s.label + " additional aspects";
            p2["description"] = "Second half of an oversized grouping, kept tightly scoped.";
            p2["children"] = part2;
            parts.push_back(p1);
            parts.push_back(p2);
            e["parts"] = parts;
            e["justification"] = "inconsistent granularity: oversized subtheme";
            edits.push_back(e);
            break;
        }
    }
    return edits.dump(2);
}

std::string respond_deductive(const CompletionRequest& req) {
    std::string menu_block = extract_between(req.prompt, "### MENU\n", "\n### END MENU");
    std::string text = extract_between(req.prompt, "### TEXT\n", "\n### END TEXT");
    int max_codes = extract_int_after(req.prompt, "up to", 20);
    auto menu = parse_id_lines(menu_block);
    // 5-char prefixes give a crude lemma match (argue/argued/argument)
    auto stem = [](const std::string& t) { return t.substr(0, 5); };
    std::set<std::string> chunk_stems;
    for (const auto& t : content_tokens(text)) {
        if (t.size() >= 4 && !filler_words().count(t)) chunk_stems.insert(stem(t));
    }

    struct Scored {
        std::string id;
        int score;
    };
    std::vector<Scored> scored;
    for (const auto& [id, label] : menu) {
        int overlap = 0;
        for (const auto& t : content_tokens(label)) {
            if (t.size() >= 4 && !filler_words().count(t) && chunk_stems.count(stem(t))) {
                ++overlap;
            }
        }
        if (overlap > 0) scored.push_back({id, overlap});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    SplitMix64 rng(request_seed(req));
    json arr = json::array();
    for (const auto& s : scored) {
        if (static_cast<int>(arr.size()) >= max_codes) break;
        if (rng.bounded(8) == 0) continue; // deterministic thinning
        arr.push_back(s.id);
    }
    return arr.dump();
}

std::string respond_judge(const CompletionRequest& req) {
    SplitMix64 rng(request_seed(req));
    json j;
    j["score"] = static_cast<int>(1 + rng.bounded(10));
    return j.dump();
}

class MockChatBackend final : public ChatBackend {
public:
    CompletionResult complete(const CompletionRequest& request) override {
        CompletionResult result;
        switch (request.role) {
            case RoleTag::coder: result.text = respond_coder(request); break;
            case RoleTag::relation_classifier: result.text = respond_relation(request); break;
            case RoleTag::subtheme_synthesizer: result.text = respond_subthemes(request); break;
            case RoleTag::theme_synthesizer: result.text = respond_themes(request); break;
            case RoleTag::reviewer: result.text = respond_reviewer(request); break;
            case RoleTag::deductive_coder: result.text = respond_deductive(request); break;
            case RoleTag::judge_fitness:
            case RoleTag::judge_coverage: result.text = respond_judge(request); break;
        }
        result.backend_id = id();
        result.attempt_count = 1;
        result.usage.prompt_tokens = static_cast<int>(word_count(request.prompt));
        result.usage.completion_tokens = static_cast<int>(word_count(result.text));
        return result;
    }

    std::string id() const override { return "mock"; }
};

} // namespace

std::unique_ptr<ChatBackend> make_mock_backend() {
    return std::make_unique<MockChatBackend>();
}

} // namespace themis::llm
