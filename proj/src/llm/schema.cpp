#include "themis/llm/gateway.hpp"

#include "themis/errors.hpp"

namespace themis::llm {

const char* role_name(RoleTag role) {
    switch (role) {
        case RoleTag::coder: return "coder";
        case RoleTag::relation_classifier: return "relation_classifier";
        case RoleTag::subtheme_synthesizer: return "subtheme_synthesizer";
        case RoleTag::theme_synthesizer: return "theme_synthesizer";
        case RoleTag::reviewer: return "reviewer";
        case RoleTag::deductive_coder: return "deductive_coder";
        case RoleTag::judge_fitness: return "judge_fitness";
        case RoleTag::judge_coverage: return "judge_coverage";
    }
    return "?";
}

bool is_judge_role(RoleTag role) {
    return role == RoleTag::judge_fitness || role == RoleTag::judge_coverage;
}

namespace {

// Returns the first balanced JSON object/array in the text, tolerant of
// surrounding prose and ``` fences.
std::optional<std::string> extract_first_json(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        char open = text[i];
        if (open != '{' && open != '[') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t j = i; j < text.size(); ++j) {
            char c = text[j];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{' || c == '[') {
                ++depth;
            } else if (c == '}' || c == ']') {
                --depth;
                if (depth == 0) return text.substr(i, j - i + 1);
            }
        }
    }
    return std::nullopt;
}

void require(bool ok, const std::string& what) {
    if (!ok) raise(Errc::malformed_response, what);
}

void validate_string_field(const json& j, const char* field) {
    require(j.contains(field) && j.at(field).is_string() &&
                !j.at(field).get<std::string>().empty(),
            std::string("missing or empty field '") + field + "'");
}

void validate_id_array(const json& j, const char* field) {
    require(j.contains(field) && j.at(field).is_array(), std::string("expected array '") + field + "'");
    for (const auto& e : j.at(field)) {
        require(e.is_string(), std::string("non-string entry in '") + field + "'");
    }
}

json validate(const json& j, SchemaTag tag) {
    switch (tag) {
        case SchemaTag::code_list: {
            require(j.is_array() && !j.empty(), "code_list must be a non-empty array");
            for (const auto& item : j) {
                require(item.is_object(), "code_list entries must be objects");
                validate_string_field(item, "label");
                validate_string_field(item, "description");
                require(item.contains("quotes") && item.at("quotes").is_array() &&
                            !item.at("quotes").empty(),
                        "code_list entry needs a non-empty quotes array");
                for (const auto& q : item.at("quotes")) {
                    require(q.is_string(), "quotes must be strings");
                }
            }
            return j;
        }
        case SchemaTag::relation_label: {
            require(j.is_object() && j.contains("relation") && j.at("relation").is_string(),
                    "relation_label must be {\"relation\": ...}");
            std::string r = j.at("relation").get<std::string>();
            require(r == "equivalent" || r == "subordinate" || r == "reverse" ||
                        r == "orthogonal",
                    "unknown relation '" + r + "'");
            return j;
        }
        case SchemaTag::subtheme_list: {
            require(j.is_array() && !j.empty(), "subtheme_list must be a non-empty array");
            for (const auto& item : j) {
                require(item.is_object(), "subtheme_list entries must be objects");
                validate_string_field(item, "label");
                validate_string_field(item, "description");
                validate_id_array(item, "code_ids");
            }
            return j;
        }
        case SchemaTag::theme_list: {
            require(j.is_array() && !j.empty(), "theme_list must be a non-empty array");
            for (const auto& item : j) {
                require(item.is_object(), "theme_list entries must be objects");
                validate_string_field(item, "label");
                validate_string_field(item, "description");
                validate_id_array(item, "subtheme_ids");
            }
            return j;
        }
        case SchemaTag::edit_list: {
            require(j.is_array(), "edit_list must be an array");
            for (const auto& item : j) {
                require(item.is_object(), "edit_list entries must be objects");
                validate_string_field(item, "action");
                std::string a = item.at("action").get<std::string>();
                require(a == "generate" || a == "merge" || a == "split" || a == "revise" ||
                            a == "move" || a == "delete",
                        "unknown edit action '" + a + "'");
            }
            return j;
        }
        case SchemaTag::assignment_list: {
            require(j.is_array(), "assignment_list must be an array");
            for (const auto& e : j) {
                require(e.is_string(), "assignment_list entries must be code ids/labels");
            }
            return j;
        }
        case SchemaTag::judge_score: {
            require(j.is_object() && j.contains("score"), "judge_score must be {\"score\": n}");
            const json& s = j.at("score");
            require(s.is_number_integer(), "score must be an integer");
            int v = s.get<int>();
            require(v >= 1 && v <= 10, "score " + std::to_string(v) + " outside 1..10");
            return j;
        }
    }
    raise(Errc::malformed_response, "unknown schema tag");
}

} // namespace

json parse_structured(const std::string& text, SchemaTag tag) {
    auto blob = extract_first_json(text);
    if (!blob) raise(Errc::malformed_response, "no JSON value found in response");
    json parsed;
    try {
        parsed = json::parse(*blob);
    } catch (const json::exception& ex) {
        raise(Errc::malformed_response, std::string("JSON parse failed: ") + ex.what());
    }
    return validate(parsed, tag);
}

} // namespace themis::llm
