#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace themis {

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Collapses any run of whitespace to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Whitespace-delimited word count.
std::size_t word_count(std::string_view s);

// Whitespace-delimited tokens, in order.
std::vector<std::string> split_words(std::string_view s);

// Lowercased alphanumeric tokens (punctuation stripped), in order.
std::vector<std::string> content_tokens(std::string_view s);

// Label normalization used for code dedup: lowercase, collapse whitespace,
// strip terminal punctuation.
std::string normalize_label(std::string_view label);

// Jaccard similarity of the two strings' token sets (normalized tokens).
double token_jaccard(std::string_view a, std::string_view b);

// Locates `needle` inside `hay` comparing with runs of whitespace collapsed,
// returning the matching raw [begin, end) span in `hay`.
std::optional<std::pair<std::size_t, std::size_t>> find_normalized(std::string_view hay,
                                                                   std::string_view needle);

// [begin, end) spans covering `text` completely, split after sentence
// terminators (.!?) that are followed by whitespace or end of text.
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text);

// Truncate to at most `hi` words; if below `lo`, append words cycled from
// `pad_source` (or a built-in filler when empty).
std::string fit_word_count(std::string_view text, std::size_t lo, std::size_t hi,
                           const std::vector<std::string>& pad_source = {});

// Whitespace tokens with their raw [begin, end) offsets.
struct TokenSpan {
    std::size_t begin;
    std::size_t end;
};
std::vector<TokenSpan> token_spans(std::string_view text);

} // namespace themis
