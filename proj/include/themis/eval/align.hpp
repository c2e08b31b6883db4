#pragma once

#include "themis/embed/embedder.hpp"

#include <string>
#include <vector>

namespace themis::eval {

struct ThemeText {
    std::string label;
    std::string description;
};

struct AlignmentRow {
    std::string generated_label;
    std::string human_label;
    double similarity = 0.0;
};

struct AlignmentReport {
    std::vector<AlignmentRow> rows; // sorted by descending similarity
    double mean_similarity = 0.0;
};

// For every generated theme ("label. description" embedded), the argmax-
// cosine human theme. Throws EmptyThemeList when either side is empty.
AlignmentReport theme_alignment(embed::Embedder& embedder,
                                const std::vector<ThemeText>& generated,
                                const std::vector<ThemeText>& human);

} // namespace themis::eval
