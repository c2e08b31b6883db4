#include "themis/eval/align.hpp"

#include "themis/errors.hpp"

#include <algorithm>

namespace themis::eval {

AlignmentReport theme_alignment(embed::Embedder& embedder,
                                const std::vector<ThemeText>& generated,
                                const std::vector<ThemeText>& human) {
    if (generated.empty() || human.empty()) {
        raise(Errc::empty_theme_list, "theme alignment needs both theme lists non-empty");
    }
    auto rep = [&](const ThemeText& t) {
        return embedder.embed(t.label + ". " + t.description);
    };
    std::vector<embed::Embedding> human_reps;
    human_reps.reserve(human.size());
    for (const auto& h : human) human_reps.push_back(rep(h));

    AlignmentReport report;
    double sum = 0.0;
    for (const auto& g : generated) {
        embed::Embedding ge = rep(g);
        std::size_t best = 0;
        double best_sim = -2.0;
        for (std::size_t i = 0; i < human_reps.size(); ++i) {
            double sim = embed::cosine(ge, human_reps[i]);
            if (sim > best_sim) {
                best_sim = sim;
                best = i;
            }
        }
        report.rows.push_back({g.label, human[best].label, best_sim});
        sum += best_sim;
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const AlignmentRow& a, const AlignmentRow& b) {
                         return a.similarity > b.similarity;
                     });
    report.mean_similarity = sum / static_cast<double>(generated.size());
    return report;
}

} // namespace themis::eval
