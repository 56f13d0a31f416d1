#pragma once

// Brute-force ranking oracle, written against the weighting definitions and
// kept independent of the engine: document totals and document frequencies by
// direct summation over the corpus, weights per key, full sort, then a linear
// rank-numbering pass. Only the arithmetic expressions are shared vocabulary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "footprint/feature.hpp"
#include "footprint/rank.hpp"

namespace oracle {

struct Row {
    std::string key;
    std::uint64_t count;
    std::size_t df;
    double weight;
    std::size_t rank;
};

inline std::vector<Row> rank(const std::vector<footprint::FeatureDocument>& corpus,
                             const std::string& infected_id,
                             const footprint::RankingConfig& config) {
    using footprint::IdfMode;
    using footprint::LogBase;
    using footprint::TfMode;

    const footprint::FeatureDocument* infected = nullptr;
    for (const auto& doc : corpus) {
        if (doc.id == infected_id) infected = &doc;
    }

    double total = 0;
    for (const auto& [key, count] : infected->bag) {
        total += static_cast<double>(count);
    }

    std::vector<Row> rows;
    for (const auto& [key, count] : infected->bag) {
        std::size_t df = 0;
        for (const auto& doc : corpus) {
            for (const auto& [other_key, other_count] : doc.bag) {
                if (other_key == key) {
                    ++df;
                    break;
                }
            }
        }
        const double tf = config.tf_mode == TfMode::raw_count
                              ? static_cast<double>(count)
                              : static_cast<double>(count) / total;
        const double denominator = config.idf_mode == IdfMode::unsmoothed
                                       ? static_cast<double>(df)
                                       : static_cast<double>(df) + 1.0;
        const double ratio = static_cast<double>(corpus.size()) / denominator;
        const double idf = config.log_base == LogBase::natural
                               ? std::log(ratio)
                               : std::log10(ratio);
        rows.push_back({key, count, df, tf * idf, 0});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.key < b.key;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rank =
            (i > 0 && rows[i].weight == rows[i - 1].weight) ? rows[i - 1].rank : i + 1;
    }
    return rows;
}

} // namespace oracle
