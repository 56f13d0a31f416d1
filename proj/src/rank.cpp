#include "footprint/rank.hpp"

#include <algorithm>
#include <cmath>

#include "footprint/errors.hpp"

namespace footprint {

RankingConfig RankingConfig::paper_consistent() {
    return {TfMode::raw_count, IdfMode::unsmoothed, LogBase::natural,
            "paper-consistent"};
}

RankingConfig RankingConfig::paper_stated() {
    return {TfMode::length_normalized, IdfMode::plus_one_smoothed,
            LogBase::natural, "paper-stated"};
}

RankingConfig RankingConfig::custom(TfMode tf, IdfMode idf, LogBase base) {
    return {tf, idf, base, "custom"};
}

double term_frequency(std::uint64_t count, std::uint64_t doc_total, TfMode mode) {
    if (mode == TfMode::raw_count) return static_cast<double>(count);
    if (doc_total == 0) {
        throw EmptyDocument("cannot length-normalize over an empty document");
    }
    return static_cast<double>(count) / static_cast<double>(doc_total);
}

double inverse_document_frequency(std::size_t df, std::size_t n_docs,
                                  IdfMode mode, LogBase base) {
    if (n_docs < 1 || df < 1 || df > n_docs) {
        throw DomainError("idf requires 1 <= df <= n_docs, got df=" +
                          std::to_string(df) + " n_docs=" + std::to_string(n_docs));
    }
    const double denominator =
        mode == IdfMode::unsmoothed ? static_cast<double>(df)
                                    : static_cast<double>(df + 1);
    const double ratio = static_cast<double>(n_docs) / denominator;
    return base == LogBase::natural ? std::log(ratio) : std::log10(ratio);
}

double tfidf_weight(std::uint64_t count, std::uint64_t doc_total, std::size_t df,
                    std::size_t n_docs, const RankingConfig& config) {
    return term_frequency(count, doc_total, config.tf_mode) *
           inverse_document_frequency(df, n_docs, config.idf_mode, config.log_base);
}

std::vector<RankedFeature> rank_features(std::span<const FeatureDocument> corpus,
                                         const std::string& infected_id,
                                         const RankingConfig& config) {
    if (corpus.size() < 2) {
        throw CorpusTooSmall("ranking needs at least 2 documents, got " +
                             std::to_string(corpus.size()));
    }
    const FeatureDocument* infected = nullptr;
    for (const auto& doc : corpus) {
        if (doc.id == infected_id) {
            if (infected) {
                throw DuplicateSourceId("corpus holds two documents with id '" +
                                        infected_id + "'");
            }
            infected = &doc;
        }
    }
    if (!infected) {
        throw UnknownInfectedId("no corpus document has id '" + infected_id + "'");
    }

    const std::uint64_t doc_total = infected->total();
    const std::size_t n_docs = corpus.size();

    std::vector<RankedFeature> ranked;
    ranked.reserve(infected->bag.size());
    for (const auto& [key, count] : infected->bag) {
        RankedFeature feature;
        feature.key = key;
        feature.count = count;
        for (const auto& doc : corpus) {
            if (doc.bag.count(key) > 0) ++feature.df;
        }
        feature.tf = term_frequency(count, doc_total, config.tf_mode);
        feature.idf = inverse_document_frequency(feature.df, n_docs,
                                                 config.idf_mode, config.log_base);
        feature.weight = feature.tf * feature.idf;
        ranked.push_back(std::move(feature));
    }

    std::sort(ranked.begin(), ranked.end(),
              [](const RankedFeature& a, const RankedFeature& b) {
                  if (a.weight != b.weight) return a.weight > b.weight;
                  return a.key < b.key;
              });

    // Competition ranking: equal weights share a rank, the next rank skips by
    // the size of the tie group. Equality is exact on the computed doubles.
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i > 0 && ranked[i].weight == ranked[i - 1].weight) {
            ranked[i].rank = ranked[i - 1].rank;
        } else {
            ranked[i].rank = i + 1;
        }
    }
    return ranked;
}

std::vector<RankTier> group_tiers(std::span<const RankedFeature> ranked) {
    std::vector<RankTier> tiers;
    for (const auto& feature : ranked) {
        if (tiers.empty() || tiers.back().rank != feature.rank) {
            tiers.push_back({feature.rank, feature.weight, {}});
        }
        tiers.back().features.push_back(feature);
    }
    return tiers;
}

} // namespace footprint
