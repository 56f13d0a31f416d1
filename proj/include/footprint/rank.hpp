#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "footprint/feature.hpp"

namespace footprint {

enum class TfMode { raw_count, length_normalized };
enum class IdfMode { unsmoothed, plus_one_smoothed };
enum class LogBase { natural, base10 };

/// Weighting convention. Two presets are provided:
///   paper_consistent: raw count x log(N/df), natural log. This is the
///     convention that actually reproduces published WannaCry weight tables
///     (their weights are integer multiples of ln 5 and ln(5/df)).
///   paper_stated: length-normalized tf x log(N/(1+df)), natural log — the
///     formula as usually printed. Its weights are bounded by ln(N/2) and
///     cannot reach the published magnitudes; kept as an explicit option.
/// Ties are always broken lexicographically within a tier.
struct RankingConfig {
    TfMode tf_mode = TfMode::raw_count;
    IdfMode idf_mode = IdfMode::unsmoothed;
    LogBase log_base = LogBase::natural;
    std::string preset = "paper-consistent";

    static RankingConfig paper_consistent();
    static RankingConfig paper_stated();
    static RankingConfig custom(TfMode tf, IdfMode idf, LogBase base);
};

struct RankedFeature {
    FeatureKey key;
    std::uint64_t count = 0;  // occurrences in the infected document
    std::size_t df = 0;       // corpus documents containing the key
    double tf = 0.0;
    double idf = 0.0;
    double weight = 0.0;
    std::size_t rank = 0;     // equal weights share a rank; next rank skips
};

/// raw_count returns the count unchanged; length_normalized returns
/// count/doc_total. Throws EmptyDocument when normalizing over an empty
/// document.
double term_frequency(std::uint64_t count, std::uint64_t doc_total, TfMode mode);

/// unsmoothed: log(n_docs/df); plus_one_smoothed: log(n_docs/(1+df)). May be
/// zero or negative (a term in every document carries no information).
/// Throws DomainError unless 1 <= df <= n_docs.
double inverse_document_frequency(std::size_t df, std::size_t n_docs,
                                  IdfMode mode, LogBase base);

double tfidf_weight(std::uint64_t count, std::uint64_t doc_total,
                    std::size_t df, std::size_t n_docs,
                    const RankingConfig& config);

/// Rank every feature of the infected document against the corpus: weight
/// descending, ties lexicographic, equal weights sharing one rank number
/// (competition ranking). df counts the whole corpus, infected document
/// included. Throws UnknownInfectedId / CorpusTooSmall (< 2 documents).
std::vector<RankedFeature> rank_features(std::span<const FeatureDocument> corpus,
                                         const std::string& infected_id,
                                         const RankingConfig& config);

/// One rank tier: all features sharing a weight, lexicographically sorted.
struct RankTier {
    std::size_t rank = 0;
    double weight = 0.0;
    std::vector<RankedFeature> features;
};

/// Group a ranking into its tiers (every tier, in rank order).
std::vector<RankTier> group_tiers(std::span<const RankedFeature> ranked);

} // namespace footprint
