#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "footprint/rank.hpp"

namespace footprint {

/// Analyst-facing summary of a ranking run: the top tiers with the factor
/// breakdown behind every weight.
struct RankingReport {
    std::string generated_at;  // ISO-8601
    struct ConfigEcho {
        std::string preset;
        TfMode tf_mode = TfMode::raw_count;
        IdfMode idf_mode = IdfMode::unsmoothed;
        LogBase log_base = LogBase::natural;
    } config;
    struct CorpusSummary {
        std::size_t n_docs = 0;
        std::string infected_id;
    } corpus;
    std::vector<RankTier> tiers;

    std::size_t feature_count() const;
};

struct ReportContext {
    RankingConfig config;
    std::size_t n_docs = 0;
    std::string infected_id;
    std::string generated_at;  // pass a fixed value for reproducible output
};

/// Keep the top_k highest rank tiers (the whole ranking when it has fewer).
RankingReport explain_ranking(std::span<const RankedFeature> ranked,
                              std::size_t top_k, const ReportContext& context);

enum class OutputFormat { json, csv, table };

/// Serialize a report. json is canonical (sorted keys, full precision); csv
/// has header "rank,weight,count,df,tf,idf,feature" with RFC-4180 quoting and
/// round-trippable numbers; table is fixed-width text with weights rounded to
/// two decimals. Pure function of (report, format).
std::string emit(const RankingReport& report, OutputFormat format);

OutputFormat output_format_from_string(const std::string& name);

/// Current time as ISO-8601 UTC, e.g. "2026-01-02T03:04:05Z".
std::string iso8601_now();

} // namespace footprint
