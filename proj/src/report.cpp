#include "footprint/report.hpp"

#include <cstdio>
#include <ctime>
#include <sstream>

#include <nlohmann/json.hpp>

#include "footprint/errors.hpp"

namespace footprint {

using nlohmann::json;

namespace {

const char* to_string(TfMode mode) {
    return mode == TfMode::raw_count ? "raw-count" : "length-normalized";
}
const char* to_string(IdfMode mode) {
    return mode == IdfMode::unsmoothed ? "unsmoothed" : "plus-one-smoothed";
}
const char* to_string(LogBase base) {
    return base == LogBase::natural ? "natural" : "base10";
}

// Shortest decimal form that parses back to the same double.
std::string number_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += '"';
    return quoted;
}

std::string emit_json(const RankingReport& report) {
    json tiers = json::array();
    for (const auto& tier : report.tiers) {
        json features = json::array();
        for (const auto& f : tier.features) {
            features.push_back({
                {"key", f.key},
                {"count", f.count},
                {"df", f.df},
                {"tf", f.tf},
                {"idf", f.idf},
            });
        }
        tiers.push_back({
            {"rank", tier.rank},
            {"weight", tier.weight},
            {"features", features},
        });
    }
    const json root = {
        {"generated_at", report.generated_at},
        {"config",
         {{"preset", report.config.preset},
          {"tf", to_string(report.config.tf_mode)},
          {"idf", to_string(report.config.idf_mode)},
          {"log_base", to_string(report.config.log_base)}}},
        {"corpus",
         {{"n_docs", report.corpus.n_docs},
          {"infected_id", report.corpus.infected_id}}},
        {"tiers", tiers},
    };
    return root.dump(2) + "\n";
}

std::string emit_csv(const RankingReport& report) {
    std::string out = "rank,weight,count,df,tf,idf,feature\n";
    for (const auto& tier : report.tiers) {
        for (const auto& f : tier.features) {
            out += std::to_string(tier.rank);
            out += ',';
            out += number_exact(f.weight);
            out += ',';
            out += std::to_string(f.count);
            out += ',';
            out += std::to_string(f.df);
            out += ',';
            out += number_exact(f.tf);
            out += ',';
            out += number_exact(f.idf);
            out += ',';
            out += csv_quote(f.key);
            out += '\n';
        }
    }
    return out;
}

std::string emit_table(const RankingReport& report) {
    std::ostringstream out;
    char line[128];
    out << "# ranked features, corpus of " << report.corpus.n_docs
        << " documents, infected: " << report.corpus.infected_id << " ("
        << report.config.preset << ")\n";
    std::snprintf(line, sizeof line, "%5s  %10s  %8s  %4s  %s\n", "rank",
                  "weight", "count", "df", "feature");
    out << line;
    out << "-----  ----------  --------  ----  -------\n";
    for (const auto& tier : report.tiers) {
        for (const auto& f : tier.features) {
            std::snprintf(line, sizeof line, "%5zu  %10.2f  %8llu  %4zu  ",
                          tier.rank, tier.weight,
                          static_cast<unsigned long long>(f.count), f.df);
            out << line << f.key << "\n";
        }
    }
    return out.str();
}

} // namespace

std::size_t RankingReport::feature_count() const {
    std::size_t n = 0;
    for (const auto& tier : tiers) n += tier.features.size();
    return n;
}

RankingReport explain_ranking(std::span<const RankedFeature> ranked,
                              std::size_t top_k, const ReportContext& context) {
    if (top_k < 1) throw DomainError("top_k must be at least 1");
    RankingReport report;
    report.generated_at = context.generated_at;
    report.config.preset = context.config.preset;
    report.config.tf_mode = context.config.tf_mode;
    report.config.idf_mode = context.config.idf_mode;
    report.config.log_base = context.config.log_base;
    report.corpus.n_docs = context.n_docs;
    report.corpus.infected_id = context.infected_id;

    report.tiers = group_tiers(ranked);
    if (report.tiers.size() > top_k) report.tiers.resize(top_k);
    return report;
}

std::string emit(const RankingReport& report, OutputFormat format) {
    switch (format) {
    case OutputFormat::json: return emit_json(report);
    case OutputFormat::csv: return emit_csv(report);
    case OutputFormat::table: return emit_table(report);
    }
    return {};
}

OutputFormat output_format_from_string(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    if (name == "table") return OutputFormat::table;
    throw DomainError("unknown output format '" + name + "'");
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

} // namespace footprint
