#include "footprint/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "footprint/corpus.hpp"
#include "footprint/errors.hpp"
#include "footprint/feature.hpp"
#include "footprint/ingest.hpp"
#include "footprint/rank.hpp"
#include "footprint/report.hpp"
#include "footprint/synth.hpp"

namespace footprint::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kFixedClockValue = "1970-01-01T00:00:00Z";

struct IngestArgs {
    std::string report_path;
    std::string out_path;
    std::string id;
    std::string label = "ambient";
    std::string cutoff_pattern = CutoffSpec{}.pattern;
    bool no_cutoff = false;
};

struct RankArgs {
    std::vector<std::string> infected;
    std::string corpus_dir;
    std::string preset = "paper-consistent";
    std::string tf;
    std::string idf;
    std::string log_base;
    std::size_t top = 0;
    std::string format = "table";
    std::string out_path;
    bool fixed_clock = false;
};

struct SynthArgs {
    std::string profile;
    std::uint64_t seed = 0;
    std::uint64_t scale = 1;
    std::string emit = "fdoc";
    std::string out_path;
};

void write_output(const std::string& path, const std::string& bytes,
                  std::ostream& stdout_stream) {
    if (path.empty() || path == "-") {
        stdout_stream << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write '" + path + "'");
    out << bytes;
    if (!out.flush()) throw IoFailure("short write to '" + path + "'");
}

int run_ingest(const IngestArgs& args, std::ostream& out) {
    std::ifstream report(args.report_path, std::ios::binary);
    if (!report) throw MissingFile("cannot open '" + args.report_path + "'");

    CutoffSpec cutoff;
    if (args.no_cutoff) {
        cutoff = CutoffSpec::none();
    } else {
        cutoff.pattern = args.cutoff_pattern;
    }
    std::string id = args.id;
    if (id.empty()) id = fs::path(args.report_path).stem().string();

    StreamingDocumentBuilder builder(cutoff, id, label_from_string(args.label));
    IngestOptions options;
    options.source_path = args.report_path;
    const ReportMeta meta =
        parse_report(report, options, [&builder](LogEvent&& event) {
            if (is_ranked_behavior(event)) builder.push(event);
        });
    const FeatureDocument doc = builder.finish();
    write_fdoc_file(doc, args.out_path);
    out << "ingested " << meta.event_count << " events (" << meta.skipped_count
        << " skipped) -> " << args.out_path << ": " << doc.bag.size()
        << " features, " << doc.total() << " occurrences\n";
    return kExitOk;
}

RankingConfig resolve_config(const RankArgs& args) {
    RankingConfig config = args.preset == "paper-stated"
                               ? RankingConfig::paper_stated()
                               : RankingConfig::paper_consistent();
    if (args.preset != "paper-consistent" && args.preset != "paper-stated") {
        throw DomainError("unknown preset '" + args.preset + "'");
    }
    bool customized = false;
    if (!args.tf.empty()) {
        config.tf_mode = args.tf == "raw" ? TfMode::raw_count
                                          : TfMode::length_normalized;
        customized = true;
    }
    if (!args.idf.empty()) {
        config.idf_mode = args.idf == "unsmoothed" ? IdfMode::unsmoothed
                                                   : IdfMode::plus_one_smoothed;
        customized = true;
    }
    if (!args.log_base.empty()) {
        config.log_base = args.log_base == "10" ? LogBase::base10
                                                : LogBase::natural;
        customized = true;
    }
    if (customized) config.preset = "custom";
    return config;
}

int run_rank(const RankArgs& args, std::ostream& out) {
    if (args.corpus_dir.empty()) {
        throw MissingFile("no corpus directory given (--corpus or FOOTPRINT_CORPUS)");
    }
    std::vector<FeatureDocument> corpus = corpus_load(args.corpus_dir);

    // each --infected is either a document file or the id of a corpus member
    std::vector<FeatureDocument> standalone;
    std::vector<std::string> member_ids;
    for (const std::string& ref : args.infected) {
        if (fs::exists(ref) && fs::is_regular_file(ref)) {
            standalone.push_back(load_fdoc_file(ref));
        } else {
            bool found = false;
            for (const auto& doc : corpus) found = found || doc.id == ref;
            if (!found) {
                throw UnknownInfectedId("'" + ref +
                                        "' is neither a file nor a corpus id");
            }
            member_ids.push_back(ref);
        }
    }

    std::string infected_id;
    if (standalone.empty() && member_ids.size() == 1) {
        infected_id = member_ids.front();
    } else {
        // pull referenced members out of the corpus and merge everything
        std::vector<FeatureDocument> parts = std::move(standalone);
        for (const std::string& id : member_ids) {
            auto it = std::find_if(corpus.begin(), corpus.end(),
                                   [&id](const auto& d) { return d.id == id; });
            parts.push_back(std::move(*it));
            corpus.erase(it);
        }
        FeatureDocument merged;
        if (parts.size() == 1) {
            merged = std::move(parts.front());
        } else {
            std::string merged_id;
            for (const auto& part : parts) {
                if (!merged_id.empty()) merged_id += "+";
                merged_id += part.id;
            }
            merged = merge_documents(parts, merged_id);
        }
        merged.label = DocLabel::infected;
        infected_id = merged.id;
        for (const auto& doc : corpus) {
            if (doc.id == infected_id) {
                throw DuplicateDocId("corpus already holds a document with id '" +
                                     infected_id + "'");
            }
        }
        corpus.push_back(std::move(merged));
    }

    const RankingConfig config = resolve_config(args);
    const auto ranked = rank_features(corpus, infected_id, config);

    ReportContext context;
    context.config = config;
    context.n_docs = corpus.size();
    context.infected_id = infected_id;
    context.generated_at = args.fixed_clock ? kFixedClockValue : iso8601_now();

    const std::size_t top_k = args.top == 0 ? std::max<std::size_t>(ranked.size(), 1)
                                            : args.top;
    const RankingReport report = explain_ranking(ranked, top_k, context);
    write_output(args.out_path, emit(report, output_format_from_string(args.format)),
                 out);
    return kExitOk;
}

int run_synth(const SynthArgs& args, std::ostream& out) {
    SynthProfile profile;
    profile.kind = profile_kind_from_string(args.profile);
    profile.seed = args.seed;
    profile.scale = args.scale;

    if (args.emit == "report") {
        profile.emit = EmitMode::full_report;
        if (args.out_path.empty() || args.out_path == "-") {
            generate_report(profile, out);
            return kExitOk;
        }
        std::ofstream file(args.out_path, std::ios::binary | std::ios::trunc);
        if (!file) throw IoFailure("cannot write '" + args.out_path + "'");
        generate_report(profile, file);
        if (!file.flush()) throw IoFailure("short write to '" + args.out_path + "'");
        return kExitOk;
    }
    if (args.emit != "fdoc") {
        throw DomainError("unknown emit mode '" + args.emit + "'");
    }
    const FeatureDocument doc = generate_document(profile);
    if (args.out_path.empty() || args.out_path == "-") {
        out << to_fdoc_json(doc);
    } else {
        write_fdoc_file(doc, args.out_path);
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream&, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"footprint: mine and rank discriminative behavioral features "
                 "from sandbox/host logs"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "Parse a sandbox report into a feature document");
    ingest_cmd->add_option("report", ingest_args.report_path, "report file")
        ->required();
    ingest_cmd->add_option("--out", ingest_args.out_path, "output .fdoc path")
        ->required();
    ingest_cmd->add_option("--id", ingest_args.id, "document id");
    ingest_cmd->add_option("--label", ingest_args.label, "infected|ambient")
        ->check(CLI::IsMember({"infected", "ambient"}));
    auto* pattern_opt = ingest_cmd->add_option("--cutoff-pattern",
                                               ingest_args.cutoff_pattern,
                                               "pre-encryption cutoff substring");
    ingest_cmd->add_flag("--no-cutoff", ingest_args.no_cutoff,
                         "keep the whole stream")
        ->excludes(pattern_opt);

    std::string corpus_dir_add;
    std::string fdoc_path_add;
    auto* corpus_add_cmd =
        app.add_subcommand("corpus-add", "Add a feature document to a corpus");
    corpus_add_cmd->add_option("corpus-dir", corpus_dir_add, "corpus directory")
        ->required();
    corpus_add_cmd->add_option("fdoc", fdoc_path_add, ".fdoc file")->required();

    std::string corpus_dir_list;
    auto* corpus_list_cmd =
        app.add_subcommand("corpus-list", "List the documents of a corpus");
    corpus_list_cmd->add_option("corpus-dir", corpus_dir_list, "corpus directory")
        ->required();

    std::string corpus_dir_rm;
    std::string doc_id_rm;
    auto* corpus_rm_cmd =
        app.add_subcommand("corpus-rm", "Remove a document from a corpus");
    corpus_rm_cmd->add_option("corpus-dir", corpus_dir_rm, "corpus directory")
        ->required();
    corpus_rm_cmd->add_option("id", doc_id_rm, "document id")->required();

    RankArgs rank_args;
    if (const char* env = std::getenv("FOOTPRINT_CORPUS")) {
        rank_args.corpus_dir = env;
    }
    auto* rank_cmd = app.add_subcommand(
        "rank", "Rank the infected document's features against a corpus");
    rank_cmd->add_option("--infected", rank_args.infected,
                         ".fdoc file or corpus document id (repeatable)")
        ->required();
    rank_cmd->add_option("--corpus", rank_args.corpus_dir, "corpus directory");
    rank_cmd->add_option("--preset", rank_args.preset,
                         "paper-consistent|paper-stated")
        ->check(CLI::IsMember({"paper-consistent", "paper-stated"}));
    rank_cmd->add_option("--tf", rank_args.tf, "raw|normalized")
        ->check(CLI::IsMember({"raw", "normalized"}));
    rank_cmd->add_option("--idf", rank_args.idf, "unsmoothed|smoothed")
        ->check(CLI::IsMember({"unsmoothed", "smoothed"}));
    rank_cmd->add_option("--log-base", rank_args.log_base, "e|10")
        ->check(CLI::IsMember({"e", "10"}));
    rank_cmd->add_option("--top", rank_args.top, "number of rank tiers to keep");
    rank_cmd->add_option("--format", rank_args.format, "json|csv|table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    rank_cmd->add_option("--out", rank_args.out_path, "output path (default stdout)");
    rank_cmd->add_flag("--fixed-clock", rank_args.fixed_clock,
                       "freeze generated_at for reproducible output");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand(
        "synth", "Generate a synthetic feature document or sandbox report");
    synth_cmd->add_option("--profile", synth_args.profile,
                          "wannacry|ambient-browsing|ambient-fileio|"
                          "ambient-email|ambient-flights|mixed-flights-wannacry")
        ->required();
    synth_cmd->add_option("--seed", synth_args.seed, "generator seed");
    synth_cmd->add_option("--scale", synth_args.scale, "event volume multiplier")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--emit", synth_args.emit, "fdoc|report")
        ->check(CLI::IsMember({"fdoc", "report"}));
    synth_cmd->add_option("--out", synth_args.out_path, "output path")->required();

    auto* version_cmd = app.add_subcommand("version", "Print the tool version");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (ingest_cmd->parsed()) return run_ingest(ingest_args, out);
        if (corpus_add_cmd->parsed()) {
            const FeatureDocument doc = load_fdoc_file(fdoc_path_add);
            const CorpusManifest manifest = corpus_add(corpus_dir_add, doc);
            out << "added '" << doc.id << "' (" << manifest.count()
                << " documents in corpus)\n";
            return kExitOk;
        }
        if (corpus_list_cmd->parsed()) {
            const CorpusManifest manifest = corpus_manifest(corpus_dir_list);
            out << "corpus '" << manifest.name << "': " << manifest.count()
                << " documents\n";
            for (const auto& entry : manifest.entries) {
                out << entry.doc_id << "\t" << to_string(entry.label) << "\t"
                    << entry.digest.substr(0, 12) << "\t" << entry.added_at
                    << "\n";
            }
            return kExitOk;
        }
        if (corpus_rm_cmd->parsed()) {
            const CorpusManifest manifest = corpus_remove(corpus_dir_rm, doc_id_rm);
            out << "removed '" << doc_id_rm << "' (" << manifest.count()
                << " documents remain)\n";
            return kExitOk;
        }
        if (rank_cmd->parsed()) return run_rank(rank_args, out);
        if (synth_cmd->parsed()) return run_synth(synth_args, out);
        if (version_cmd->parsed()) {
            out << "footprint " << kVersion << "\n";
            return kExitOk;
        }
        err << "usage error: no subcommand given\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.name() << ": " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace footprint::cli
