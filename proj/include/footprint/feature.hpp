#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "footprint/log_event.hpp"

namespace footprint {

/// Canonical term string identifying log entries that are equal in every
/// field except time and event id. Always lowercase, edge-trimmed, free of
/// control characters, and prefixed "enhanced:_object=" or "bigram:_api=".
using FeatureKey = std::string;

enum class DocLabel { infected, ambient };

/// Bag-of-words view of one log stream: canonical key -> occurrence count.
struct FeatureDocument {
    std::string id;
    DocLabel label = DocLabel::ambient;
    std::map<FeatureKey, std::uint64_t> bag;

    struct Meta {
        std::vector<std::string> source_ids;
        bool cutoff_applied = false;
        std::optional<std::int64_t> cutoff_eid;
        std::uint64_t skipped_events = 0;  // canonicalization rejections
    } meta;

    std::uint64_t total() const;
};

enum class CutoffMode { truncate_at_first_match, none };

/// Pre-infection cutoff: the event stream is truncated at the first event
/// whose canonical key contains `pattern`. Default pattern is the WannaCry
/// private-key file; general forensics can pass mode = none.
struct CutoffSpec {
    std::string pattern = "00000000.eky";
    CutoffMode mode = CutoffMode::truncate_at_first_match;

    static CutoffSpec none() { return {"", CutoffMode::none}; }
};

/// Lowercase/trim/sanitize normalizer used for every rendered key fragment:
/// invalid UTF-8 bytes are replaced with U+FFFD, control characters with a
/// space, ASCII letters lowercased, edge whitespace trimmed. Idempotent.
std::string normalize_text(std::string_view text);

/// Render the canonical feature key of a selected behavior event.
///   enhanced: "enhanced:_object=<obj>+event=<act>+data=<k:v>[+<k:v>...]"
///             with data entries in ascending key order
///   api_call: "bigram:_api=<api>+arguments=<registry subkey argument>"
/// Throws MissingDataField for an enhanced event with an empty data map.
FeatureKey canonicalize(const LogEvent& event);

/// Index of the first event whose canonical key contains spec.pattern;
/// nullopt when absent or spec.mode == none. Events that cannot be
/// canonicalized never match but keep their position.
std::optional<std::size_t> find_cutoff(const std::vector<LogEvent>& events,
                                       const CutoffSpec& spec);

/// Canonicalize and count every event strictly before the cutoff (all events
/// when no cutoff fires). Canonicalization rejections are skipped and counted
/// in meta.skipped_events.
FeatureDocument build_document(const std::vector<LogEvent>& events,
                               const CutoffSpec& spec, std::string id,
                               DocLabel label);

/// Incremental equivalent of select + find_cutoff + build_document, for use
/// behind a streaming parse. Feed events in order; the bag stops growing once
/// the cutoff key is seen.
class StreamingDocumentBuilder {
public:
    StreamingDocumentBuilder(CutoffSpec spec, std::string id, DocLabel label);

    void push(const LogEvent& event);
    FeatureDocument finish();

private:
    CutoffSpec spec_;
    FeatureDocument doc_;
    bool cut_ = false;
};

/// Componentwise sum of the input bags under a new id. Label is infected if
/// any input is infected. Throws DuplicateSourceId when two inputs share an
/// id; throws EmptyDocument for an empty input list.
FeatureDocument merge_documents(const std::vector<FeatureDocument>& docs,
                                std::string id);

/// ".fdoc" serialization: JSON with keys in lexicographic order, bit-exact
/// across runs for identical documents.
std::string to_fdoc_json(const FeatureDocument& doc);
FeatureDocument from_fdoc_json(const std::string& text);

FeatureDocument load_fdoc_file(const std::string& path);
void write_fdoc_file(const FeatureDocument& doc, const std::string& path);

const char* to_string(DocLabel label);
DocLabel label_from_string(const std::string& text);

} // namespace footprint
