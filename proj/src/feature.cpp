#include "footprint/feature.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "footprint/errors.hpp"

namespace footprint {

using nlohmann::json;

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Replacement character U+FFFD, UTF-8 encoded.
constexpr const char* kReplacement = "\xEF\xBF\xBD";

// Expected length of a UTF-8 sequence from its lead byte; 0 for invalid leads.
int utf8_sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if (lead >= 0xC2 && lead <= 0xDF) return 2;
    if (lead >= 0xE0 && lead <= 0xEF) return 3;
    if (lead >= 0xF0 && lead <= 0xF4) return 4;
    return 0;
}

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Validate one multi-byte sequence at text[i]; rejects overlongs/surrogates.
bool valid_sequence(std::string_view text, std::size_t i, int len) {
    if (i + static_cast<std::size_t>(len) > text.size()) return false;
    const auto b = [&](int k) { return static_cast<unsigned char>(text[i + k]); };
    for (int k = 1; k < len; ++k) {
        if (!is_continuation(b(k))) return false;
    }
    if (len == 3) {
        if (b(0) == 0xE0 && b(1) < 0xA0) return false;              // overlong
        if (b(0) == 0xED && b(1) >= 0xA0) return false;             // surrogate
    } else if (len == 4) {
        if (b(0) == 0xF0 && b(1) < 0x90) return false;              // overlong
        if (b(0) == 0xF4 && b(1) >= 0x90) return false;             // > U+10FFFF
    }
    return true;
}

} // namespace

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        const int len = utf8_sequence_length(c);
        if (len == 1) {
            if (c < 0x20 || c == 0x7F) {
                out.push_back(' ');
            } else if (c >= 'A' && c <= 'Z') {
                out.push_back(static_cast<char>(c - 'A' + 'a'));
            } else {
                out.push_back(static_cast<char>(c));
            }
            ++i;
        } else if (len > 1 && valid_sequence(text, i, len)) {
            out.append(text.substr(i, static_cast<std::size_t>(len)));
            i += static_cast<std::size_t>(len);
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    // Trim edge whitespace; interior whitespace stays.
    std::size_t begin = 0;
    std::size_t end = out.size();
    while (begin < end && is_ascii_space(static_cast<unsigned char>(out[begin]))) ++begin;
    while (end > begin && is_ascii_space(static_cast<unsigned char>(out[end - 1]))) --end;
    return out.substr(begin, end - begin);
}

namespace {

// The published bigram feature spells the API RegCreateKeyExW; some sources
// carry the misspelling without the second 'e'. Both normalize to one term.
std::string normalize_api_name(std::string_view api) {
    std::string name = normalize_text(api);
    if (name == "regcreatkeyexw") name = "regcreatekeyexw";
    return name;
}

// Argument carrying the registry path for the bigram term: prefer an argument
// named like a subkey, then any path-looking value, then the first argument.
std::string select_bigram_argument(const LogEvent& event) {
    static constexpr const char* kPreferred[] = {"subkey", "regkey", "key"};
    for (const char* want : kPreferred) {
        for (const auto& [name, value] : event.data) {
            if (normalize_text(name) == want) return value;
        }
    }
    for (const auto& [name, value] : event.data) {
        if (value.find('\\') != std::string::npos) return value;
    }
    if (!event.data.empty()) return event.data.begin()->second;
    return {};
}

} // namespace

FeatureKey canonicalize(const LogEvent& event) {
    if (event.kind == EventKind::api_call) {
        FeatureKey key = "bigram:_api=";
        key += normalize_api_name(event.action);
        key += "+arguments=";
        key += normalize_text(select_bigram_argument(event));
        return key;
    }

    if (event.data.empty()) {
        throw MissingDataField("enhanced event '" + event.object + "/" +
                               event.action + "' has an empty data map");
    }

    std::vector<std::pair<std::string, std::string>> fields;
    fields.reserve(event.data.size());
    for (const auto& [name, value] : event.data) {
        fields.emplace_back(normalize_text(name), normalize_text(value));
    }
    std::sort(fields.begin(), fields.end());

    FeatureKey key = "enhanced:_object=";
    key += normalize_text(event.object);
    key += "+event=";
    key += normalize_text(event.action);
    key += "+data=";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) key += '+';
        key += fields[i].first;
        key += ':';
        key += fields[i].second;
    }
    return key;
}

std::optional<std::size_t> find_cutoff(const std::vector<LogEvent>& events,
                                       const CutoffSpec& spec) {
    if (spec.mode == CutoffMode::none || spec.pattern.empty()) return std::nullopt;
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            if (canonicalize(events[i]).find(spec.pattern) != std::string::npos) {
                return i;
            }
        } catch (const MissingDataField&) {
            // no canonical form, cannot match
        }
    }
    return std::nullopt;
}

std::uint64_t FeatureDocument::total() const {
    std::uint64_t sum = 0;
    for (const auto& [key, count] : bag) sum += count;
    return sum;
}

StreamingDocumentBuilder::StreamingDocumentBuilder(CutoffSpec spec, std::string id,
                                                   DocLabel label)
    : spec_(std::move(spec)) {
    doc_.id = std::move(id);
    doc_.label = label;
    doc_.meta.source_ids.push_back(doc_.id);
}

void StreamingDocumentBuilder::push(const LogEvent& event) {
    if (cut_) return;
    FeatureKey key;
    try {
        key = canonicalize(event);
    } catch (const MissingDataField&) {
        ++doc_.meta.skipped_events;
        return;
    }
    if (spec_.mode == CutoffMode::truncate_at_first_match && !spec_.pattern.empty() &&
        key.find(spec_.pattern) != std::string::npos) {
        cut_ = true;
        doc_.meta.cutoff_applied = true;
        doc_.meta.cutoff_eid = event.eid;
        return;
    }
    ++doc_.bag[key];
}

FeatureDocument StreamingDocumentBuilder::finish() { return std::move(doc_); }

FeatureDocument build_document(const std::vector<LogEvent>& events,
                               const CutoffSpec& spec, std::string id,
                               DocLabel label) {
    StreamingDocumentBuilder builder(spec, std::move(id), label);
    for (const auto& event : events) builder.push(event);
    return builder.finish();
}

FeatureDocument merge_documents(const std::vector<FeatureDocument>& docs,
                                std::string id) {
    if (docs.empty()) {
        throw EmptyDocument("merge_documents needs at least one input");
    }
    FeatureDocument merged;
    merged.id = std::move(id);
    merged.label = DocLabel::ambient;
    for (const auto& doc : docs) {
        for (const auto& seen : merged.meta.source_ids) {
            if (seen == doc.id) {
                throw DuplicateSourceId("document id '" + doc.id +
                                        "' appears twice in a merge");
            }
        }
        merged.meta.source_ids.push_back(doc.id);
        if (doc.label == DocLabel::infected) merged.label = DocLabel::infected;
        merged.meta.cutoff_applied = merged.meta.cutoff_applied || doc.meta.cutoff_applied;
        merged.meta.skipped_events += doc.meta.skipped_events;
        for (const auto& [key, count] : doc.bag) merged.bag[key] += count;
    }
    return merged;
}

const char* to_string(DocLabel label) {
    return label == DocLabel::infected ? "infected" : "ambient";
}

DocLabel label_from_string(const std::string& text) {
    if (text == "infected") return DocLabel::infected;
    if (text == "ambient") return DocLabel::ambient;
    throw MalformedInput("unknown document label '" + text + "'", 0);
}

std::string to_fdoc_json(const FeatureDocument& doc) {
    json features = json::object();
    for (const auto& [key, count] : doc.bag) features[key] = count;

    json meta = {
        {"source_ids", doc.meta.source_ids},
        {"cutoff_applied", doc.meta.cutoff_applied},
        {"skipped_events", doc.meta.skipped_events},
    };
    meta["cutoff_eid"] =
        doc.meta.cutoff_eid ? json(*doc.meta.cutoff_eid) : json(nullptr);

    const json root = {
        {"format_version", 1},
        {"id", doc.id},
        {"label", to_string(doc.label)},
        {"features", features},
        {"meta", meta},
    };
    return root.dump(2) + "\n";
}

namespace {

FeatureDocument fdoc_from_parsed(const json& root);

} // namespace

FeatureDocument from_fdoc_json(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        throw MalformedInput("not a feature document", 0);
    }
    try {
        return fdoc_from_parsed(root);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("feature document field has the wrong "
                                         "type: ") + e.what(), 0);
    }
}

namespace {

FeatureDocument fdoc_from_parsed(const json& root) {
    const auto version = root.value("format_version", -1);
    if (version != 1) {
        throw VersionUnsupported("feature document format_version " +
                                 std::to_string(version) + " is not supported");
    }
    if (!root.contains("id") || !root.contains("label") || !root.contains("features") ||
        !root["features"].is_object()) {
        throw MalformedInput("feature document is missing id/label/features", 0);
    }

    FeatureDocument doc;
    doc.id = root["id"].get<std::string>();
    doc.label = label_from_string(root["label"].get<std::string>());
    for (const auto& [key, value] : root["features"].items()) {
        if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0) {
            throw MalformedInput("feature count for '" + key +
                                 "' is not a positive integer", 0);
        }
        doc.bag[key] = value.get<std::uint64_t>();
    }
    if (root.contains("meta") && root["meta"].is_object()) {
        const json& meta = root["meta"];
        if (meta.contains("source_ids")) {
            doc.meta.source_ids = meta["source_ids"].get<std::vector<std::string>>();
        }
        doc.meta.cutoff_applied = meta.value("cutoff_applied", false);
        if (meta.contains("cutoff_eid") && meta["cutoff_eid"].is_number_integer()) {
            doc.meta.cutoff_eid = meta["cutoff_eid"].get<std::int64_t>();
        }
        doc.meta.skipped_events = meta.value("skipped_events", std::uint64_t{0});
    }
    return doc;
}

} // namespace

FeatureDocument load_fdoc_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_fdoc_json(buffer.str());
}

void write_fdoc_file(const FeatureDocument& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write '" + path + "'");
    out << to_fdoc_json(doc);
    if (!out.flush()) throw IoFailure("short write to '" + path + "'");
}

} // namespace footprint
