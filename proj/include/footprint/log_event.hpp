#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace footprint {

enum class EventKind { enhanced, api_call };

/// One parsed behavioral record: either a Cuckoo "enhanced" summary entry
/// (read/write/delete/execute/create/load on files, registry keys,
/// directories, libraries) or a raw per-process API-call record.
///
/// `data` carries the record's payload fields in key order ("file" -> path,
/// "regkey" -> key, argument name -> value). Timestamps and event ids are
/// kept for provenance but never participate in feature identity.
struct LogEvent {
    EventKind kind = EventKind::enhanced;
    std::string object;                       // "file", "registry", "dir", ...
    std::string action;                       // enhanced event name or API name
    std::map<std::string, std::string> data;  // payload fields, key-ordered
    std::string timestamp;                    // verbatim from source; may be empty
    std::optional<std::int64_t> eid;          // event id, >= 0 when present
    std::string category;                     // api_call only ("registry", "file", ...)
    std::optional<std::string> process_ref;   // owning process, when known
};

/// Summary of one ingest pass. event_count + skipped_count equals the total
/// number of records scanned (behavioral records plus ignored non-behavior
/// top-level sections, each of which counts as one skipped record).
struct ReportMeta {
    std::string source_path;
    std::string sha_of_input;         // SHA-256 hex of the raw input bytes
    std::uint64_t event_count = 0;
    std::uint64_t skipped_count = 0;
    std::set<std::string> categories_seen;
};

} // namespace footprint
