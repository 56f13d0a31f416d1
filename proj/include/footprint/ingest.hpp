#pragma once

#include <functional>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "footprint/log_event.hpp"

namespace footprint {

enum class InputFormat {
    auto_detect,  // JSONL if the first line is a JSON object with a "kind" member
    cuckoo,       // full sandbox report: {"behavior": {...}, ...}
    jsonl,        // one LogEvent-shaped JSON object per line
};

struct IngestOptions {
    InputFormat format = InputFormat::auto_detect;
    std::string source_path;  // recorded in ReportMeta only
};

using EventSink = std::function<void(LogEvent&&)>;

/// Stream-parse a sandbox report, handing each behavioral record to `sink`
/// as it is decoded. Memory use is proportional to the largest single record,
/// not to the stream length; non-behavior sections (static, virustotal,
/// network, ...) are scanned past without materialization and tallied in
/// ReportMeta::skipped_count. Records missing their object/event fields are
/// skipped and counted, the parse continues.
///
/// Throws MalformedInput (with byte offset) if the stream is not JSON or a
/// Cuckoo-format stream has no "behavior" section.
ReportMeta parse_report(std::istream& in, const IngestOptions& options,
                        const EventSink& sink);

/// Convenience wrapper that materializes the whole event sequence. Only
/// suitable for reports that fit in memory; the CLI uses the sink form.
std::pair<std::vector<LogEvent>, ReportMeta>
parse_report_all(std::istream& in, const IngestOptions& options = {});

/// Returns true for events the footprint pipeline ranks on: every enhanced
/// entry, plus API calls whose category is "registry" and whose API is
/// RegCreateKeyExW (case-insensitive; the misspelling "RegCreatKeyExW" seen
/// in some sources is accepted too). Everything else is dropped.
bool is_ranked_behavior(const LogEvent& event);

/// Filter a materialized sequence with is_ranked_behavior, preserving order.
std::vector<LogEvent> select_behavior_events(const std::vector<LogEvent>& events);

} // namespace footprint
