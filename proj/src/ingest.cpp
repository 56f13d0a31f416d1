#include "footprint/ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "footprint/errors.hpp"
#include "footprint/feature.hpp"

namespace footprint {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Buffered reader that hashes every byte it hands out. The first chunk stays
// addressable until consumed, which lets format auto-detection peek at the
// first line without seeking.
// ---------------------------------------------------------------------------
class HashingReader {
public:
    static constexpr std::size_t kChunk = 256 * 1024;

    explicit HashingReader(std::istream& in) : in_(in), buffer_(kChunk) {
        ctx_ = EVP_MD_CTX_new();
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
            throw IoFailure("cannot initialize SHA-256");
        }
        refill();
    }

    ~HashingReader() { EVP_MD_CTX_free(ctx_); }

    HashingReader(const HashingReader&) = delete;
    HashingReader& operator=(const HashingReader&) = delete;

    using int_type = std::char_traits<char>::int_type;

    int_type get_character() {
        if (pos_ == len_ && !refill()) return std::char_traits<char>::eof();
        return std::char_traits<char>::to_int_type(buffer_[pos_++]);
    }

    // First buffered line (without newline), for format sniffing. Empty when
    // the first chunk holds no newline; callers fall back to the full-report
    // path in that case.
    std::string_view peek_first_line() const {
        const auto* begin = buffer_.data();
        const auto* nl = static_cast<const char*>(memchr(begin, '\n', len_));
        return nl ? std::string_view(begin, static_cast<std::size_t>(nl - begin))
                  : std::string_view();
    }

    // Next full line, false at end of input. The trailing newline is dropped.
    bool read_line(std::string& line) {
        line.clear();
        for (;;) {
            if (pos_ == len_ && !refill()) return !line.empty();
            const char c = buffer_[pos_++];
            if (c == '\n') return true;
            line.push_back(c);
        }
    }

    // Absolute offset of the next unread byte.
    std::size_t offset() const { return fetched_ - (len_ - pos_); }

    // Consume (and hash) the rest of the input, then return the digest.
    std::string finish_digest() {
        while (refill_discard()) {}
        unsigned char raw[EVP_MAX_MD_SIZE];
        unsigned int raw_len = 0;
        if (EVP_DigestFinal_ex(ctx_, raw, &raw_len) != 1) {
            throw IoFailure("SHA-256 finalization failed");
        }
        static constexpr char hex[] = "0123456789abcdef";
        std::string out;
        out.reserve(raw_len * 2);
        for (unsigned int i = 0; i < raw_len; ++i) {
            out.push_back(hex[raw[i] >> 4]);
            out.push_back(hex[raw[i] & 0xF]);
        }
        return out;
    }

private:
    bool refill() {
        if (eof_) return false;
        in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        fetched_ += len_;
        if (len_ == 0) {
            eof_ = true;
            return false;
        }
        EVP_DigestUpdate(ctx_, buffer_.data(), len_);
        return true;
    }

    bool refill_discard() {
        pos_ = len_;
        return refill();
    }

    std::istream& in_;
    EVP_MD_CTX* ctx_ = nullptr;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::size_t fetched_ = 0;
    bool eof_ = false;
};

// Input iterator over HashingReader, shaped for nlohmann's iterator adapter.
struct ReaderIterator {
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = char;

    HashingReader* reader = nullptr;
    HashingReader::int_type current = std::char_traits<char>::eof();

    ReaderIterator() = default;
    explicit ReaderIterator(HashingReader& r) : reader(&r), current(r.get_character()) {}

    char operator*() const { return std::char_traits<char>::to_char_type(current); }
    ReaderIterator& operator++() {
        current = reader->get_character();
        return *this;
    }
    bool operator==(const ReaderIterator& other) const {
        return at_end() == other.at_end();
    }
    bool at_end() const { return current == std::char_traits<char>::eof(); }
};

// ---------------------------------------------------------------------------
// Minimal SAX-to-DOM builder for one record subtree.
// ---------------------------------------------------------------------------
class RecordBuilder {
public:
    bool active() const { return !stack_.empty(); }

    void begin_object() {
        json* node = place(json::object());
        stack_.push_back(node);
    }
    void begin_array() {
        json* node = place(json::array());
        stack_.push_back(node);
    }
    // Returns true when the record is complete.
    bool end_container() {
        stack_.pop_back();
        return stack_.empty();
    }
    void set_key(std::string key) { pending_key_ = std::move(key); }
    void value(json v) { place(std::move(v)); }

    json take() { return std::move(root_); }

private:
    json* place(json v) {
        if (stack_.empty()) {
            root_ = std::move(v);
            return &root_;
        }
        json& top = *stack_.back();
        if (top.is_array()) {
            top.push_back(std::move(v));
            return &top.back();
        }
        auto [it, inserted] = top.emplace(pending_key_, std::move(v));
        if (!inserted) it.value() = std::move(v);  // last duplicate key wins
        return &it.value();
    }

    json root_;
    std::vector<json*> stack_;
    std::string pending_key_;
};

// ---------------------------------------------------------------------------
// Record -> LogEvent conversions. Return nullopt on schema problems; callers
// count the skip and move on.
// ---------------------------------------------------------------------------
std::string scalar_to_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

bool enhanced_payload_valid(const LogEvent& event) {
    const std::string object = normalize_text(event.object);
    if (object != "file" && object != "registry" && object != "dir") return true;
    for (const auto& [name, value] : event.data) {
        if (normalize_text(value).empty()) return false;
    }
    return true;
}

std::optional<LogEvent> enhanced_record_to_event(const json& record) {
    if (!record.is_object()) return std::nullopt;
    const auto event_it = record.find("event");
    const auto object_it = record.find("object");
    if (event_it == record.end() || object_it == record.end() ||
        !event_it->is_string() || !object_it->is_string()) {
        return std::nullopt;
    }

    LogEvent event;
    event.kind = EventKind::enhanced;
    event.action = event_it->get<std::string>();
    event.object = object_it->get<std::string>();
    if (const auto it = record.find("eid"); it != record.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned()) return std::nullopt;
        const auto eid = it->get<std::int64_t>();
        if (eid < 0) return std::nullopt;
        event.eid = eid;
    }
    if (const auto it = record.find("timestamp"); it != record.end()) {
        event.timestamp = scalar_to_text(*it);
    }
    if (const auto it = record.find("data"); it != record.end() && it->is_object()) {
        for (const auto& [name, value] : it->items()) {
            event.data[name] = scalar_to_text(value);
        }
    }
    if (!enhanced_payload_valid(event)) return std::nullopt;
    return event;
}

// Cuckoo emits call arguments either as {"name": n, "value": v} lists or as a
// plain object; both normalize to one map.
std::map<std::string, std::string> normalize_arguments(const json& arguments) {
    std::map<std::string, std::string> out;
    if (arguments.is_array()) {
        for (const auto& item : arguments) {
            if (!item.is_object()) continue;
            const auto name_it = item.find("name");
            const auto value_it = item.find("value");
            if (name_it == item.end() || !name_it->is_string()) continue;
            out[name_it->get<std::string>()] =
                value_it != item.end() ? scalar_to_text(*value_it) : "";
        }
    } else if (arguments.is_object()) {
        for (const auto& [name, value] : arguments.items()) {
            out[name] = scalar_to_text(value);
        }
    }
    return out;
}

std::optional<LogEvent> call_record_to_event(const json& record,
                                             const std::string& process_ref) {
    if (!record.is_object()) return std::nullopt;
    const auto api_it = record.find("api");
    const auto category_it = record.find("category");
    if (api_it == record.end() || category_it == record.end() ||
        !api_it->is_string() || !category_it->is_string()) {
        return std::nullopt;
    }

    LogEvent event;
    event.kind = EventKind::api_call;
    event.action = api_it->get<std::string>();
    event.category = category_it->get<std::string>();
    event.object = event.category;
    if (const auto it = record.find("id");
        it != record.end() && (it->is_number_integer() || it->is_number_unsigned())) {
        const auto eid = it->get<std::int64_t>();
        if (eid < 0) return std::nullopt;
        event.eid = eid;
    }
    if (const auto it = record.find("timestamp"); it != record.end()) {
        event.timestamp = scalar_to_text(*it);
    }
    if (const auto it = record.find("arguments"); it != record.end()) {
        event.data = normalize_arguments(*it);
    }
    if (!process_ref.empty()) event.process_ref = process_ref;
    return event;
}

std::optional<LogEvent> jsonl_record_to_event(const json& record) {
    if (!record.is_object()) return std::nullopt;
    const auto kind_it = record.find("kind");
    if (kind_it == record.end() || !kind_it->is_string()) return std::nullopt;
    const std::string kind = kind_it->get<std::string>();

    if (kind == "enhanced") {
        json cuckoo_shaped = record;
        if (record.contains("action")) cuckoo_shaped["event"] = record["action"];
        return enhanced_record_to_event(cuckoo_shaped);
    }
    if (kind == "api_call") {
        json call_shaped = record;
        if (record.contains("action")) call_shaped["api"] = record["action"];
        if (record.contains("data")) call_shaped["arguments"] = record["data"];
        std::string process_ref;
        if (const auto it = record.find("process_ref");
            it != record.end() && it->is_string()) {
            process_ref = it->get<std::string>();
        }
        return call_record_to_event(call_shaped, process_ref);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// SAX handler for full Cuckoo-shaped reports. Tracks where it is in the
// report skeleton, skips everything outside behavior.enhanced and
// behavior.processes[].calls, and materializes one record at a time.
// ---------------------------------------------------------------------------
class CuckooSaxHandler {
public:
    CuckooSaxHandler(const EventSink& sink, ReportMeta& meta)
        : sink_(sink), meta_(meta) {}

    bool had_error() const { return error_.has_value(); }
    const MalformedInput& error() const { return *error_; }
    bool saw_behavior() const { return saw_behavior_; }

    // -- SAX interface ------------------------------------------------------
    bool null() { return value(json(nullptr)); }
    bool boolean(bool v) { return value(json(v)); }
    bool number_integer(json::number_integer_t v) { return value(json(v)); }
    bool number_unsigned(json::number_unsigned_t v) { return value(json(v)); }
    bool number_float(json::number_float_t v, const std::string&) {
        return value(json(v));
    }
    bool string(std::string& v) { return value(json(v)); }
    bool binary(json::binary_t& v) { return value(json(v)); }

    bool start_object(std::size_t) {
        if (builder_.active()) {
            builder_.begin_object();
            return true;
        }
        if (skip_depth_ > 0) {
            ++skip_depth_;
            return true;
        }
        switch (here()) {
        case Scope::start:
            scopes_.push_back(Scope::root);
            return true;
        case Scope::root:
            if (key_ == "behavior") {
                saw_behavior_ = true;
                scopes_.push_back(Scope::behavior);
            } else {
                skip_category();
            }
            return true;
        case Scope::enhanced_array:
        case Scope::calls_array:
            builder_.begin_object();
            return true;
        case Scope::processes_array:
            process_name_.clear();
            scopes_.push_back(Scope::process);
            return true;
        case Scope::behavior:
        case Scope::process:
            skip_depth_ = 1;
            return true;
        }
        return true;
    }

    bool key(std::string& k) {
        if (builder_.active()) {
            builder_.set_key(k);
            return true;
        }
        if (skip_depth_ > 0) return true;
        key_ = k;
        if (here() == Scope::root) meta_.categories_seen.insert(k);
        return true;
    }

    bool end_object() {
        if (builder_.active()) {
            if (builder_.end_container()) finish_record(builder_.take());
            return true;
        }
        if (skip_depth_ > 0) {
            --skip_depth_;
            return true;
        }
        scopes_.pop_back();
        return true;
    }

    bool start_array(std::size_t) {
        if (builder_.active()) {
            builder_.begin_array();
            return true;
        }
        if (skip_depth_ > 0) {
            ++skip_depth_;
            return true;
        }
        switch (here()) {
        case Scope::start:
            return fail("report root is not a JSON object", 0);
        case Scope::root:
            skip_category();
            return true;
        case Scope::behavior:
            if (key_ == "enhanced") {
                scopes_.push_back(Scope::enhanced_array);
            } else if (key_ == "processes") {
                scopes_.push_back(Scope::processes_array);
            } else {
                skip_depth_ = 1;
            }
            return true;
        case Scope::process:
            if (key_ == "calls") {
                scopes_.push_back(Scope::calls_array);
            } else {
                skip_depth_ = 1;
            }
            return true;
        case Scope::enhanced_array:
        case Scope::processes_array:
        case Scope::calls_array:
            // array where a record object belongs: malformed record
            ++meta_.skipped_count;
            skip_depth_ = 1;
            return true;
        }
        return true;
    }

    bool end_array() {
        if (builder_.active()) {
            if (builder_.end_container()) finish_record(builder_.take());
            return true;
        }
        if (skip_depth_ > 0) {
            --skip_depth_;
            return true;
        }
        scopes_.pop_back();
        return true;
    }

    bool parse_error(std::size_t position, const std::string&,
                     const nlohmann::detail::exception& ex) {
        return fail(ex.what(), position);
    }

private:
    enum class Scope { start, root, behavior, enhanced_array, processes_array,
                       process, calls_array };

    Scope here() const { return scopes_.empty() ? Scope::start : scopes_.back(); }

    bool fail(const std::string& message, std::size_t offset) {
        error_.emplace(message, offset);
        return false;
    }

    void skip_category() {
        // value of a non-behavior top-level section; scanned past, counted
        ++meta_.skipped_count;
        skip_depth_ = 1;
    }

    bool value(json v) {
        if (builder_.active()) {
            builder_.value(std::move(v));
            return true;
        }
        if (skip_depth_ > 0) return true;
        switch (here()) {
        case Scope::start:
            return fail("report root is not a JSON object", 0);
        case Scope::root:
            if (key_ != "behavior") ++meta_.skipped_count;
            return true;
        case Scope::enhanced_array:
        case Scope::calls_array:
            ++meta_.skipped_count;  // scalar where a record belongs
            return true;
        case Scope::processes_array:
            ++meta_.skipped_count;
            return true;
        case Scope::process:
            if (key_ == "process_name" && v.is_string()) {
                process_name_ = v.get<std::string>();
            }
            return true;
        case Scope::behavior:
            return true;
        }
        return true;
    }

    void finish_record(json record) {
        const bool is_call = here() == Scope::calls_array;
        auto event = is_call ? call_record_to_event(record, process_name_)
                             : enhanced_record_to_event(record);
        if (!event) {
            ++meta_.skipped_count;
            return;
        }
        ++meta_.event_count;
        sink_(std::move(*event));
    }

    const EventSink& sink_;
    ReportMeta& meta_;
    std::vector<Scope> scopes_;
    std::string key_;
    std::string process_name_;
    int skip_depth_ = 0;
    bool saw_behavior_ = false;
    std::optional<MalformedInput> error_;
    RecordBuilder builder_;
};

void parse_cuckoo(HashingReader& reader, const EventSink& sink, ReportMeta& meta) {
    CuckooSaxHandler handler(sink, meta);
    const bool ok = json::sax_parse(ReaderIterator(reader), ReaderIterator(),
                                    &handler);
    if (!ok || handler.had_error()) {
        if (handler.had_error()) throw handler.error();
        throw MalformedInput("unparseable report", reader.offset());
    }
    if (!handler.saw_behavior()) {
        throw MalformedInput("report has no behavior section", reader.offset());
    }
}

void parse_jsonl(HashingReader& reader, const EventSink& sink, ReportMeta& meta) {
    std::string line;
    std::size_t line_start = reader.offset();
    while (reader.read_line(line)) {
        const bool blank =
            std::all_of(line.begin(), line.end(),
                        [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
        if (!blank) {
            const json record = json::parse(line, nullptr, false);
            if (record.is_discarded()) {
                throw MalformedInput("line is not JSON", line_start);
            }
            if (auto event = jsonl_record_to_event(record)) {
                meta.categories_seen.insert(event->kind == EventKind::enhanced
                                                ? "enhanced"
                                                : "api_call");
                ++meta.event_count;
                sink(std::move(*event));
            } else {
                ++meta.skipped_count;
            }
        }
        line_start = reader.offset();
    }
}

bool looks_like_jsonl(std::string_view first_line) {
    if (first_line.empty()) return false;
    const json probe = json::parse(first_line, nullptr, false);
    return probe.is_object() && probe.contains("kind") && probe["kind"].is_string();
}

} // namespace

ReportMeta parse_report(std::istream& in, const IngestOptions& options,
                        const EventSink& sink) {
    HashingReader reader(in);
    ReportMeta meta;
    meta.source_path = options.source_path;

    InputFormat format = options.format;
    if (format == InputFormat::auto_detect) {
        format = looks_like_jsonl(reader.peek_first_line()) ? InputFormat::jsonl
                                                            : InputFormat::cuckoo;
    }
    if (format == InputFormat::jsonl) {
        parse_jsonl(reader, sink, meta);
    } else {
        parse_cuckoo(reader, sink, meta);
    }
    meta.sha_of_input = reader.finish_digest();
    return meta;
}

std::pair<std::vector<LogEvent>, ReportMeta>
parse_report_all(std::istream& in, const IngestOptions& options) {
    std::vector<LogEvent> events;
    ReportMeta meta = parse_report(
        in, options, [&events](LogEvent&& event) { events.push_back(std::move(event)); });
    return {std::move(events), std::move(meta)};
}

bool is_ranked_behavior(const LogEvent& event) {
    if (event.kind == EventKind::enhanced) return true;
    if (normalize_text(event.category) != "registry") return false;
    const std::string api = normalize_text(event.action);
    return api == "regcreatekeyexw" || api == "regcreatkeyexw";
}

std::vector<LogEvent> select_behavior_events(const std::vector<LogEvent>& events) {
    std::vector<LogEvent> kept;
    kept.reserve(events.size());
    std::copy_if(events.begin(), events.end(), std::back_inserter(kept),
                 is_ranked_behavior);
    return kept;
}

} // namespace footprint
