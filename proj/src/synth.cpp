#include "footprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "footprint/errors.hpp"
#include "footprint/ingest.hpp"

namespace footprint {

using nlohmann::json;

namespace {

// mt19937_64 with explicit modulo reduction: identical streams on every
// platform, which the frozen goldens rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t mix_seed(ProfileKind kind, std::uint64_t seed, std::uint64_t salt) {
    const auto k = static_cast<std::uint64_t>(kind) + 1;
    return (seed + 0x9E3779B97F4A7C15ULL * k) ^ (salt * 0xBF58476D1CE4E5B9ULL);
}

// ---------------------------------------------------------------------------
// Vocabulary entries: the raw material both the bags and the reports are
// rendered from, in original casing.
// ---------------------------------------------------------------------------
struct Ev {
    EventKind kind = EventKind::enhanced;
    std::string object;    // enhanced: "file"/"registry"/"dir"/"library"
    std::string action;    // enhanced event name, or API name
    std::string data_key;  // "file"/"regkey", or argument name
    std::string value;
    std::string category;  // api_call only
    std::uint64_t count = 1;
};

Ev enhanced(std::string object, std::string action, std::string data_key,
            std::string value, std::uint64_t count) {
    return {EventKind::enhanced, std::move(object), std::move(action),
            std::move(data_key), std::move(value), "", count};
}

Ev api_call(std::string api, std::string category, std::string arg_name,
            std::string arg_value, std::uint64_t count) {
    return {EventKind::api_call, "", std::move(api), std::move(arg_name),
            std::move(arg_value), std::move(category), count};
}

LogEvent to_log_event(const Ev& ev, std::string timestamp,
                      std::optional<std::int64_t> eid) {
    LogEvent event;
    event.kind = ev.kind;
    event.object = ev.kind == EventKind::api_call ? ev.category : ev.object;
    event.action = ev.action;
    if (!ev.data_key.empty()) event.data[ev.data_key] = ev.value;
    event.timestamp = std::move(timestamp);
    event.eid = eid;
    event.category = ev.category;
    return event;
}

FeatureKey key_of(const Ev& ev) { return canonicalize(to_log_event(ev, "", 0)); }

const std::string kTemp = "C:\\DOCUME~1\\cuckoo\\LOCALS~1\\Temp\\";
const std::string kProfile =
    "C:\\Documents and Settings\\cuckoo\\Application Data\\Mozilla\\Firefox"
    "\\Profiles\\qk4ev1cw.default\\";
const std::string kCache =
    "C:\\Documents and Settings\\cuckoo\\Local Settings"
    "\\Temporary Internet Files\\Content.IE5\\";
const std::string kDocs = "C:\\Documents and Settings\\cuckoo\\My Documents\\";
const std::string kMailRoot =
    "C:\\Documents and Settings\\cuckoo\\Local Settings\\Application Data"
    "\\Identities\\{8D4C2F61-9E3B-4F08-A1C2-55D07B36E2AA}\\Microsoft"
    "\\Outlook Express\\";

// ---------------------------------------------------------------------------
// The WannaCry footprint. Published tiers carry the counts recovered by
// inverting the weight table; the remaining pre-encryption activity is
// unpublished, so those entries are stand-ins with count 1 that rank strictly
// below every published tier (each is shared with one ambient document).
// ---------------------------------------------------------------------------
struct FixtureEntry {
    Ev ev;
    int tier;  // 1..9 published tier, 0 filler
};

Ev msg_write(const std::string& language, std::uint64_t count) {
    return enhanced("file", "write", "file",
                    kTemp + "msg\\m_" + language + ".wnry", count);
}

const std::vector<FixtureEntry>& fixture_entries() {
    static const std::vector<FixtureEntry> entries = [] {
        std::vector<FixtureEntry> out;
        const auto add = [&out](Ev ev, int tier) {
            out.push_back({std::move(ev), tier});
        };

        add(enhanced("file", "write", "file", kTemp + "s.wnry", 186), 1);
        add(enhanced("file", "write", "file", kTemp + "b.wnry", 21), 2);
        // trailing spaces below reproduce the raw log artifact; the
        // canonicalizer trims them away
        add(enhanced("file", "write", "file", kTemp + "u.wnry ", 15), 3);

        add(enhanced("file", "read", "file", kTemp + "t.wnry ", 6), 4);
        add(msg_write("korean", 6), 4);
        add(msg_write("vietnamese", 6), 4);

        add(msg_write("chinese (traditional)", 5), 5);
        add(msg_write("japanese", 5), 5);

        static const char* kTier6Languages[] = {
            "bulgarian", "chinese (simplified)", "croatian", "czech", "danish",
            "dutch", "english", "filipino", "finnish", "french", "german",
            "greek", "indonesian", "italian", "latvian", "norwegian", "polish",
            "portuguese", "romanian", "russian", "slovak", "spanish", "swedish",
            "turkish"};
        for (const char* language : kTier6Languages) add(msg_write(language, 3), 6);

        add(enhanced("file", "read", "file", kTemp + "c.wnry ", 2), 7);
        add(enhanced("file", "write", "file", kTemp + "c.wnry", 2), 7);
        add(enhanced("file", "write", "file", kTemp + "taskdl.exe", 2), 7);
        add(enhanced("registry", "read", "regkey",
                     "\\ActiveComputerNameMachineGuid", 2), 7);

        add(enhanced("registry", "read", "regkey",
                     "HKEY_LOCAL_MACHINE\\Software\\Microsoft\\Cryptography"
                     "\\Defaults\\Provider\\Microsoft Enhanced RSA and AES "
                     "Cryptographic Provider (Prototype)Image Path", 4), 8);

        add(api_call("RegCreateKeyExW", "registry", "SubKey",
                     "Software\\WanaCrypt0r", 1), 9);
        add(enhanced("dir", "create", "file", kTemp + "msg", 1), 9);
        add(enhanced("file", "execute", "file", "attrib +h . ", 1), 9);
        add(enhanced("file", "execute", "file",
                     "icacls . /grant Everyone:F /T /C /Q ", 1), 9);
        add(enhanced("file", "write", "file", kTemp + "00000000.pky", 1), 9);
        add(enhanced("file", "write", "file", kTemp + "r.wnry", 1), 9);

        // Unpublished remainder of the pre-encryption activity (74 - 43).
        add(enhanced("library", "load", "file",
                     "C:\\WINDOWS\\system32\\advapi32.dll", 1), 0);
        add(enhanced("registry", "read", "regkey",
                     "ActiveComputerNameComputerName", 1), 0);
        add(enhanced("registry", "write", "regkey",
                     "HKEY_LOCAL_MACHINE\\Software\\WanaCrypt0r\\wd", 1), 0);
        add(enhanced("file", "write", "file", kTemp + "t.wnry", 1), 0);
        add(enhanced("file", "write", "file", kTemp + "taskse.exe", 1), 0);
        add(enhanced("file", "write", "file", kTemp + "tasksche.exe", 1), 0);
        static const char* kFillerLanguages[] = {
            "albanian", "arabic", "armenian", "azerbaijani", "bosnian",
            "catalan", "estonian", "georgian", "hebrew", "hindi", "hungarian",
            "icelandic", "lithuanian", "macedonian", "malay", "maltese",
            "mongolian", "persian", "serbian", "slovenian", "swahili", "thai",
            "ukrainian", "urdu", "uzbek"};
        for (const char* language : kFillerLanguages) add(msg_write(language, 1), 0);

        return out;
    }();
    return entries;
}

const Ev& cutoff_event() {
    static const Ev ev =
        enhanced("file", "write", "file", kTemp + "00000000.eky", 1);
    return ev;
}

const Ev& shared_registry_read() {
    // the tier-8 cryptography-provider read, the one published key with df 3
    static const Ev ev = [] {
        for (const auto& entry : fixture_entries()) {
            if (entry.tier == 8) return entry.ev;
        }
        throw DomainError("fixture has no tier-8 entry");
    }();
    return ev;
}

std::vector<const FixtureEntry*> filler_entries() {
    std::vector<const FixtureEntry*> fillers;
    for (const auto& entry : fixture_entries()) {
        if (entry.tier == 0) fillers.push_back(&entry);
    }
    return fillers;
}

// Post-encryption stream, seed-independent part. Emitted strictly after the
// cutoff write; never enters a pre-encryption document.
std::vector<Ev> post_encryption_events() {
    std::vector<Ev> out;
    out.push_back(enhanced("file", "write", "file", kTemp + "00000000.res", 3));
    out.push_back(enhanced("file", "write", "file",
                           kDocs + "quarterly_report.doc.WNCRYT", 2));
    out.push_back(enhanced("file", "delete", "file",
                           kDocs + "quarterly_report.doc.WNCRYT", 1));
    out.push_back(enhanced("file", "write", "file",
                           kDocs + "quarterly_report.doc.WNCRY", 1));
    out.push_back(enhanced("file", "execute", "file", kTemp + "taskdl.exe", 2));
    out.push_back(enhanced("file", "execute", "file",
                           "taskse.exe " + kTemp + "@WanaDecryptor@.exe", 1));
    out.push_back(enhanced("file", "write", "file",
                           kTemp + "@WanaDecryptor@.exe", 1));
    out.push_back(enhanced("file", "write", "file",
                           kTemp + "@WanaDecryptor@.txt", 1));
    out.push_back(enhanced("file", "write", "file",
                           "C:\\Documents and Settings\\cuckoo\\Desktop"
                           "\\!WannaCryptor!.bmp", 1));
    out.push_back(enhanced("file", "write", "file", kTemp + "c.wnry", 1));
    return out;
}

// Seed-dependent post-encryption artifacts.
std::vector<Ev> post_encryption_seed_events(std::uint64_t seed) {
    const std::string uid = unique_machine_id(seed);
    Rng rng(mix_seed(ProfileKind::wannacry, seed, 0x5D));
    char sd_name[16];
    std::snprintf(sd_name, sizeof sd_name, "~SD%04llX.tmp",
                  static_cast<unsigned long long>(rng.below(0xFFFF)));

    std::vector<Ev> out;
    out.push_back(enhanced("registry", "write", "regkey",
                           "HKEY_LOCAL_MACHINE\\SOFTWARE\\Microsoft\\Windows"
                           "\\CurrentVersion\\Run\\" + uid, 1));
    out.push_back(enhanced("file", "execute", "file",
                           "cmd.exe /c reg add HKLM\\SOFTWARE\\Microsoft"
                           "\\Windows\\CurrentVersion\\Run /v \"" + uid +
                           "\" /t REG_SZ /d \"" + kTemp + "tasksche.exe\" /f", 1));
    out.push_back(enhanced("file", "write", "file", kTemp + sd_name, 2));
    out.push_back(enhanced("file", "delete", "file", kTemp + sd_name, 1));
    return out;
}

// ---------------------------------------------------------------------------
// Shared-key planting rules. Pure functions of (kind, seed) so that a corpus
// assembled from individually synthesized documents carries the intended
// document frequencies. The registry-read hosts grow with the corpus so the
// key keeps its slot between the count-2 and count-1 tiers for ambient
// corpus sizes up to at least 21.
// ---------------------------------------------------------------------------
bool plantable_kind(ProfileKind kind) {
    return kind == ProfileKind::ambient_browsing ||
           kind == ProfileKind::ambient_fileio ||
           kind == ProfileKind::ambient_email;
}

bool hosts_shared_registry_read(ProfileKind kind, std::uint64_t seed) {
    if (!plantable_kind(kind)) return false;
    return seed == 1 || seed == 2 || (seed >= 7 && (seed - 7) % 4 == 0);
}

bool hosts_filler(ProfileKind kind, std::uint64_t seed, std::size_t filler_index) {
    if (!plantable_kind(kind)) return false;
    return seed % 3 == (1 + filler_index) % 3;
}

bool flight_hosts_places(std::uint64_t seed) { return seed <= 14; }
bool flight_hosts_formhistory(std::uint64_t seed) { return seed == 2; }

// ---------------------------------------------------------------------------
// Ambient vocabularies.
// ---------------------------------------------------------------------------
std::vector<Ev> browsing_vocab() {
    return {
        enhanced("file", "read", "file", kProfile + "prefs.js", 4),
        enhanced("file", "write", "file", kProfile + "prefs.js", 2),
        enhanced("file", "write", "file", kProfile + "cookies.sqlite", 9),
        enhanced("file", "read", "file", kProfile + "cert8.db", 3),
        enhanced("file", "write", "file", kProfile + "xulstore.json", 2),
        enhanced("file", "write", "file", kProfile + "favicons.sqlite", 5),
        enhanced("file", "write", "file",
                 kCache + "0XW3ZA7K\\banner_ad[1].gif", 6),
        enhanced("file", "write", "file",
                 kCache + "0XW3ZA7K\\video_player[1].swf", 4),
        enhanced("file", "read", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\History"
                 "\\History.IE5\\index.dat", 8),
        enhanced("registry", "read", "regkey",
                 "HKEY_CURRENT_USER\\Software\\Microsoft\\Windows"
                 "\\CurrentVersion\\Internet Settings\\ProxyEnable", 4),
        enhanced("registry", "read", "regkey",
                 "HKEY_CURRENT_USER\\Software\\Microsoft\\Windows"
                 "\\CurrentVersion\\Internet Settings\\Connections"
                 "\\SavedLegacySettings", 2),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\wininet.dll", 2),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\urlmon.dll", 1),
        enhanced("dir", "create", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\Temp"
                 "\\plugtmp", 1),
    };
}

std::vector<Ev> fileio_vocab() {
    return {
        enhanced("file", "write", "file", kDocs + "quarterly_report.doc", 7),
        enhanced("file", "read", "file", kDocs + "quarterly_report.doc", 5),
        enhanced("file", "write", "file", kDocs + "budget_2017.xls", 6),
        enhanced("file", "read", "file", kDocs + "notes.txt", 4),
        enhanced("file", "write", "file", kDocs + "notes.txt", 3),
        enhanced("file", "delete", "file", kDocs + "~$quarterly_report.doc", 2),
        enhanced("file", "write", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\Temp"
                 "\\~DF3FA1.tmp", 4),
        enhanced("file", "delete", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\Temp"
                 "\\~DF3FA1.tmp", 2),
        enhanced("file", "write", "file", kDocs + "archive\\old_reports.zip", 3),
        enhanced("dir", "create", "file", kDocs + "archive", 1),
        enhanced("file", "execute", "file",
                 "C:\\Program Files\\7-Zip\\7z.exe a old_reports.zip", 1),
        enhanced("registry", "read", "regkey",
                 "HKEY_CURRENT_USER\\Software\\Microsoft\\Office\\11.0\\Word"
                 "\\Options\\AUTOSAVE-PATH", 2),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\ole32.dll", 2),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\version.dll", 1),
    };
}

std::vector<Ev> email_vocab() {
    return {
        enhanced("file", "write", "file", kMailRoot + "Inbox.dbx", 8),
        enhanced("file", "read", "file", kMailRoot + "Inbox.dbx", 6),
        enhanced("file", "write", "file", kMailRoot + "Sent Items.dbx", 4),
        enhanced("file", "write", "file", kMailRoot + "Pop3uidl.dbx", 3),
        enhanced("file", "read", "file",
                 "C:\\Documents and Settings\\cuckoo\\Application Data"
                 "\\Microsoft\\Address Book\\cuckoo.wab", 3),
        enhanced("file", "write", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\Temp"
                 "\\eml4A2.tmp", 2),
        enhanced("file", "delete", "file",
                 "C:\\Documents and Settings\\cuckoo\\Local Settings\\Temp"
                 "\\eml4A2.tmp", 1),
        enhanced("registry", "read", "regkey",
                 "HKEY_CURRENT_USER\\Software\\Microsoft\\Internet Account "
                 "Manager\\Accounts\\00000001\\POP3 Server", 3),
        enhanced("registry", "read", "regkey",
                 "HKEY_CURRENT_USER\\Software\\Microsoft\\Internet Account "
                 "Manager\\Accounts\\00000001\\SMTP Server", 4),
        enhanced("registry", "write", "regkey",
                 "HKEY_CURRENT_USER\\Identities\\Last User ID", 1),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\msoe.dll", 2),
        enhanced("library", "load", "file", "C:\\WINDOWS\\system32\\ws2_32.dll", 2),
        enhanced("dir", "create", "file", kMailRoot + "backup", 1),
    };
}

constexpr std::size_t kFlightPageCount = 1005;

std::string flight_page_path(std::size_t index) {
    static const char* kAirports[] = {"jfk", "lax", "ord", "dfw", "atl",
                                      "sfo", "sea", "mia", "bos", "den"};
    const std::size_t route = index / 30;
    const std::size_t day = index % 30 + 1;
    const std::size_t from = route / 9;
    const std::size_t toward = route % 9;
    const std::size_t to = toward + (toward >= from ? 1 : 0);
    char day_text[8];
    std::snprintf(day_text, sizeof day_text, "%02zu", day);
    return kCache + "KX3Y7A2Q\\flight_" + kAirports[from] + "_" + kAirports[to] +
           "_2017-06-" + day_text + "[1].htm";
}

Ev flight_page(std::size_t index, std::uint64_t count) {
    return enhanced("file", "read", "file", flight_page_path(index), count);
}

const Ev& places_write() {
    static const Ev ev =
        enhanced("file", "write", "file", kProfile + "places.sqlite", 1);
    return ev;
}

const Ev& formhistory_write() {
    static const Ev ev =
        enhanced("file", "write", "file", kProfile + "formhistory.sqlite", 1);
    return ev;
}

std::vector<Ev> flight_fixed_vocab() {
    return {
        enhanced("file", "write", "file", kProfile + "cookies.sqlite", 5),
        enhanced("file", "read", "file", kProfile + "prefs.js", 2),
        enhanced("file", "read", "file", kProfile + "cert8.db", 1),
        enhanced("file", "write", "file", kProfile + "urlclassifier3.sqlite", 2),
    };
}

// One flight-search session: a seed-selected slice of the page universe.
std::vector<Ev> flight_session_vocab(std::uint64_t seed) {
    std::vector<Ev> out = flight_fixed_vocab();
    for (std::size_t i = 0; i < kFlightPageCount; ++i) {
        if ((i + seed * 7) % 25 == 0) out.push_back(flight_page(i, 1));
    }
    if (flight_hosts_places(seed)) {
        Ev places = places_write();
        places.count = 4 + seed % 4;
        out.push_back(std::move(places));
    }
    if (flight_hosts_formhistory(seed)) {
        Ev formhistory = formhistory_write();
        formhistory.count = 40;
        out.push_back(std::move(formhistory));
    }
    return out;
}

// The exhaustive flight sweep mixed into the infected document: every page,
// with the history-database writes at the volumes that drive the dilution.
std::vector<Ev> flight_full_vocab() {
    std::vector<Ev> out = flight_fixed_vocab();
    out[0].count = 12;  // cookies.sqlite
    out[1].count = 4;   // prefs.js
    out[2].count = 2;   // cert8.db
    out[3].count = 6;   // urlclassifier3.sqlite
    for (std::size_t i = 0; i < kFlightPageCount; ++i) {
        out.push_back(flight_page(i, 1 + i % 3));
    }
    Ev places = places_write();
    places.count = 180;
    out.push_back(std::move(places));
    Ev formhistory = formhistory_write();
    formhistory.count = 300;
    out.push_back(std::move(formhistory));
    return out;
}

std::vector<Ev> ambient_vocab(ProfileKind kind, std::uint64_t seed) {
    std::vector<Ev> vocab;
    switch (kind) {
    case ProfileKind::ambient_browsing: vocab = browsing_vocab(); break;
    case ProfileKind::ambient_fileio: vocab = fileio_vocab(); break;
    case ProfileKind::ambient_email: vocab = email_vocab(); break;
    case ProfileKind::ambient_flights: return flight_session_vocab(seed);
    default: throw DomainError("not an ambient profile");
    }
    Rng rng(mix_seed(kind, seed, 0x11));
    for (auto& ev : vocab) ev.count += rng.below(3);

    if (hosts_shared_registry_read(kind, seed)) {
        Ev shared = shared_registry_read();
        shared.count = 1;
        vocab.push_back(std::move(shared));
    }
    const auto fillers = filler_entries();
    for (std::size_t i = 0; i < fillers.size(); ++i) {
        if (hosts_filler(kind, seed, i)) {
            Ev planted = fillers[i]->ev;
            planted.count = 1;
            vocab.push_back(std::move(planted));
        }
    }
    return vocab;
}

std::vector<Ev> wannacry_pre_vocab() {
    std::vector<Ev> out;
    for (const auto& entry : fixture_entries()) out.push_back(entry.ev);
    return out;
}

// Every pre-cutoff vocabulary entry of a profile, i.e. the document bag in
// event-spec form.
std::vector<Ev> profile_vocab(const SynthProfile& profile) {
    switch (profile.kind) {
    case ProfileKind::wannacry:
        return wannacry_pre_vocab();
    case ProfileKind::mixed_flights_wannacry: {
        std::vector<Ev> out = flight_full_vocab();
        const std::vector<Ev> wannacry = wannacry_pre_vocab();
        out.insert(out.end(), wannacry.begin(), wannacry.end());
        return out;
    }
    default:
        return ambient_vocab(profile.kind, profile.seed);
    }
}

std::string profile_doc_id(const SynthProfile& profile) {
    return std::string(to_string(profile.kind)) + "-seed" +
           std::to_string(profile.seed);
}

bool infected_kind(ProfileKind kind) {
    return kind == ProfileKind::wannacry ||
           kind == ProfileKind::mixed_flights_wannacry;
}

// ---------------------------------------------------------------------------
// Report emission. The behavior section is written record by record, so a
// scaled-up report never lives in memory as a whole.
// ---------------------------------------------------------------------------
class Timeline {
public:
    explicit Timeline(Rng& rng) : rng_(rng) {}

    std::string next() {
        ms_ += 3 + rng_.below(9);
        const std::uint64_t total_seconds = ms_ / 1000;
        char buf[40];
        std::snprintf(buf, sizeof buf, "2017-05-12 %02llu:%02llu:%02llu,%03llu",
                      static_cast<unsigned long long>(10 + total_seconds / 3600),
                      static_cast<unsigned long long>(total_seconds / 60 % 60),
                      static_cast<unsigned long long>(total_seconds % 60),
                      static_cast<unsigned long long>(ms_ % 1000));
        return buf;
    }

private:
    Rng& rng_;
    std::uint64_t ms_ = 121000;  // 10:02:01
};

std::string hex_token(Rng& rng, std::size_t digits) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digits);
    for (std::size_t i = 0; i < digits; ++i) out.push_back(hex[rng.below(16)]);
    return out;
}

json enhanced_record(const Ev& ev, std::int64_t eid, const std::string& ts) {
    return {
        {"event", ev.action},
        {"object", ev.object},
        {"timestamp", ts},
        {"eid", eid},
        {"data", {{ev.data_key, ev.value}}},
    };
}

json call_record(const Ev& ev, std::int64_t id, const std::string& ts) {
    json arguments = json::array();
    if (!ev.data_key.empty()) {
        if (ev.category == "registry") {
            arguments.push_back({{"name", "Registry"}, {"value", "0x80000002"}});
        }
        arguments.push_back({{"name", ev.data_key}, {"value", ev.value}});
        arguments.push_back({{"name", "Handle"}, {"value", "0x000001a4"}});
    }
    return {
        {"timestamp", ts},
        {"thread_id", "404"},
        {"category", ev.category},
        {"api", ev.action},
        {"status", true},
        {"return", "0x00000000"},
        {"arguments", arguments},
        {"repeated", 0},
        {"id", id},
    };
}

// Deals the multiset of scaled event instances in rounds over a seed-shuffled
// entry order: deterministic, interleaved, O(#entries) state.
class EventDealer {
public:
    EventDealer(const std::vector<Ev>& vocab, std::uint64_t scale, Rng& rng) {
        entries_.reserve(vocab.size());
        for (const auto& ev : vocab) entries_.push_back({&ev, ev.count * scale});
        for (std::size_t i = entries_.size(); i > 1; --i) {
            std::swap(entries_[i - 1], entries_[rng.below(i)]);
        }
    }

    const Ev* next() {
        while (!entries_.empty()) {
            if (cursor_ >= entries_.size()) cursor_ = 0;
            Entry& entry = entries_[cursor_];
            if (entry.remaining == 0) {
                entries_.erase(entries_.begin() +
                               static_cast<std::ptrdiff_t>(cursor_));
                continue;
            }
            --entry.remaining;
            ++cursor_;
            return entry.ev;
        }
        return nullptr;
    }

private:
    struct Entry {
        const Ev* ev;
        std::uint64_t remaining;
    };
    std::vector<Entry> entries_;
    std::size_t cursor_ = 0;
};

struct ReportVariant {
    bool mutate_banner = false;
    std::uint64_t hash_salt = 0;
    int av_positives = 61;
};

void emit_report(const SynthProfile& profile, const ReportVariant& variant,
                 std::ostream& out) {
    Rng rng(mix_seed(profile.kind, profile.seed, 0x01));
    Rng static_rng(mix_seed(profile.kind, profile.seed,
                            0xA0 + variant.hash_salt));
    Timeline timeline(rng);

    const bool infected = infected_kind(profile.kind);
    const std::string target_name =
        profile.kind == ProfileKind::wannacry ? "wannacry_sample.exe"
        : profile.kind == ProfileKind::mixed_flights_wannacry
            ? "flight_search_then_sample.py"
            : "normal_activity.py";

    const char* banner = variant.mutate_banner
                             ? "this-program-cannot-be-run-in-dos-mode."
                             : "This program cannot be run in DOS mode.";

    const json info = {
        {"version", "1.2"},
        {"id", profile.seed},
        {"category", "file"},
        {"package", infected ? "exe" : "python"},
        {"started", "2017-05-12 10:02:01"},
        {"duration", 295},
    };
    const json target = {
        {"category", "file"},
        {"file", {{"name", target_name}, {"size", 3514368},
                  {"type", "PE32 executable (GUI) Intel 80386"}}},
    };
    const json static_section = {
        {"md5", hex_token(static_rng, 32)},
        {"sha1", hex_token(static_rng, 40)},
        {"sha256", hex_token(static_rng, 64)},
        {"pe_imphash", hex_token(static_rng, 32)},
        {"strings", {banner, "kernel32.dll", "WNcry@2ol7", "msg/m_english.wnry"}},
        {"pe_sections", {{{"name", ".text"}, {"entropy", 6.42}},
                         {{"name", ".rdata"}, {"entropy", 5.11}}}},
    };
    const json virustotal = {
        {"positives", variant.av_positives},
        {"total", 63},
        {"scan_date", "2017-05-12 09:55:00"},
    };
    const json network = {{"hosts", json::array()}, {"dns", json::array()},
                          {"http", json::array()}};

    out << "{\n";
    out << "\"info\": " << info.dump() << ",\n";
    out << "\"target\": " << target.dump() << ",\n";
    out << "\"signatures\": [],\n";
    out << "\"static\": " << static_section.dump() << ",\n";
    out << "\"virustotal\": " << virustotal.dump() << ",\n";
    out << "\"network\": " << network.dump() << ",\n";
    out << "\"dropped\": [],\n";
    out << "\"behavior\": {\n";

    // processes with their API calls
    std::vector<Ev> calls;
    std::vector<Ev> vocab = profile_vocab(profile);
    for (auto it = vocab.begin(); it != vocab.end();) {
        if (it->kind == EventKind::api_call) {
            calls.push_back(*it);
            it = vocab.erase(it);
        } else {
            ++it;
        }
    }
    // API-call texture outside the ranked registry/RegCreateKeyExW slice
    calls.push_back(api_call("LdrLoadDll", "system", "FileName",
                             "C:\\WINDOWS\\system32\\kernel32.dll", 2));
    calls.push_back(api_call("NtCreateFile", "file", "FileName",
                             kTemp + "scratch.tmp", 3));
    calls.push_back(api_call("RegOpenKeyExW", "registry", "SubKey",
                             "Software\\Microsoft\\Windows\\CurrentVersion", 2));

    const std::string process_name = infected ? "tasksche.exe" : "python.exe";
    out << "\"processes\": [{\"process_name\": " << json(process_name).dump()
        << ", \"process_identifier\": 2044, \"parent_id\": 1436,"
        << " \"first_seen\": \"2017-05-12 10:02:02\", \"calls\": [";
    std::int64_t call_id = 0;
    bool first_record = true;
    for (const auto& call : calls) {
        // only the ranked registry call contributes to the bag, so only it
        // follows the scale multiplier
        const bool ranked = normalize_text(call.action) == "regcreatekeyexw";
        const std::uint64_t repeat = call.count * (ranked ? profile.scale : 1);
        for (std::uint64_t i = 0; i < repeat; ++i) {
            if (!first_record) out << ",\n";
            first_record = false;
            out << call_record(call, ++call_id, timeline.next()).dump();
        }
    }
    out << "]}],\n";

    out << "\"processtree\": [{\"name\": " << json(process_name).dump()
        << ", \"pid\": 2044, \"children\": []}],\n";
    out << "\"summary\": {\"files\": [], \"keys\": [], \"mutexes\": []},\n";

    // the enhanced stream: pre-cutoff events, then (infected only) the
    // private-key write followed by the post-encryption tail
    out << "\"enhanced\": [\n";
    std::int64_t eid = 0;
    first_record = true;
    const auto put = [&](const Ev& ev) {
        if (!first_record) out << ",\n";
        first_record = false;
        out << enhanced_record(ev, ++eid, timeline.next()).dump();
    };

    EventDealer dealer(vocab, profile.scale, rng);
    while (const Ev* ev = dealer.next()) put(*ev);
    if (infected) {
        put(cutoff_event());
        for (const auto& ev : post_encryption_events()) {
            for (std::uint64_t i = 0; i < ev.count; ++i) put(ev);
        }
        for (const auto& ev : post_encryption_seed_events(profile.seed)) {
            for (std::uint64_t i = 0; i < ev.count; ++i) put(ev);
        }
    }
    out << "\n],\n";
    out << "\"anomaly\": []\n";
    out << "},\n";
    out << "\"volatility\": {}\n";
    out << "}\n";
}

} // namespace

// ---------------------------------------------------------------------------
// Public surface.
// ---------------------------------------------------------------------------
const WannaCryFixture& wannacry_fixture() {
    static const WannaCryFixture fixture = [] {
        WannaCryFixture out;
        std::map<int, WannaCryFixture::Tier> tiers;
        for (const auto& entry : fixture_entries()) {
            const FeatureKey key = key_of(entry.ev);
            out.pre_encryption_keys.push_back({key, entry.ev.count});
            if (entry.tier == 0) {
                out.filler_keys.push_back(key);
            } else {
                auto& tier = tiers[entry.tier];
                tier.count = entry.ev.count;
                tier.df = entry.tier == 8 ? 3 : 1;
                tier.weight = static_cast<double>(entry.ev.count) *
                              std::log(5.0 / static_cast<double>(tier.df));
                tier.keys.push_back(key);
            }
        }
        for (auto& [index, tier] : tiers) {
            std::sort(tier.keys.begin(), tier.keys.end());
            out.published_tiers.push_back(std::move(tier));
        }
        out.cutoff_marker = key_of(cutoff_event());
        for (const auto& ev : post_encryption_events()) {
            out.post_encryption_keys.push_back(key_of(ev));
        }

        out.shared_keys.push_back({key_of(shared_registry_read()), {0, 1}});
        const auto fillers = filler_entries();
        for (std::size_t i = 0; i < fillers.size(); ++i) {
            // default ambient corpus: seeds 1..4 on browsing/fileio/email/
            // flights; filler i lands in the one seed of {1,2,3} matching its
            // planting residue
            const std::size_t residue = (1 + i) % 3;
            const std::size_t host_seed = residue == 0 ? 3 : residue;
            out.shared_keys.push_back({key_of(fillers[i]->ev), {host_seed - 1}});
        }
        return out;
    }();
    return fixture;
}

FeatureDocument generate_document(const SynthProfile& profile) {
    if (profile.scale < 1) throw DomainError("scale must be at least 1");
    FeatureDocument doc;
    doc.id = profile_doc_id(profile);
    doc.label = infected_kind(profile.kind) ? DocLabel::infected : DocLabel::ambient;
    doc.meta.source_ids.push_back(doc.id);
    doc.meta.cutoff_applied = infected_kind(profile.kind);
    for (const auto& ev : profile_vocab(profile)) {
        doc.bag[key_of(ev)] += ev.count * profile.scale;
    }
    return doc;
}

void generate_report(const SynthProfile& profile, std::ostream& out) {
    if (profile.scale < 1) throw DomainError("scale must be at least 1");
    ReportVariant variant;
    variant.av_positives = infected_kind(profile.kind) ? 61 : 0;
    emit_report(profile, variant, out);
}

void generate_polymorphic_pair(std::uint64_t seed, std::ostream& first,
                               std::ostream& second) {
    SynthProfile profile{ProfileKind::wannacry, seed, 1, EmitMode::full_report};
    ReportVariant original{false, 0, 0};
    ReportVariant mutated{true, 1, 0};
    emit_report(profile, original, first);
    emit_report(profile, mutated, second);
}

std::vector<SynthProfile> reference_ambient_profiles(std::size_t count) {
    static const ProfileKind kCycle[] = {
        ProfileKind::ambient_browsing, ProfileKind::ambient_fileio,
        ProfileKind::ambient_email, ProfileKind::ambient_flights};
    std::vector<SynthProfile> profiles;
    profiles.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        profiles.push_back({kCycle[i % 4], i + 1, 1, EmitMode::fdoc});
    }
    return profiles;
}

std::vector<FeatureDocument> reference_ambient_corpus(std::size_t count,
                                                      std::uint64_t scale) {
    std::vector<FeatureDocument> docs;
    docs.reserve(count);
    for (SynthProfile profile : reference_ambient_profiles(count)) {
        profile.scale = scale;
        docs.push_back(generate_document(profile));
    }
    return docs;
}

std::vector<FeatureDocument> flight_ambient_corpus(std::size_t count,
                                                   std::uint64_t scale) {
    std::vector<FeatureDocument> docs;
    docs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        docs.push_back(generate_document(
            {ProfileKind::ambient_flights, i + 1, scale, EmitMode::fdoc}));
    }
    return docs;
}

std::string unique_machine_id(std::uint64_t seed) {
    Rng rng(seed ^ 0xC6A4A7935BD1E995ULL);
    const std::size_t letters = 8 + rng.below(8);
    std::string out;
    out.reserve(letters + 3);
    for (std::size_t i = 0; i < letters; ++i) {
        out.push_back(static_cast<char>('a' + rng.below(26)));
    }
    for (std::size_t i = 0; i < 3; ++i) {
        out.push_back(static_cast<char>('0' + rng.below(10)));
    }
    return out;
}

const char* to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::wannacry: return "wannacry";
    case ProfileKind::ambient_browsing: return "ambient-browsing";
    case ProfileKind::ambient_fileio: return "ambient-fileio";
    case ProfileKind::ambient_email: return "ambient-email";
    case ProfileKind::ambient_flights: return "ambient-flights";
    case ProfileKind::mixed_flights_wannacry: return "mixed-flights-wannacry";
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
    std::string canonical = name;
    std::replace(canonical.begin(), canonical.end(), '_', '-');
    if (canonical == "wannacry") return ProfileKind::wannacry;
    if (canonical == "ambient-browsing") return ProfileKind::ambient_browsing;
    if (canonical == "ambient-fileio") return ProfileKind::ambient_fileio;
    if (canonical == "ambient-email") return ProfileKind::ambient_email;
    if (canonical == "ambient-flights") return ProfileKind::ambient_flights;
    if (canonical == "mixed-flights-wannacry") {
        return ProfileKind::mixed_flights_wannacry;
    }
    throw DomainError("unknown synth profile '" + name + "'");
}

} // namespace footprint
