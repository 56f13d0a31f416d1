#include "footprint/corpus.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "footprint/errors.hpp"
#include "footprint/report.hpp"

namespace footprint {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kDocsDir = "docs";
constexpr int kFormatVersion = 1;

// Advisory single-writer lock on <root>/.lock, held for the whole mutation.
class WriterLock {
public:
    explicit WriterLock(const fs::path& root) {
        const fs::path lock_path = root / ".lock";
        fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
            const int err = errno;
            if (fd_ >= 0) ::close(fd_);
            throw IoFailure("cannot lock corpus at '" + root.string() +
                            "': " + std::strerror(err));
        }
    }
    ~WriterLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    WriterLock(const WriterLock&) = delete;
    WriterLock& operator=(const WriterLock&) = delete;

private:
    int fd_ = -1;
};

// write-temp, fsync, rename: a crash leaves either the old or the new file.
void atomic_write(const fs::path& target, const std::string& bytes) {
    const fs::path tmp = target.string() + ".tmp";
    {
        const int fd = ::open(tmp.c_str(),
                              O_CREAT | O_TRUNC | O_WRONLY | O_CLOEXEC, 0644);
        if (fd < 0) {
            throw IoFailure("cannot create '" + tmp.string() + "': " +
                            std::strerror(errno));
        }
        std::size_t written = 0;
        while (written < bytes.size()) {
            const ssize_t n = ::write(fd, bytes.data() + written,
                                      bytes.size() - written);
            if (n < 0) {
                const int err = errno;
                ::close(fd);
                throw IoFailure("short write to '" + tmp.string() + "': " +
                                std::strerror(err));
            }
            written += static_cast<std::size_t>(n);
        }
        if (::fsync(fd) != 0 || ::close(fd) != 0) {
            throw IoFailure("cannot flush '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw IoFailure("cannot rename '" + tmp.string() + "' into place: " +
                        ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const char* label_name(DocLabel label) { return to_string(label); }

json manifest_to_json(const CorpusManifest& manifest) {
    json entries = json::array();
    for (const auto& entry : manifest.entries) {
        entries.push_back({
            {"doc_id", entry.doc_id},
            {"relative_path", entry.relative_path},
            {"label", label_name(entry.label)},
            {"digest", entry.digest},
            {"added_at", entry.added_at},
        });
    }
    return {
        {"format_version", manifest.format_version},
        {"name", manifest.name},
        {"count", manifest.entries.size()},
        {"entries", entries},
    };
}

CorpusManifest manifest_from_json(const json& root) {
    if (!root.is_object() || !root.contains("format_version")) {
        throw MalformedInput("manifest is not a corpus manifest", 0);
    }
    const int version = root["format_version"].get<int>();
    if (version != kFormatVersion) {
        throw VersionUnsupported("corpus manifest format_version " +
                                 std::to_string(version) + " is not supported");
    }
    CorpusManifest manifest;
    manifest.format_version = version;
    manifest.name = root.value("name", "");
    for (const auto& item : root.value("entries", json::array())) {
        CorpusManifest::Entry entry;
        entry.doc_id = item.at("doc_id").get<std::string>();
        entry.relative_path = item.at("relative_path").get<std::string>();
        entry.label = label_from_string(item.at("label").get<std::string>());
        entry.digest = item.at("digest").get<std::string>();
        entry.added_at = item.value("added_at", "");
        manifest.entries.push_back(std::move(entry));
    }
    if (root.contains("count") &&
        root["count"].get<std::size_t>() != manifest.entries.size()) {
        throw MalformedInput("manifest count disagrees with its entry list", 0);
    }
    return manifest;
}

CorpusManifest load_manifest(const fs::path& root) {
    const fs::path path = root / kManifestName;
    if (!fs::exists(path)) {
        throw MissingFile("no manifest at '" + path.string() + "'");
    }
    const json parsed = json::parse(read_file(path), nullptr, false);
    if (parsed.is_discarded()) {
        throw MalformedInput("manifest at '" + path.string() + "' is not JSON", 0);
    }
    try {
        return manifest_from_json(parsed);
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("manifest field has the wrong type: ") +
                             e.what(), 0);
    }
}

void store_manifest(const fs::path& root, const CorpusManifest& manifest) {
    atomic_write(root / kManifestName, manifest_to_json(manifest).dump(2) + "\n");
}

// Filesystem-safe document file name; a short id digest keeps distinct ids
// distinct even when sanitization collides.
std::string doc_file_name(const std::string& doc_id) {
    std::string safe;
    bool replaced = false;
    for (const char c : doc_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        safe.push_back(ok ? c : '_');
        replaced = replaced || !ok;
    }
    if (replaced || safe.empty()) {
        safe += "-" + sha256_hex(doc_id).substr(0, 8);
    }
    return safe + ".fdoc";
}

} // namespace

bool CorpusManifest::contains(const std::string& doc_id) const {
    for (const auto& entry : entries) {
        if (entry.doc_id == doc_id) return true;
    }
    return false;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char raw[EVP_MAX_MD_SIZE];
    unsigned int raw_len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), raw, &raw_len, EVP_sha256(),
                   nullptr) != 1) {
        throw IoFailure("SHA-256 failed");
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

CorpusManifest corpus_add(const fs::path& root, const FeatureDocument& doc,
                          const std::string& added_at) {
    std::error_code ec;
    fs::create_directories(root / kDocsDir, ec);
    if (ec) {
        throw IoFailure("cannot create corpus directory '" + root.string() +
                        "': " + ec.message());
    }
    WriterLock lock(root);

    CorpusManifest manifest;
    if (fs::exists(root / kManifestName)) {
        manifest = load_manifest(root);
    } else {
        manifest.name = root.filename().string();
    }
    if (manifest.contains(doc.id)) {
        throw DuplicateDocId("corpus already holds a document with id '" +
                             doc.id + "'");
    }

    const std::string bytes = to_fdoc_json(doc);
    CorpusManifest::Entry entry;
    entry.doc_id = doc.id;
    entry.relative_path = std::string(kDocsDir) + "/" + doc_file_name(doc.id);
    entry.label = doc.label;
    entry.digest = sha256_hex(bytes);
    entry.added_at = added_at.empty() ? iso8601_now() : added_at;

    atomic_write(root / entry.relative_path, bytes);
    manifest.entries.push_back(entry);
    store_manifest(root, manifest);
    return manifest;
}

CorpusManifest corpus_manifest(const fs::path& root) { return load_manifest(root); }

std::vector<FeatureDocument> corpus_load(const fs::path& root) {
    const CorpusManifest manifest = load_manifest(root);
    std::vector<FeatureDocument> docs;
    docs.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        const fs::path path = root / entry.relative_path;
        if (!fs::exists(path)) {
            throw MissingFile("document file for '" + entry.doc_id +
                              "' is missing: " + path.string());
        }
        const std::string bytes = read_file(path);
        if (sha256_hex(bytes) != entry.digest) {
            throw DigestMismatch("stored digest does not match file content for '" +
                                 entry.doc_id + "'");
        }
        FeatureDocument doc = from_fdoc_json(bytes);
        if (doc.id != entry.doc_id) {
            throw DigestMismatch("document id '" + doc.id +
                                 "' disagrees with manifest entry '" +
                                 entry.doc_id + "'");
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

CorpusManifest corpus_remove(const fs::path& root, const std::string& doc_id) {
    WriterLock lock(root);
    CorpusManifest manifest = load_manifest(root);

    auto it = manifest.entries.begin();
    for (; it != manifest.entries.end(); ++it) {
        if (it->doc_id == doc_id) break;
    }
    if (it == manifest.entries.end()) {
        throw UnknownDocId("corpus has no document with id '" + doc_id + "'");
    }
    const std::string relative_path = it->relative_path;
    manifest.entries.erase(it);

    // Manifest first: a crash in between leaves an orphan file, never a
    // manifest pointing at nothing.
    store_manifest(root, manifest);
    std::error_code ec;
    fs::remove(root / relative_path, ec);
    return manifest;
}

} // namespace footprint
