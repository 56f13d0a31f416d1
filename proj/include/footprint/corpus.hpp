#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "footprint/feature.hpp"

namespace footprint {

/// Persisted index of a document corpus. Layout on disk:
///   <root>/manifest.json
///   <root>/docs/<doc_id>.fdoc
/// Every entry records the SHA-256 of its document file; loads verify it.
struct CorpusManifest {
    struct Entry {
        std::string doc_id;
        std::string relative_path;
        DocLabel label = DocLabel::ambient;
        std::string digest;    // SHA-256 hex of the .fdoc bytes
        std::string added_at;  // ISO-8601
    };

    int format_version = 1;
    std::string name;
    std::vector<Entry> entries;

    std::size_t count() const { return entries.size(); }
    bool contains(const std::string& doc_id) const;
};

/// Serialize the document and append it to the corpus, rewriting the manifest
/// atomically (write-temp-then-rename). Initializes the corpus directory on
/// first use. Throws DuplicateDocId / IoFailure.
CorpusManifest corpus_add(const std::filesystem::path& root,
                          const FeatureDocument& doc,
                          const std::string& added_at = "");

/// Load every document in manifest order, verifying each entry's digest.
/// Throws MissingFile / DigestMismatch (naming the entry) / VersionUnsupported.
std::vector<FeatureDocument> corpus_load(const std::filesystem::path& root);

CorpusManifest corpus_manifest(const std::filesystem::path& root);

/// Remove an entry and its file; the manifest rewrite happens first so a
/// crash never leaves a manifest pointing at a missing file as current state.
CorpusManifest corpus_remove(const std::filesystem::path& root,
                             const std::string& doc_id);

/// SHA-256 hex digest of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace footprint
