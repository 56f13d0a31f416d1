#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "footprint/feature.hpp"

namespace footprint {

enum class ProfileKind {
    wannacry,
    ambient_browsing,
    ambient_fileio,
    ambient_email,
    ambient_flights,
    mixed_flights_wannacry,
};

enum class EmitMode { fdoc, full_report };

/// Everything a synthetic document or report is a pure function of.
struct SynthProfile {
    ProfileKind kind = ProfileKind::wannacry;
    std::uint64_t seed = 0;
    std::uint64_t scale = 1;  // multiplies every event count
    EmitMode emit = EmitMode::fdoc;
};

/// The frozen WannaCry footprint behind the wannacry profile. Counts were
/// fixed by exhaustively inverting the published weight tiers under
/// weight = count x ln(5/df) over count in [1,10^4], df in [1,5]; each tier
/// inverts to a unique (count, df) pair.
struct WannaCryFixture {
    struct KeyCount {
        FeatureKey key;
        std::uint64_t count;
    };
    struct SharedKey {
        FeatureKey key;
        std::vector<std::size_t> ambient_doc_indices;  // within the default 4
    };
    struct Tier {
        double weight;            // at the default 1 infected + 4 ambient corpus
        std::uint64_t count;
        std::size_t df;           // within the default corpus
        std::vector<FeatureKey> keys;
    };

    std::vector<KeyCount> pre_encryption_keys;   // exactly 74 distinct keys
    std::vector<Tier> published_tiers;           // the 43 published keys, 9 tiers
    std::vector<FeatureKey> filler_keys;         // the 31 unpublished keys
    FeatureKey cutoff_marker;                    // contains "00000000.eky"
    std::vector<FeatureKey> post_encryption_keys;  // seed-independent subset
    std::vector<SharedKey> shared_keys;          // df > 1 plantings
};

const WannaCryFixture& wannacry_fixture();

/// Seed-deterministic bag for the profile. wannacry yields the fixture's
/// pre-encryption bag; ambient kinds draw from per-profile vocabularies that
/// never overlap the published WannaCry keys except the plantings recorded in
/// shared_keys; mixed_flights_wannacry is the union of a full flight-search
/// sweep and the wannacry stream (1,085 distinct pre-cutoff keys).
FeatureDocument generate_document(const SynthProfile& profile);

/// Cuckoo-shaped JSON report whose behavior section ingests back to exactly
/// generate_document(profile). Includes inert static/virustotal/network
/// sections; infected profiles place every post-encryption event strictly
/// after the 00000000.eky write. Streams: memory use is independent of scale.
void generate_report(const SynthProfile& profile, std::ostream& out);

/// Two wannacry reports with byte-identical behavior sections but different
/// static-section hashes and a case/space-mutated PE banner string, so the
/// pair is byte-unequal yet behaviorally indistinguishable.
void generate_polymorphic_pair(std::uint64_t seed, std::ostream& first,
                               std::ostream& second);

/// The ambient corpus the wannacry experiments rank against: `count`
/// documents cycling browsing/fileio/email/flights profiles with seeds
/// 1..count. Shared-key plantings are a pure function of (kind, seed), so
/// document i is bit-identical to generate_document of that profile.
std::vector<SynthProfile> reference_ambient_profiles(std::size_t count);
std::vector<FeatureDocument> reference_ambient_corpus(std::size_t count,
                                                      std::uint64_t scale = 1);

/// Flight-search ambient corpus for the mixed-document dilution experiment
/// (seeds 1..count; places.sqlite planted in the first 14 flight documents).
std::vector<FeatureDocument> flight_ambient_corpus(std::size_t count,
                                                   std::uint64_t scale = 1);

ProfileKind profile_kind_from_string(const std::string& name);
const char* to_string(ProfileKind kind);

/// Victim-machine unique identifier in the WannaCry style: 8-15 random
/// lowercase letters followed by three digits, a pure function of the seed.
/// Appears only in post-encryption events of generated reports.
std::string unique_machine_id(std::uint64_t seed);

} // namespace footprint
