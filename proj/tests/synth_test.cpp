#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "footprint/feature.hpp"
#include "footprint/ingest.hpp"
#include "footprint/synth.hpp"

using namespace footprint;

namespace {

FeatureDocument ingest_report_text(const std::string& text, std::string id,
                                   DocLabel label) {
    std::istringstream in(text);
    StreamingDocumentBuilder builder(CutoffSpec{}, std::move(id), label);
    parse_report(in, {}, [&builder](LogEvent&& event) {
        if (is_ranked_behavior(event)) builder.push(event);
    });
    return builder.finish();
}

std::string report_text(const SynthProfile& profile) {
    std::ostringstream out;
    generate_report(profile, out);
    return out.str();
}

} // namespace

TEST_CASE("published weight tiers invert to unique integer counts") {
    // Exhaustive inversion of weight = count * ln(5/df) over count in
    // [1, 10^4], df in [1, 5]. Each published weight admits exactly one
    // solution, which pins the fixture's counts; frozen here as the oracle
    // that the fixture must keep matching.
    struct Expected {
        double weight;
        std::uint64_t count;
        std::size_t df;
    };
    const Expected table[] = {
        {299.36, 186, 1}, {33.80, 21, 1}, {24.14, 15, 1},
        {9.66, 6, 1},     {8.05, 5, 1},   {4.83, 3, 1},
        {3.22, 2, 1},     {2.04, 4, 3},   {1.61, 1, 1},
    };
    for (const auto& expected : table) {
        std::uint64_t found_count = 0;
        std::size_t found_df = 0;
        int solutions = 0;
        for (std::size_t df = 1; df <= 5; ++df) {
            for (std::uint64_t count = 1; count <= 10000; ++count) {
                const double weight =
                    static_cast<double>(count) *
                    std::log(5.0 / static_cast<double>(df));
                if (std::abs(weight - expected.weight) < 0.01) {
                    ++solutions;
                    found_count = count;
                    found_df = df;
                }
            }
        }
        REQUIRE(solutions == 1);
        CHECK(found_count == expected.count);
        CHECK(found_df == expected.df);
    }
}

TEST_CASE("the fixture carries 74 distinct pre-encryption keys, 43 published") {
    const auto& fixture = wannacry_fixture();
    std::set<FeatureKey> distinct;
    for (const auto& [key, count] : fixture.pre_encryption_keys) {
        CHECK(distinct.insert(key).second);
    }
    CHECK(distinct.size() == 74);
    CHECK(fixture.filler_keys.size() == 31);

    std::size_t published = 0;
    for (const auto& tier : fixture.published_tiers) published += tier.keys.size();
    CHECK(published == 43);
    REQUIRE(fixture.published_tiers.size() == 9);

    // tier structure: sizes and counts recovered from the published table
    const std::size_t sizes[] = {1, 1, 1, 3, 2, 24, 4, 1, 6};
    const std::uint64_t counts[] = {186, 21, 15, 6, 5, 3, 2, 4, 1};
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(fixture.published_tiers[i].keys.size() == sizes[i]);
        CHECK(fixture.published_tiers[i].count == counts[i]);
    }
    CHECK(fixture.published_tiers[7].df == 3);

    // the cutoff marker is not part of the document
    CHECK(distinct.count(fixture.cutoff_marker) == 0);
    CHECK(fixture.cutoff_marker.find("00000000.eky") != std::string::npos);
}

TEST_CASE("published key strings match the table forms") {
    const auto& fixture = wannacry_fixture();
    CHECK(fixture.published_tiers[0].keys[0] ==
          "enhanced:_object=file+event=write+data="
          "file:c:\\docume~1\\cuckoo\\locals~1\\temp\\s.wnry");
    CHECK(fixture.published_tiers[8].keys[0] ==
          "bigram:_api=regcreatekeyexw+arguments=software\\wanacrypt0r");
    bool found_attrib = false;
    for (const auto& key : fixture.published_tiers[8].keys) {
        found_attrib = found_attrib ||
                       key == "enhanced:_object=file+event=execute+data="
                              "file:attrib +h .";
    }
    CHECK(found_attrib);
}

TEST_CASE("the wannacry document is the fixture bag") {
    const auto doc = generate_document({ProfileKind::wannacry, 0, 1,
                                        EmitMode::fdoc});
    CHECK(doc.label == DocLabel::infected);
    CHECK(doc.bag.size() == 74);
    CHECK(doc.bag.at("enhanced:_object=file+event=write+data="
                     "file:c:\\docume~1\\cuckoo\\locals~1\\temp\\s.wnry") == 186);
    CHECK(doc.total() == 371);
}

TEST_CASE("generation is deterministic in (kind, seed, scale)") {
    const SynthProfile profile{ProfileKind::ambient_browsing, 42, 3,
                               EmitMode::fdoc};
    const auto a = generate_document(profile);
    const auto b = generate_document(profile);
    CHECK(a.bag == b.bag);
    CHECK(report_text({ProfileKind::wannacry, 9, 1, EmitMode::full_report}) ==
          report_text({ProfileKind::wannacry, 9, 1, EmitMode::full_report}));

    const auto other = generate_document({ProfileKind::ambient_browsing, 43, 3,
                                          EmitMode::fdoc});
    CHECK(a.bag != other.bag);
}

TEST_CASE("scale multiplies every count") {
    const auto base = generate_document({ProfileKind::wannacry, 0, 1,
                                         EmitMode::fdoc});
    const auto scaled = generate_document({ProfileKind::wannacry, 0, 7,
                                           EmitMode::fdoc});
    REQUIRE(base.bag.size() == scaled.bag.size());
    for (const auto& [key, count] : base.bag) {
        CHECK(scaled.bag.at(key) == count * 7);
    }
}

TEST_CASE("the default ambient corpus carries the intended plantings") {
    const auto& fixture = wannacry_fixture();
    const auto corpus = reference_ambient_corpus(4);
    REQUIRE(corpus.size() == 4);

    const FeatureKey& shared = fixture.shared_keys[0].key;
    CHECK(shared.find("cryptographic provider") != std::string::npos);
    std::size_t hosts = 0;
    for (const auto& doc : corpus) hosts += doc.bag.count(shared);
    CHECK(hosts == 2);
    CHECK(corpus[0].bag.count(shared) == 1);
    CHECK(corpus[1].bag.count(shared) == 1);

    // each filler is planted in exactly one ambient document
    for (const auto& filler : fixture.filler_keys) {
        std::size_t filler_hosts = 0;
        for (const auto& doc : corpus) filler_hosts += doc.bag.count(filler);
        CHECK(filler_hosts == 1);
    }

    // and no ambient document contains any published df=1 key
    for (const auto& tier : fixture.published_tiers) {
        if (tier.df != 1) continue;
        for (const auto& key : tier.keys) {
            for (const auto& doc : corpus) CHECK(doc.bag.count(key) == 0);
        }
    }
}

TEST_CASE("the mixed document covers 1,085 keys including all of wannacry") {
    const auto mixed = generate_document({ProfileKind::mixed_flights_wannacry, 1,
                                          1, EmitMode::fdoc});
    CHECK(mixed.label == DocLabel::infected);
    CHECK(mixed.bag.size() == 1085);
    const auto wannacry = generate_document({ProfileKind::wannacry, 1, 1,
                                             EmitMode::fdoc});
    for (const auto& [key, count] : wannacry.bag) {
        REQUIRE(mixed.bag.count(key) == 1);
        CHECK(mixed.bag.at(key) == count);
    }
    CHECK(mixed.bag.at("enhanced:_object=file+event=write+data="
                       "file:c:\\documents and settings\\cuckoo\\application data"
                       "\\mozilla\\firefox\\profiles\\qk4ev1cw.default"
                       "\\places.sqlite") == 180);
}

TEST_CASE("flight ambient documents never contain wannacry keys") {
    const auto wannacry = generate_document({ProfileKind::wannacry, 1, 1,
                                             EmitMode::fdoc});
    for (const auto& doc : flight_ambient_corpus(21)) {
        for (const auto& [key, count] : wannacry.bag) {
            CHECK(doc.bag.count(key) == 0);
        }
    }
}

TEST_CASE("places.sqlite lands in 14 of 21 flight documents, first four included") {
    const FeatureKey places =
        "enhanced:_object=file+event=write+data="
        "file:c:\\documents and settings\\cuckoo\\application data\\mozilla"
        "\\firefox\\profiles\\qk4ev1cw.default\\places.sqlite";
    const auto corpus = flight_ambient_corpus(21);
    std::size_t hosts = 0;
    for (const auto& doc : corpus) hosts += doc.bag.count(places);
    CHECK(hosts == 14);
    for (std::size_t i = 0; i < 4; ++i) CHECK(corpus[i].bag.count(places) == 1);
}

TEST_CASE("a report ingests back to exactly the generated document") {
    const SynthProfile profiles[] = {
        {ProfileKind::wannacry, 3, 1, EmitMode::full_report},
        {ProfileKind::wannacry, 17, 2, EmitMode::full_report},
        {ProfileKind::ambient_browsing, 1, 1, EmitMode::full_report},
        {ProfileKind::ambient_fileio, 2, 3, EmitMode::full_report},
        {ProfileKind::ambient_email, 3, 1, EmitMode::full_report},
        {ProfileKind::ambient_flights, 4, 1, EmitMode::full_report},
        {ProfileKind::mixed_flights_wannacry, 1, 1, EmitMode::full_report},
    };
    for (const auto& profile : profiles) {
        CAPTURE(to_string(profile.kind));
        SynthProfile doc_profile = profile;
        doc_profile.emit = EmitMode::fdoc;
        const auto expected = generate_document(doc_profile);
        const auto ingested =
            ingest_report_text(report_text(profile), expected.id, expected.label);
        CHECK(ingested.bag == expected.bag);
        CHECK(ingested.meta.cutoff_applied == expected.meta.cutoff_applied);
    }
}

TEST_CASE("wannacry reports place every post-encryption artifact after the key") {
    const auto& fixture = wannacry_fixture();
    const std::string text =
        report_text({ProfileKind::wannacry, 5, 1, EmitMode::full_report});

    std::istringstream in(text);
    std::vector<FeatureKey> keys;
    parse_report(in, {}, [&keys](LogEvent&& event) {
        if (is_ranked_behavior(event)) keys.push_back(canonicalize(event));
    });

    std::size_t cut = keys.size();
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].find("00000000.eky") != std::string::npos) {
            cut = i;
            break;
        }
    }
    REQUIRE(cut < keys.size());
    std::set<FeatureKey> pre(keys.begin(), keys.begin() + cut);
    CHECK(pre.size() == 74);
    for (const auto& post : fixture.post_encryption_keys) {
        // the config-file rewrite is the one post event whose key also exists
        // pre-encryption
        if (post.find("c.wnry") != std::string::npos) continue;
        CHECK(pre.count(post) == 0);
    }
    const std::string uid = unique_machine_id(5);
    for (const auto& key : pre) {
        CHECK(key.find(uid) == std::string::npos);
        CHECK(key.find("~sd") == std::string::npos);
    }
}

TEST_CASE("polymorphic reports differ in bytes, agree in behavior") {
    std::ostringstream first, second;
    generate_polymorphic_pair(11, first, second);
    CHECK(first.str() != second.str());
    CHECK(first.str().find("This program cannot be run in DOS mode.") !=
          std::string::npos);
    CHECK(second.str().find("this-program-cannot-be-run-in-dos-mode.") !=
          std::string::npos);

    const auto doc_a = ingest_report_text(first.str(), "sample", DocLabel::infected);
    const auto doc_b = ingest_report_text(second.str(), "sample", DocLabel::infected);
    CHECK(doc_a.bag == doc_b.bag);
    CHECK(to_fdoc_json(doc_a) == to_fdoc_json(doc_b));
}

TEST_CASE("profile names parse with either separator") {
    CHECK(profile_kind_from_string("wannacry") == ProfileKind::wannacry);
    CHECK(profile_kind_from_string("ambient-flights") ==
          ProfileKind::ambient_flights);
    CHECK(profile_kind_from_string("mixed_flights_wannacry") ==
          ProfileKind::mixed_flights_wannacry);
}

TEST_CASE("unique machine ids look like the documented pattern") {
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::string uid = unique_machine_id(seed);
        CHECK(uid == unique_machine_id(seed));
        REQUIRE(uid.size() >= 11);
        REQUIRE(uid.size() <= 18);
        for (std::size_t i = 0; i + 3 < uid.size(); ++i) {
            CHECK(uid[i] >= 'a');
            CHECK(uid[i] <= 'z');
        }
        for (std::size_t i = uid.size() - 3; i < uid.size(); ++i) {
            CHECK(uid[i] >= '0');
            CHECK(uid[i] <= '9');
        }
        seen.insert(uid);
    }
    CHECK(seen.size() > 40);  // seeds rarely collide
}
