#include <doctest.h>

#include <cmath>
#include <random>

#include "footprint/errors.hpp"
#include "footprint/rank.hpp"
#include "oracle.hpp"

using namespace footprint;

namespace {

FeatureDocument doc(std::string id, DocLabel label,
                    std::map<FeatureKey, std::uint64_t> bag) {
    FeatureDocument d;
    d.id = std::move(id);
    d.label = label;
    d.bag = std::move(bag);
    return d;
}

std::vector<FeatureDocument> random_corpus(std::mt19937_64& rng) {
    const std::size_t n_docs = 2 + rng() % 4;       // 2..5
    const std::size_t vocab = 1 + rng() % 50;       // shared key universe
    std::vector<FeatureDocument> corpus;
    for (std::size_t d = 0; d < n_docs; ++d) {
        FeatureDocument document;
        document.id = d == 0 ? "infected" : "ambient" + std::to_string(d);
        document.label = d == 0 ? DocLabel::infected : DocLabel::ambient;
        const std::size_t keys = 1 + rng() % 50;
        for (std::size_t k = 0; k < keys; ++k) {
            document.bag["key" + std::to_string(rng() % vocab)] = 1 + rng() % 20;
        }
        corpus.push_back(std::move(document));
    }
    return corpus;
}

} // namespace

TEST_CASE("term frequency in both modes") {
    CHECK(term_frequency(5, 100, TfMode::length_normalized) == doctest::Approx(0.05));
    CHECK(term_frequency(0, 100, TfMode::length_normalized) == 0.0);
    CHECK(term_frequency(186, 12345, TfMode::raw_count) == 186.0);
    CHECK_THROWS_AS(term_frequency(0, 0, TfMode::length_normalized), EmptyDocument);
}

TEST_CASE("inverse document frequency values") {
    CHECK(inverse_document_frequency(1, 5, IdfMode::unsmoothed, LogBase::natural) ==
          doctest::Approx(1.6094).epsilon(1e-4));
    CHECK(inverse_document_frequency(5, 5, IdfMode::unsmoothed, LogBase::natural) ==
          0.0);
    CHECK(inverse_document_frequency(1, 5, IdfMode::plus_one_smoothed,
                                     LogBase::natural) ==
          doctest::Approx(0.9163).epsilon(1e-4));
    CHECK(inverse_document_frequency(1, 100, IdfMode::unsmoothed, LogBase::base10) ==
          doctest::Approx(2.0));
    // smoothed mode goes negative when df = n_docs
    CHECK(inverse_document_frequency(5, 5, IdfMode::plus_one_smoothed,
                                     LogBase::natural) < 0.0);
}

TEST_CASE("idf domain errors") {
    CHECK_THROWS_AS(inverse_document_frequency(0, 5, IdfMode::unsmoothed,
                                               LogBase::natural),
                    DomainError);
    CHECK_THROWS_AS(inverse_document_frequency(6, 5, IdfMode::unsmoothed,
                                               LogBase::natural),
                    DomainError);
}

TEST_CASE("published weight values under the reproducing convention") {
    const auto config = RankingConfig::paper_consistent();
    CHECK(tfidf_weight(186, 371, 1, 5, config) ==
          doctest::Approx(299.36).epsilon(0.01 / 299.36));
    CHECK(tfidf_weight(4, 371, 3, 5, config) ==
          doctest::Approx(2.04).epsilon(0.01 / 2.04));
    CHECK(tfidf_weight(1, 371, 1, 5, config) ==
          doctest::Approx(1.61).epsilon(0.01 / 1.61));
}

TEST_CASE("rank_features on a single discriminative key") {
    const std::vector<FeatureDocument> corpus = {
        doc("infected", DocLabel::infected, {{"only", 3}}),
        doc("ambient1", DocLabel::ambient, {{"noise", 1}}),
    };
    const auto ranked =
        rank_features(corpus, "infected", RankingConfig::paper_consistent());
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[0].df == 1);
    CHECK(ranked[0].weight == doctest::Approx(3 * std::log(2.0)));
}

TEST_CASE("rank_features validates its corpus") {
    const std::vector<FeatureDocument> one = {
        doc("infected", DocLabel::infected, {{"k", 1}})};
    CHECK_THROWS_AS(
        rank_features(one, "infected", RankingConfig::paper_consistent()),
        CorpusTooSmall);

    const std::vector<FeatureDocument> two = {
        doc("a", DocLabel::ambient, {{"k", 1}}),
        doc("b", DocLabel::ambient, {{"k", 1}})};
    CHECK_THROWS_AS(rank_features(two, "missing", RankingConfig::paper_consistent()),
                    UnknownInfectedId);
}

TEST_CASE("equal weights share a rank and the next rank skips") {
    const std::vector<FeatureDocument> corpus = {
        doc("infected", DocLabel::infected, {{"a", 2}, {"b", 2}, {"c", 1}}),
        doc("ambient1", DocLabel::ambient, {{"z", 1}}),
    };
    const auto ranked =
        rank_features(corpus, "infected", RankingConfig::paper_consistent());
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[1].rank == 1);
    CHECK(ranked[2].rank == 3);
    // lexicographic inside the tie
    CHECK(ranked[0].key == "a");
    CHECK(ranked[1].key == "b");
}

TEST_CASE("ranking equals the brute-force oracle on random corpora") {
    std::mt19937_64 rng(1234);
    const RankingConfig configs[] = {RankingConfig::paper_consistent(),
                                     RankingConfig::paper_stated()};
    for (int round = 0; round < 100; ++round) {
        const auto corpus = random_corpus(rng);
        for (const auto& config : configs) {
            const auto got = rank_features(corpus, "infected", config);
            const auto want = oracle::rank(corpus, "infected", config);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].key == want[i].key);
                CHECK(got[i].rank == want[i].rank);
                CHECK(got[i].df == want[i].df);
                CHECK(std::abs(got[i].weight - want[i].weight) <= 1e-9);
            }
        }
    }
}

TEST_CASE("reordering ambient documents never changes the ranking") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 25; ++round) {
        auto corpus = random_corpus(rng);
        auto shuffled = corpus;
        std::shuffle(shuffled.begin() + 1, shuffled.end(), rng);
        const auto a =
            rank_features(corpus, "infected", RankingConfig::paper_consistent());
        const auto b =
            rank_features(shuffled, "infected", RankingConfig::paper_consistent());
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].key == b[i].key);
            CHECK(a[i].weight == b[i].weight);
            CHECK(a[i].rank == b[i].rank);
        }
    }
}

TEST_CASE("df=1 keys order by raw count, stable under ambient growth") {
    std::vector<FeatureDocument> corpus = {
        doc("infected", DocLabel::infected,
            {{"heavy", 20}, {"medium", 7}, {"light", 2}}),
        doc("ambient1", DocLabel::ambient, {{"noise1", 4}}),
        doc("ambient2", DocLabel::ambient, {{"noise2", 4}}),
    };
    const auto order_of = [](const std::vector<RankedFeature>& ranked) {
        std::vector<std::string> keys;
        for (const auto& f : ranked) keys.push_back(f.key);
        return keys;
    };
    const auto base =
        rank_features(corpus, "infected", RankingConfig::paper_consistent());
    CHECK(order_of(base) == std::vector<std::string>{"heavy", "medium", "light"});

    for (int extra = 0; extra < 12; ++extra) {
        corpus.push_back(doc("extra" + std::to_string(extra), DocLabel::ambient,
                             {{"other" + std::to_string(extra), 9}}));
        const auto grown =
            rank_features(corpus, "infected", RankingConfig::paper_consistent());
        CHECK(order_of(grown) == order_of(base));
    }
}

TEST_CASE("scaling every infected count by k scales weights and keeps order") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        auto corpus = random_corpus(rng);
        const std::uint64_t k = 2 + rng() % 9;
        auto scaled = corpus;
        for (auto& [key, count] : scaled[0].bag) count *= k;

        const auto base =
            rank_features(corpus, "infected", RankingConfig::paper_consistent());
        const auto grown =
            rank_features(scaled, "infected", RankingConfig::paper_consistent());
        REQUIRE(base.size() == grown.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(base[i].key == grown[i].key);
            CHECK(base[i].rank == grown[i].rank);
            CHECK(grown[i].weight ==
                  doctest::Approx(base[i].weight * static_cast<double>(k))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("a key present in every document can never outrank a rarer one") {
    const std::vector<FeatureDocument> corpus = {
        doc("infected", DocLabel::infected, {{"everywhere", 1000}, {"rare", 1}}),
        doc("ambient1", DocLabel::ambient, {{"everywhere", 1}}),
        doc("ambient2", DocLabel::ambient, {{"everywhere", 5}}),
    };
    const auto ranked =
        rank_features(corpus, "infected", RankingConfig::paper_consistent());
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].key == "rare");
    CHECK(ranked[1].key == "everywhere");
    CHECK(ranked[1].weight == 0.0);
}

TEST_CASE("group_tiers partitions a ranking by shared weight") {
    const std::vector<FeatureDocument> corpus = {
        doc("infected", DocLabel::infected, {{"a", 2}, {"b", 2}, {"c", 1}}),
        doc("ambient1", DocLabel::ambient, {{"z", 1}}),
    };
    const auto tiers = group_tiers(
        rank_features(corpus, "infected", RankingConfig::paper_consistent()));
    REQUIRE(tiers.size() == 2);
    CHECK(tiers[0].features.size() == 2);
    CHECK(tiers[0].rank == 1);
    CHECK(tiers[1].features.size() == 1);
    CHECK(tiers[1].rank == 3);
}
