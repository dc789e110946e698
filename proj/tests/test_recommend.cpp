#include <doctest.h>

#include <random>
#include <set>

#include "helpers/oracles.hpp"
#include "queryrec/errors.hpp"
#include "queryrec/ngram.hpp"
#include "queryrec/recommend.hpp"

using namespace queryrec;

namespace {

std::vector<SearchHit> hits_of(const std::vector<std::string>& ids) {
    std::vector<SearchHit> hits;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        hits.push_back(SearchHit{ids[i], 10.0 - static_cast<double>(i), static_cast<int>(i) + 1});
    }
    return hits;
}

std::vector<std::string> ids_of(const std::vector<RecommendedItem>& items) {
    std::vector<std::string> ids;
    for (const auto& item : items) {
        ids.push_back(item.item_id);
    }
    return ids;
}

/// Test generator with canned responses.
class FixedGenerator : public QueryGenerator {
public:
    explicit FixedGenerator(std::vector<Query> queries) : queries_(std::move(queries)) {}
    GenerationResult generate(const std::string&, const std::vector<std::string>&, int m,
                              int) override {
        GenerationResult result;
        const std::size_t count = std::min<std::size_t>(queries_.size(), static_cast<std::size_t>(m));
        result.queries.assign(queries_.begin(), queries_.begin() + static_cast<std::ptrdiff_t>(count));
        result.deficit = result.queries.size() < static_cast<std::size_t>(m);
        return result;
    }

private:
    std::vector<Query> queries_;
};

} // namespace

TEST_CASE("merge_results") {
    SUBCASE("single query degenerates to its top-K") {
        auto merged = merge_results({hits_of({"A", "B", "C", "D"})}, 3);
        CHECK(ids_of(merged) == std::vector<std::string>{"A", "B", "C"});
        CHECK(merged[0].source_query == 0);
        CHECK(merged[0].source_rank == 1);
        CHECK(merged[2].source_rank == 3);
    }

    SUBCASE("K=4 m=2 hand trace with a duplicate") {
        auto merged = merge_results({hits_of({"A", "B", "C"}), hits_of({"B", "D", "E"})}, 4);
        CHECK(ids_of(merged) == std::vector<std::string>{"A", "B", "D", "E"});
        CHECK(merged[2].source_query == 1);
        CHECK(merged[2].source_rank == 2); // D was rank 2 in its own list
    }

    SUBCASE("K=5 m=2 with an unfillable quota backfills") {
        auto merged = merge_results({hits_of({"A"}), hits_of({"B", "C", "D", "E", "F"})}, 5);
        CHECK(ids_of(merged) == std::vector<std::string>{"A", "B", "C", "D", "E"});
    }

    SUBCASE("zero query results is an error") {
        CHECK_THROWS_AS(merge_results({}, 5), std::invalid_argument);
    }

    SUBCASE("K smaller than m gives the remainder to the top queries") {
        auto merged = merge_results(
            {hits_of({"A", "B"}), hits_of({"C", "D"}), hits_of({"E", "F"})}, 2);
        // base quota 0; the first K mod m = 2 queries get one slot each
        CHECK(ids_of(merged) == std::vector<std::string>{"A", "C"});
    }

    SUBCASE("10000 random instances keep the contract") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 10000; ++trial) {
            const std::size_t m = 1 + rng() % 6;
            const std::size_t k = 1 + rng() % 12;
            std::vector<std::vector<SearchHit>> hit_lists;
            std::set<std::string> distinct;
            for (std::size_t q = 0; q < m; ++q) {
                std::vector<std::string> ids;
                std::set<std::string> seen;
                const std::size_t len = rng() % 10;
                for (std::size_t i = 0; i < len; ++i) {
                    std::string id = "i" + std::to_string(rng() % 20);
                    if (seen.insert(id).second) {
                        ids.push_back(id);
                        distinct.insert(id);
                    }
                }
                hit_lists.push_back(hits_of(ids));
            }
            const auto merged = merge_results(hit_lists, k);

            // duplicate-free
            const auto merged_ids = ids_of(merged);
            std::set<std::string> unique(merged_ids.begin(), merged_ids.end());
            CHECK(unique.size() == merged.size());
            // length == min(K, distinct available)
            CHECK(merged.size() == std::min(k, distinct.size()));
            // top-query prefix property
            const auto& top_hits = hit_lists[0];
            const std::size_t quota = k / m + (k % m > 0 ? 1 : 0);
            const std::size_t prefix = std::min(quota, top_hits.size());
            for (std::size_t i = 0; i < std::min(prefix, merged.size()); ++i) {
                CHECK(merged[i].item_id == top_hits[i].item_id);
                CHECK(merged[i].source_query == 0);
            }
        }
    }

    SUBCASE("merge depends only on item order, not scores") {
        auto lists_a = std::vector<std::vector<SearchHit>>{hits_of({"A", "B"}), hits_of({"C"})};
        auto lists_b = lists_a;
        for (auto& list : lists_b) {
            for (auto& hit : list) {
                hit.score *= 37.5; // same order, different magnitudes
            }
        }
        CHECK(ids_of(merge_results(lists_a, 3)) == ids_of(merge_results(lists_b, 3)));
    }
}

TEST_CASE("recommend_for_user") {
    // catalog: three beauty-ish items plus one sharing a rare term with the
    // user's history
    Catalog catalog;
    catalog.emplace("h1", Item{"h1", "velvet matte lipstick", {"makeup"}, std::nullopt});
    catalog.emplace("h2", Item{"h2", "velvet eye shadow", {"makeup"}, std::nullopt});
    catalog.emplace("r1", Item{"r1", "velvet nail polish", {"makeup"}, std::nullopt});
    catalog.emplace("x1", Item{"x1", "garden hose", {"outdoor"}, std::nullopt});
    auto index = InvertedIndex::build(catalog);
    const Bm25Params params{1.2, 0.75};

    SUBCASE("m == K gives each query one slot") {
        FixedGenerator generator({{"velvet matte lipstick", -0.1}, {"garden hose", -0.2}});
        RecommendOptions options{2, 2, 8, false};
        auto rec = recommend_for_user("u", {"h1", "h2"}, catalog, generator, index, params, options);
        REQUIRE(rec.items.size() == 2);
        CHECK(rec.items[0].source_query == 0);
        CHECK(rec.items[1].source_query == 1);
        CHECK(rec.items[1].item_id == "x1");
    }

    SUBCASE("deterministic across runs") {
        auto run = [&] {
            FixedGenerator generator({{"velvet", -0.1}, {"polish", -0.2}});
            RecommendOptions options{2, 4, 8, false};
            return recommend_for_user("u", {"h1"}, catalog, generator, index, params, options);
        };
        auto first = run();
        auto second = run();
        CHECK(ids_of(first.items) == ids_of(second.items));
        REQUIRE(first.queries.size() == second.queries.size());
        for (std::size_t i = 0; i < first.queries.size(); ++i) {
            CHECK(first.queries[i].text == second.queries[i].text);
            CHECK(first.queries[i].score == second.queries[i].score);
        }
    }

    SUBCASE("rare shared term surfaces the related item under the builtin generator") {
        // history titles share "velvet" with r1; the biased mixture must
        // produce velvet-bearing queries that retrieve it
        std::vector<std::string> lines;
        for (const auto& [id, item] : catalog) {
            lines.push_back(item.title + "</s>");
        }
        auto model = NGramModel::fit(lines, 2, 0.1);
        BuiltinGenerator generator(model, 0.7, 0.7);
        RecommendOptions options{4, 3, 6, false};
        auto rec = recommend_for_user("u", {"h1", "h2"}, catalog, generator, index, params, options);
        const auto ids = ids_of(rec.items);
        CHECK(std::find(ids.begin(), ids.end(), "r1") != ids.end());
    }

    SUBCASE("exclude-history drops interacted items but keeps provenance ranks") {
        FixedGenerator generator({{"velvet", -0.1}});
        RecommendOptions options{1, 3, 8, true};
        auto rec = recommend_for_user("u", {"h1", "h2"}, catalog, generator, index, params, options);
        for (const auto& item : rec.items) {
            CHECK(item.item_id != "h1");
            CHECK(item.item_id != "h2");
        }
        REQUIRE(!rec.items.empty());
        // r1 kept its rank from the unfiltered hit list
        const auto unfiltered = index.search(params, "velvet", 3);
        for (const auto& item : rec.items) {
            bool found = false;
            for (const auto& hit : unfiltered) {
                if (hit.item_id == item.item_id) {
                    CHECK(item.source_rank == hit.rank);
                    found = true;
                }
            }
            CHECK(found);
        }
    }

    SUBCASE("generator returning nothing is an error") {
        FixedGenerator generator({});
        RecommendOptions options{2, 4, 8, false};
        CHECK_THROWS_AS(
            recommend_for_user("u", {"h1"}, catalog, generator, index, params, options), DataError);
    }

    SUBCASE("short query list proceeds with recomputed quotas") {
        FixedGenerator generator({{"velvet", -0.1}}); // one query, m asks for three
        RecommendOptions options{3, 3, 8, false};
        auto rec = recommend_for_user("u", {"h1"}, catalog, generator, index, params, options);
        CHECK(rec.query_deficit);
        CHECK(rec.items.size() == 3); // the single query fills all three slots
    }
}
