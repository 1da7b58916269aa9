#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "relrec/error.hpp"
#include "relrec/recommender.hpp"

using namespace relrec;
using namespace relrec::recommender;

namespace {

Ranking ranking(std::vector<ScoredPaper> e) { return {std::move(e), "m", ""}; }

std::shared_ptr<const relmat::NeighborStore> store(
    const std::map<PaperId, std::vector<ScoredPaper>>& lists) {
  auto s = std::make_shared<relmat::NeighborStore>();
  for (const auto& [k, v] : lists) s->set(k, v);
  return s;
}

}  // namespace

TEST_CASE("aggregation examples") {
  const std::vector<Ranking> in = {ranking({{"a", 2}}), ranking({{"a", 1}, {"b", 4}})};
  CHECK(aggregate(in, AggFn::Sum).entries == std::vector<ScoredPaper>{{"b", 4}, {"a", 3}});
  CHECK(aggregate(in, AggFn::Max).entries == std::vector<ScoredPaper>{{"b", 4}, {"a", 2}});
  CHECK(aggregate(in, AggFn::Min).entries == std::vector<ScoredPaper>{{"b", 4}, {"a", 1}});
  CHECK(aggregate(in, AggFn::Mean).entries == std::vector<ScoredPaper>{{"b", 4}, {"a", 1.5}});
  CHECK(aggregate(in, AggFn::Min, true).entries == std::vector<ScoredPaper>{{"a", 1}});
  CHECK_THROWS_AS(aggregate({}, AggFn::Sum), Error);
}

TEST_CASE("single ranking is unchanged") {
  const auto one = ranking({{"c", 5}, {"a", 2}, {"b", 2}});
  for (const auto fn : {AggFn::Min, AggFn::Mean, AggFn::Max, AggFn::Sum}) {
    CHECK(aggregate({one}, fn).entries == one.entries);
  }
  CHECK(parse_agg("mean") == AggFn::Mean);
  CHECK_FALSE(parse_agg("median").has_value());
}

TEST_CASE("ties break by id") {
  std::vector<ScoredPaper> v = {{"b", 1}, {"c", 2}, {"a", 1}};
  sort_ranking(v);
  CHECK(v == std::vector<ScoredPaper>{{"c", 2}, {"a", 1}, {"b", 1}});
}

TEST_CASE("recommend for a set") {
  const auto lists = store({{"p", {{"q", 3}, {"r", 2}, {"s", 1}}}, {"q", {{"p", 3}, {"r", 3}}}});
  const StoreSource source("co-download", lists);
  RecommendOptions opts;

  const auto single = recommend_for_set({"p"}, source, opts);
  CHECK(single.ranking.entries == std::vector<ScoredPaper>{{"q", 3}, {"r", 2}, {"s", 1}});

  const auto pair = recommend_for_set({"p", "q", "p"}, source, opts);
  CHECK(pair.resolved == std::vector<PaperId>{"p", "q"});
  CHECK(pair.ranking.entries == std::vector<ScoredPaper>{{"r", 5}, {"s", 1}});

  opts.universe = [](const PaperId& id) { return id != "r"; };
  CHECK(recommend_for_set({"p", "q"}, source, opts).ranking.entries == std::vector<ScoredPaper>{{"s", 1}});

  opts = {};
  opts.n = 1;
  CHECK(recommend_for_set({"p"}, source, opts).ranking.entries.size() == 1);

  const auto partial = recommend_for_set({"p", "zz"}, source, {});
  CHECK(partial.unknown == std::vector<PaperId>{"zz"});
  CHECK_THROWS_AS(recommend_for_set({"zz"}, source, {}), Error);
  CHECK_THROWS_AS(recommend_for_set({}, source, {}), Error);
}

TEST_CASE("known papers without lists") {
  auto known = std::make_shared<relmat::PaperCatalog>(std::vector<PaperId>{"p", "lonely"});
  const StoreSource source("m", store({{"p", {{"q", 1}}}}), known);
  CHECK(source.knows("lonely"));
  CHECK_FALSE(source.knows("q"));
  CHECK(recommend_for_set({"lonely"}, source, {}).ranking.entries.empty());
}
