#include "relrec/recommender.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "relrec/error.hpp"

namespace relrec::recommender {

std::string_view to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Min: return "min";
    case AggFn::Mean: return "mean";
    case AggFn::Max: return "max";
    case AggFn::Sum: return "sum";
  }
  return "sum";
}

std::optional<AggFn> parse_agg(std::string_view text) {
  if (text == "min") return AggFn::Min;
  if (text == "mean") return AggFn::Mean;
  if (text == "max") return AggFn::Max;
  if (text == "sum") return AggFn::Sum;
  return std::nullopt;
}

void sort_ranking(std::vector<ScoredPaper>& entries) {
  std::sort(entries.begin(), entries.end(), [](const ScoredPaper& a, const ScoredPaper& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
}

Ranking aggregate(const std::vector<Ranking>& rankings, AggFn fn, bool require_all) {
  if (rankings.empty()) throw Error(ErrorCode::EmptyInput, "nothing to aggregate");

  struct Acc {
    double sum = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t count = 0;
  };
  // Ordered map: the summation order per paper follows the ranking order, and
  // iteration is deterministic.
  std::map<PaperId, Acc> acc;
  for (const auto& r : rankings) {
    for (const auto& e : r.entries) {
      auto& a = acc[e.id];
      a.sum += e.score;
      a.min = std::min(a.min, e.score);
      a.max = std::max(a.max, e.score);
      ++a.count;
    }
  }

  Ranking out;
  out.measure = rankings.front().measure;
  out.aggregation = std::string(to_string(fn));
  out.entries.reserve(acc.size());
  for (const auto& [id, a] : acc) {
    double score = 0;
    switch (fn) {
      case AggFn::Sum: score = a.sum; break;
      case AggFn::Mean: score = a.sum / static_cast<double>(a.count); break;
      case AggFn::Max: score = a.max; break;
      case AggFn::Min:
        if (require_all && a.count < rankings.size()) continue;
        score = a.min;
        break;
    }
    out.entries.push_back({id, score});
  }
  sort_ranking(out.entries);
  return out;
}

StoreSource::StoreSource(std::string name, std::shared_ptr<const relmat::NeighborStore> store,
                         std::shared_ptr<const relmat::PaperCatalog> known)
    : name_(std::move(name)), store_(std::move(store)), known_(std::move(known)) {
  if (!store_) throw Error(ErrorCode::InvalidArgument, "null neighbor store");
}

bool StoreSource::knows(std::string_view id) const {
  if (known_) return known_->index_of(id).has_value();
  return store_->find(id) != nullptr;
}

std::vector<ScoredPaper> StoreSource::neighbors(std::string_view id, std::size_t limit) const {
  const auto* list = store_->find(id);
  if (!list) return {};
  const auto k = std::min(limit, list->size());
  return {list->begin(), list->begin() + static_cast<std::ptrdiff_t>(k)};
}

TextSource::TextSource(std::string name, std::shared_ptr<const textsim::TextIndex> index,
                       std::size_t k_query)
    : name_(std::move(name)), index_(std::move(index)), k_query_(k_query) {
  if (!index_) throw Error(ErrorCode::InvalidArgument, "null text index");
}

bool TextSource::knows(std::string_view id) const { return index_->catalog().index_of(id).has_value(); }

std::vector<ScoredPaper> TextSource::neighbors(std::string_view id, std::size_t limit) const {
  if (!knows(id)) return {};
  return textsim::rank_similar(*index_, id, limit, k_query_);
}

Recommendation recommend_for_set(const std::vector<PaperId>& inputs, const NeighborSource& source,
                                 const RecommendOptions& options) {
  if (inputs.empty()) throw Error(ErrorCode::EmptyInput, "no input papers");
  if (options.n == 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");

  Recommendation rec;
  std::unordered_set<PaperId> seen;
  std::vector<Ranking> rankings;
  for (const auto& id : inputs) {
    if (!seen.insert(id).second) continue;
    if (!source.knows(id)) {
      rec.unknown.push_back(id);
      continue;
    }
    rec.resolved.push_back(id);
    rankings.push_back({source.neighbors(id, options.per_input), source.name(), ""});
  }
  if (rankings.empty()) throw Error(ErrorCode::NoInputsResolved, "none of the input papers is known to " + source.name());

  rec.ranking = aggregate(rankings, options.agg, options.require_all);
  rec.ranking.measure = source.name();
  auto& entries = rec.ranking.entries;
  std::erase_if(entries, [&](const ScoredPaper& e) {
    return seen.count(e.id) > 0 || (options.universe && !options.universe(e.id));
  });
  if (entries.size() > options.n) entries.resize(options.n);
  return rec;
}

}  // namespace relrec::recommender
