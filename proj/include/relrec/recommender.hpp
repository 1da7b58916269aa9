#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relrec/relmat.hpp"
#include "relrec/textsim.hpp"

namespace relrec::recommender {

using relmat::ScoredPaper;

enum class AggFn { Min, Mean, Max, Sum };

std::string_view to_string(AggFn fn);
std::optional<AggFn> parse_agg(std::string_view text);

/// Papers by non-increasing score, ties by id; no duplicates.
struct Ranking {
  std::vector<ScoredPaper> entries;
  std::string measure;
  std::string aggregation;
};

/// Sorts best first with the id tie-break.
void sort_ranking(std::vector<ScoredPaper>& entries);

/// Combines rankings paper by paper. Sum counts a missing score as 0; min,
/// mean and max only look at the rankings that contain the paper, unless
/// `require_all` is set, in which case a paper must appear in every ranking.
/// Throws EmptyInput for an empty list.
Ranking aggregate(const std::vector<Ranking>& rankings, AggFn fn, bool require_all = false);

/// Where per-paper neighbor lists come from.
class NeighborSource {
 public:
  virtual ~NeighborSource() = default;
  virtual std::string name() const = 0;
  /// False if the paper is unknown to this measure.
  virtual bool knows(std::string_view id) const = 0;
  /// Best-first neighbors of a known paper, at most `limit` of them.
  virtual std::vector<ScoredPaper> neighbors(std::string_view id, std::size_t limit) const = 0;
};

/// Precomputed neighbor lists. Papers in `known` without a list have no
/// neighbors; without `known`, only papers with a list are known.
class StoreSource final : public NeighborSource {
 public:
  StoreSource(std::string name, std::shared_ptr<const relmat::NeighborStore> store,
              std::shared_ptr<const relmat::PaperCatalog> known = nullptr);

  std::string name() const override { return name_; }
  bool knows(std::string_view id) const override;
  std::vector<ScoredPaper> neighbors(std::string_view id, std::size_t limit) const override;

 private:
  std::string name_;
  std::shared_ptr<const relmat::NeighborStore> store_;
  std::shared_ptr<const relmat::PaperCatalog> known_;
};

/// Text similarity computed on demand from a TF-IDF index.
class TextSource final : public NeighborSource {
 public:
  TextSource(std::string name, std::shared_ptr<const textsim::TextIndex> index,
             std::size_t k_query = textsim::kQueryTerms);

  std::string name() const override { return name_; }
  bool knows(std::string_view id) const override;
  std::vector<ScoredPaper> neighbors(std::string_view id, std::size_t limit) const override;

 private:
  std::string name_;
  std::shared_ptr<const textsim::TextIndex> index_;
  std::size_t k_query_;
};

struct RecommendOptions {
  AggFn agg = AggFn::Sum;
  std::size_t n = 20;
  /// Neighbors fetched per input paper.
  std::size_t per_input = 300;
  bool require_all = false;
  /// When set, papers for which it returns false are removed.
  std::function<bool(const PaperId&)> universe;
};

struct Recommendation {
  Ranking ranking;
  std::vector<PaperId> resolved;  // inputs known to the measure, first occurrence order
  std::vector<PaperId> unknown;   // inputs the measure has never seen
};

/// Aggregates the neighbor lists of the input papers, drops the inputs
/// themselves and papers outside the universe, and keeps the best n.
/// Throws EmptyInput without inputs and NoInputsResolved if none is known.
Recommendation recommend_for_set(const std::vector<PaperId>& inputs, const NeighborSource& source,
                                 const RecommendOptions& options);

}  // namespace relrec::recommender
