#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "relrec/citegraph.hpp"
#include "relrec/coaccess.hpp"
#include "relrec/recommender.hpp"
#include "relrec/sessionizer.hpp"
#include "relrec/textsim.hpp"

namespace relrec::evaluator {

using citegraph::CitationGraph;
using coaccess::PublicationIndex;
using recommender::NeighborSource;
using sessionizer::Session;

/// Sum of precision at each relevant rank divided by |relevant|. Throws
/// EmptyRelevantSet.
double average_precision(const std::vector<PaperId>& ranking,
                         const std::unordered_set<PaperId>& relevant);

/// 1 if target is among the first n entries, else 0.
double recall_at(const std::vector<PaperId>& ranking, const PaperId& target, std::size_t n);

/// Everything the settings read. Sessions are only needed for co-access
/// measures and documents only for text measures.
struct Corpus {
  PublicationIndex papers;
  CitationGraph graph;
  std::vector<Session> sessions;
  std::vector<textsim::Document> documents;
};

enum class Family { CoCitation, CoReference, CoDownload, CoView, TfidfMeta, TfidfFullText };

struct MeasureSpec {
  Family family = Family::CoDownload;
  citegraph::Normalization norm = citegraph::Normalization::None;

  /// "co-download", "co-citation:row", "tfidf_meta", ...
  std::string name() const;
  static MeasureSpec parse(std::string_view text);
  bool operator<(const MeasureSpec& o) const {
    return std::pair(family, norm) < std::pair(o.family, o.norm);
  }
};

struct FactoryOptions {
  std::size_t top_n = 300;
  Seconds t_lag = 2 * kDay;
  bool rush_filter = true;
  std::size_t memory_budget = std::size_t{256} << 20;
};

/// Neighbor sources as they would have been computed at a given time: the
/// citation graph keeps only edges of papers published before t, co-access
/// counts only see accesses before t. Text measures do not depend on time.
/// Snapshots are cached; the factory is safe to share between threads.
class MeasureFactory {
 public:
  MeasureFactory(const Corpus& corpus, FactoryOptions options = {});

  std::shared_ptr<const NeighborSource> snapshot(const MeasureSpec& spec, Timestamp t);
  std::size_t built() const;

 private:
  const Corpus& corpus_;
  FactoryOptions options_;
  std::shared_ptr<const relmat::PaperCatalog> known_;
  mutable std::mutex mutex_;
  std::map<std::pair<MeasureSpec, Timestamp>, std::shared_ptr<const NeighborSource>> cache_;
  std::map<textsim::Mode, std::shared_ptr<const textsim::TextIndex>> text_;

  std::shared_ptr<const NeighborSource> build(const MeasureSpec& spec, Timestamp t);
};

/// Accesses strictly before t; sessions left empty are dropped.
std::vector<Session> sessions_before(const std::vector<Session>& sessions, Timestamp t);

/// The citation graph vertex set: papers with at least one citation edge.
std::unordered_set<PaperId> graph_vertices(const CitationGraph& graph);

struct ResultRow {
  std::string algorithm;
  std::string metric;
  long x = 0;  // rank N or time offset in months
  double value = 0;
  std::size_t support = 0;

  bool operator==(const ResultRow&) const = default;
};

struct DocumentValue {
  std::string algorithm;
  PaperId document;
  long x = 0;
  double value = 0;

  bool operator==(const DocumentValue&) const = default;
};

struct EvalResult {
  std::vector<ResultRow> rows;
  std::vector<DocumentValue> documents;  // per test paper, before the final mean
};

void write_results(const std::string& path, const EvalResult& result);
void write_document_values(const std::string& path, const EvalResult& result);

inline const std::vector<std::size_t> kDefaultRanks = {1, 3, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

struct Setting1Config {
  Timestamp eval_begin = 0;
  Timestamp eval_end = 0;
  std::vector<std::size_t> ranks = kDefaultRanks;
  recommender::AggFn agg = recommender::AggFn::Sum;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Held-out reference recall. Each test paper published in the evaluation
/// window with at least two references older than eval_begin is scored by
/// recommending from all but one reference and checking whether the held-out
/// one is in the top N. Throws EmptyTestSet if no paper qualifies.
EvalResult setting1(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting1Config& cfg);

struct Setting2Config {
  Timestamp eval_begin = 0;
  Timestamp eval_end = 0;
  Timestamp gt_begin = 0;
  Timestamp gt_end = 0;
  std::size_t n_max = 100;
  unsigned threads = 0;
};

/// Papers related to each paper through future co-citation: for every paper
/// citing it in the ground-truth window, the other papers it cites that were
/// published in [eval_begin, gt_begin].
std::map<PaperId, std::set<PaperId>> future_related(const Corpus& corpus, const Setting2Config& cfg);

/// MAP for recent publications, by months since publication. Measures are
/// evaluated at every month start from a paper's publication to gt_begin.
EvalResult setting2(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting2Config& cfg);

struct Setting3Config {
  Timestamp t0 = 0;  // also the start of the ground-truth window
  Timestamp gt_end = 0;
  int max_age_months = 60;
  std::size_t n_max = 100;
  /// Select test papers by their latest update instead of first publication.
  bool use_update_date = true;
  unsigned threads = 0;
};

/// MAP over the age of the query paper. References of each test paper are
/// bucketed by month of age before t0; each reference is used as a query for
/// the test paper's more recent references.
EvalResult setting3(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting3Config& cfg);

/// Key-value run description for the evaluate command.
struct EvalConfig {
  std::string papers;
  std::string citations;
  std::string sessions;
  std::string corpus;
  std::vector<MeasureSpec> measures;
  FactoryOptions factory;
  Setting1Config setting1;
  Setting2Config setting2;
  Setting3Config setting3;
  std::string output;
};

EvalConfig parse_eval_config(const std::string& path);
Corpus load_corpus(const EvalConfig& cfg);

}  // namespace relrec::evaluator
