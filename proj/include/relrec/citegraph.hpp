#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "relrec/coaccess.hpp"
#include "relrec/relmat.hpp"

namespace relrec::citegraph {

using coaccess::PaperPublication;
using coaccess::PublicationIndex;
using relmat::Index;
using relmat::ScoredPaper;

struct LoadReport {
  std::size_t edges_read = 0;
  std::size_t self_edges = 0;
  std::size_t duplicate_edges = 0;
  std::size_t unknown_endpoints = 0;
};

/// Directed citation graph. The adjacency matrix C has C(i,j) = 1 iff paper i
/// references paper j; columns hold citations, rows hold references.
class CitationGraph {
 public:
  CitationGraph() = default;
  /// Self-edges, duplicates and edges with unknown endpoints are dropped and
  /// counted in the report.
  CitationGraph(PublicationIndex papers, const std::vector<std::pair<PaperId, PaperId>>& edges,
                LoadReport* report = nullptr);

  const PublicationIndex& papers() const { return papers_; }
  const relmat::PaperCatalog& catalog() const { return papers_.catalog(); }
  const relmat::IncidenceMatrix<double>& adjacency() const { return adjacency_; }
  Index size() const { return papers_.size(); }
  std::size_t edge_count() const { return static_cast<std::size_t>(adjacency_.nonZeros()); }

  std::vector<Index> references(Index i) const;
  std::vector<Index> citations(Index i) const;
  Index out_degree(Index i) const;
  Index in_degree(Index i) const;
  /// True if the paper has at least one incoming or outgoing edge.
  bool connected(Index i) const { return out_degree(i) + in_degree(i) > 0; }

  std::vector<std::pair<PaperId, PaperId>> edges() const;

  /// Same papers, keeping only edges whose citing paper was published before t.
  CitationGraph cut_before(Timestamp t) const;

  Index require(std::string_view id) const;

  /// Edge list TSV (citing_id, cited_id) plus paper metadata TSV.
  static CitationGraph load(const std::string& papers_tsv, const std::string& edges_tsv,
                            LoadReport* report = nullptr);
  void write_edges(const std::string& path) const;

 private:
  PublicationIndex papers_;
  relmat::IncidenceMatrix<double> adjacency_;
  relmat::IncidenceMatrix<double> transposed_;
};

std::vector<std::pair<PaperId, PaperId>> read_edges(const std::string& path);

using relmat::Axis;
enum class Normalization { None, Row, Column };
std::optional<Normalization> parse_normalization(std::string_view text);
std::string_view to_string(Normalization n);

/// Number of papers citing both i and j; 0 on the diagonal.
double co_citation(const CitationGraph& g, std::string_view i, std::string_view j);
/// Number of references shared by i and j; 0 on the diagonal.
double co_reference(const CitationGraph& g, std::string_view i, std::string_view j);

std::vector<ScoredPaper> co_cited_topn(const CitationGraph& g, std::string_view id, std::size_t n,
                                       Normalization norm = Normalization::None);
std::vector<ScoredPaper> co_ref_topn(const CitationGraph& g, std::string_view id, std::size_t n,
                                     Normalization norm = Normalization::None);

relmat::NeighborStore co_citation_store(const CitationGraph& g, std::size_t n,
                                        Normalization norm = Normalization::None);
relmat::NeighborStore co_reference_store(const CitationGraph& g, std::size_t n,
                                         Normalization norm = Normalization::None);

enum class DanglingPolicy { Redistribute, Remove };

struct PageRankConfig {
  double damping = 0.85;
  double tolerance = 1e-8;
  int max_iterations = 200;
  DanglingPolicy dangling = DanglingPolicy::Redistribute;

  void validate() const;
};

struct PageRankResult {
  Eigen::VectorXd scores;
  int iterations = 0;
  bool converged = false;
  std::vector<double> deltas;  // L1 change per iteration
  std::vector<double> sums;    // score mass per iteration
};

/// Power iteration on PR(i) = (1-d)/n + d * sum_{j->i} PR(j)/outdeg(j).
/// Without convergence the last iterate is returned with converged = false.
template <typename Scalar>
PageRankResult pagerank(const relmat::IncidenceMatrix<Scalar>& adjacency, const PageRankConfig& cfg);

PageRankResult pagerank(const CitationGraph& g, const PageRankConfig& cfg = {});

struct HitsConfig {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

struct HitsResult {
  Eigen::VectorXd authority;
  Eigen::VectorXd hub;
  int iterations = 0;
  bool converged = false;
  std::vector<double> deltas;                       // max component change
  std::vector<std::pair<double, double>> norms;     // (authority, hub) L2 norms
};

/// Kleinberg's hubs and authorities over the whole graph. Throws
/// DegenerateGraph when the iteration collapses to zero (no edges).
template <typename Scalar>
HitsResult hits(const relmat::IncidenceMatrix<Scalar>& adjacency, const HitsConfig& cfg);

HitsResult hits(const CitationGraph& g, const HitsConfig& cfg = {});

struct DagViolationReport {
  std::size_t papers_with_references = 0;
  std::size_t violating_papers = 0;
  double fraction = 0.0;
  std::vector<std::pair<PaperId, PaperId>> offending_edges;  // cited after citing
};

DagViolationReport dag_violation_report(const CitationGraph& g);

struct ImportanceScores {
  Eigen::VectorXd pagerank;
  Eigen::VectorXd hub;
  Eigen::VectorXd authority;
  Eigen::VectorXi citations;
  Eigen::VectorXi references;
};

ImportanceScores importance(const CitationGraph& g, const PageRankConfig& pr = {},
                            const HitsConfig& hc = {});
void write_importance(const std::string& path, const CitationGraph& g, const ImportanceScores& s);

}  // namespace relrec::citegraph
