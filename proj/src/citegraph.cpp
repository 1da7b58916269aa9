#include "relrec/citegraph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "relrec/error.hpp"

namespace relrec::citegraph {

CitationGraph::CitationGraph(PublicationIndex papers,
                             const std::vector<std::pair<PaperId, PaperId>>& edges,
                             LoadReport* report)
    : papers_(std::move(papers)) {
  LoadReport local;
  LoadReport& r = report ? *report : local;
  std::vector<std::pair<Index, Index>> cells;
  cells.reserve(edges.size());
  std::set<std::pair<Index, Index>> seen;
  for (const auto& [from, to] : edges) {
    ++r.edges_read;
    const auto i = catalog().index_of(from);
    const auto j = catalog().index_of(to);
    if (!i || !j) {
      ++r.unknown_endpoints;
      continue;
    }
    if (*i == *j) {
      ++r.self_edges;
      continue;
    }
    if (!seen.emplace(*i, *j).second) {
      ++r.duplicate_edges;
      continue;
    }
    cells.emplace_back(*i, *j);
  }
  adjacency_ = relmat::make_binary<double>(size(), size(), cells);
  transposed_ = adjacency_.transpose();
}

std::vector<Index> CitationGraph::references(Index i) const {
  std::vector<Index> out;
  for (relmat::IncidenceMatrix<double>::InnerIterator it(transposed_, i); it; ++it) out.push_back(it.row());
  return out;
}

std::vector<Index> CitationGraph::citations(Index i) const {
  std::vector<Index> out;
  for (relmat::IncidenceMatrix<double>::InnerIterator it(adjacency_, i); it; ++it) out.push_back(it.row());
  return out;
}

Index CitationGraph::out_degree(Index i) const {
  return transposed_.outerIndexPtr()[i + 1] - transposed_.outerIndexPtr()[i];
}

Index CitationGraph::in_degree(Index i) const {
  return adjacency_.outerIndexPtr()[i + 1] - adjacency_.outerIndexPtr()[i];
}

std::vector<std::pair<PaperId, PaperId>> CitationGraph::edges() const {
  std::vector<std::pair<PaperId, PaperId>> out;
  out.reserve(edge_count());
  for (Index i = 0; i < size(); ++i) {
    for (const auto j : references(i)) out.emplace_back(catalog().id(i), catalog().id(j));
  }
  return out;
}

CitationGraph CitationGraph::cut_before(Timestamp t) const {
  CitationGraph g;
  g.papers_ = papers_;
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < size(); ++i) {
    if (papers_.at(i).published >= t) continue;
    for (const auto j : references(i)) triplets.emplace_back(i, j, 1.0);
  }
  g.adjacency_.resize(size(), size());
  g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  g.adjacency_.makeCompressed();
  g.transposed_ = g.adjacency_.transpose();
  return g;
}

Index CitationGraph::require(std::string_view id) const {
  const auto i = catalog().index_of(id);
  if (!i) throw Error(ErrorCode::UnknownPaper, std::string(id));
  return *i;
}

std::vector<std::pair<PaperId, PaperId>> read_edges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::pair<PaperId, PaperId>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected citing<TAB>cited");
    }
    auto cited = line.substr(tab + 1);
    if (const auto t2 = cited.find('\t'); t2 != std::string::npos) cited.resize(t2);
    edges.emplace_back(line.substr(0, tab), cited);
  }
  return edges;
}

CitationGraph CitationGraph::load(const std::string& papers_tsv, const std::string& edges_tsv,
                                  LoadReport* report) {
  return CitationGraph(PublicationIndex::read_tsv(papers_tsv), read_edges(edges_tsv), report);
}

void CitationGraph::write_edges(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& [a, b] : edges()) out << a << '\t' << b << '\n';
}

// ---------------------------------------------------------------------------

std::optional<Normalization> parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::None;
  if (text == "row") return Normalization::Row;
  if (text == "column") return Normalization::Column;
  return std::nullopt;
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::Row: return "row";
    case Normalization::Column: return "column";
  }
  return "none";
}

namespace {

relmat::IncidenceMatrix<double> normalized(const relmat::IncidenceMatrix<double>& m, Normalization n) {
  switch (n) {
    case Normalization::None: return m;
    case Normalization::Row: return relmat::normalize(m, Axis::Row);
    case Normalization::Column: return relmat::normalize(m, Axis::Column);
  }
  return m;
}

}  // namespace

double co_citation(const CitationGraph& g, std::string_view i, std::string_view j) {
  return relmat::cooccur_columns(g.adjacency(), g.require(i), g.require(j));
}

double co_reference(const CitationGraph& g, std::string_view i, std::string_view j) {
  const relmat::IncidenceMatrix<double> t = g.adjacency().transpose();
  return relmat::cooccur_columns(t, g.require(i), g.require(j));
}

std::vector<ScoredPaper> co_cited_topn(const CitationGraph& g, std::string_view id, std::size_t n,
                                       Normalization norm) {
  const auto i = g.require(id);
  const auto m = normalized(g.adjacency(), norm);
  return relmat::to_scored(relmat::topn_neighbors(m, i, n), g.catalog());
}

std::vector<ScoredPaper> co_ref_topn(const CitationGraph& g, std::string_view id, std::size_t n,
                                     Normalization norm) {
  const auto i = g.require(id);
  const relmat::IncidenceMatrix<double> t = normalized(g.adjacency(), norm).transpose();
  return relmat::to_scored(relmat::topn_neighbors(t, i, n), g.catalog());
}

relmat::NeighborStore co_citation_store(const CitationGraph& g, std::size_t n, Normalization norm) {
  return relmat::all_neighbors(normalized(g.adjacency(), norm), g.catalog(), n);
}

relmat::NeighborStore co_reference_store(const CitationGraph& g, std::size_t n, Normalization norm) {
  const relmat::IncidenceMatrix<double> t = normalized(g.adjacency(), norm).transpose();
  return relmat::all_neighbors(t, g.catalog(), n);
}

// ---------------------------------------------------------------------------
// PageRank

void PageRankConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw Error(ErrorCode::InvalidConfig, "damping must be in (0,1)");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
}

namespace {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Redistributing power iteration restricted to the vertices flagged in `active`.
template <typename Scalar>
PageRankResult power_iterate(const relmat::IncidenceMatrix<Scalar>& adjacency,
                             const std::vector<bool>& active, const PageRankConfig& cfg) {
  const Index n = adjacency.rows();
  Index n_active = 0;
  for (bool a : active) n_active += a ? 1 : 0;

  // Column-stochastic transition restricted to active vertices: T(i,j) = 1/outdeg(j) for j->i.
  Vector<Scalar> out_degree = Vector<Scalar>::Zero(n);
  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Index k = 0; k < adjacency.outerSize(); ++k) {
    for (typename relmat::IncidenceMatrix<Scalar>::InnerIterator it(adjacency, k); it; ++it) {
      if (active[it.row()] && active[it.col()]) {
        out_degree(it.row()) += 1;
        triplets.emplace_back(it.col(), it.row(), Scalar(1));
      }
    }
  }
  for (auto& t : triplets) t = Eigen::Triplet<Scalar>(t.row(), t.col(), Scalar(1) / out_degree(t.col()));
  relmat::IncidenceMatrix<Scalar> transition(n, n);
  transition.setFromTriplets(triplets.begin(), triplets.end());

  Vector<Scalar> mask = Vector<Scalar>::Zero(n);
  Vector<Scalar> dangling = Vector<Scalar>::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (!active[i]) continue;
    mask(i) = 1;
    if (out_degree(i) == 0) dangling(i) = 1;
  }

  const Scalar d = static_cast<Scalar>(cfg.damping);
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n_active);
  Vector<Scalar> x = mask * inv_n;
  PageRankResult result;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Scalar dangling_mass = dangling.dot(x);
    Vector<Scalar> next = d * (transition * x);
    next += mask * ((Scalar(1) - d) * inv_n + d * dangling_mass * inv_n);
    const double delta = static_cast<double>((next - x).template lpNorm<1>());
    x = std::move(next);
    result.deltas.push_back(delta);
    result.sums.push_back(static_cast<double>(x.sum()));
    result.iterations = it;
    if (delta < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.scores = x.template cast<double>();
  return result;
}

}  // namespace

template <typename Scalar>
PageRankResult pagerank(const relmat::IncidenceMatrix<Scalar>& adjacency, const PageRankConfig& cfg) {
  cfg.validate();
  const Index n = adjacency.rows();
  if (n == 0 || adjacency.cols() != n) throw Error(ErrorCode::InvalidArgument, "pagerank needs a nonempty square graph");

  if (cfg.dangling == DanglingPolicy::Redistribute) {
    return power_iterate(adjacency, std::vector<bool>(static_cast<std::size_t>(n), true), cfg);
  }

  // Remove: rank the graph without its dangling vertices, then add them back
  // with one propagation step over the original out-degrees and renormalize.
  const relmat::IncidenceMatrix<Scalar> t = adjacency.transpose();
  std::vector<bool> active(static_cast<std::size_t>(n));
  Index kept = 0;
  for (Index i = 0; i < n; ++i) {
    active[i] = t.outerIndexPtr()[i + 1] > t.outerIndexPtr()[i];
    kept += active[i] ? 1 : 0;
  }
  if (kept == 0) std::fill(active.begin(), active.end(), true);
  PageRankResult result = power_iterate(adjacency, active, cfg);

  Eigen::VectorXd out_degree = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) out_degree(i) = static_cast<double>(t.outerIndexPtr()[i + 1] - t.outerIndexPtr()[i]);
  Eigen::VectorXd& x = result.scores;
  for (Index i = 0; i < n; ++i) {
    if (active[i]) continue;
    double incoming = 0;
    for (typename relmat::IncidenceMatrix<Scalar>::InnerIterator it(adjacency, i); it; ++it) {
      if (active[it.row()]) incoming += x(it.row()) / out_degree(it.row());
    }
    x(i) = (1.0 - cfg.damping) / static_cast<double>(n) + cfg.damping * incoming;
  }
  x /= x.sum();
  return result;
}

template PageRankResult pagerank<double>(const relmat::IncidenceMatrix<double>&, const PageRankConfig&);
template PageRankResult pagerank<float>(const relmat::IncidenceMatrix<float>&, const PageRankConfig&);

PageRankResult pagerank(const CitationGraph& g, const PageRankConfig& cfg) {
  return pagerank(g.adjacency(), cfg);
}

// ---------------------------------------------------------------------------
// HITS

template <typename Scalar>
HitsResult hits(const relmat::IncidenceMatrix<Scalar>& adjacency, const HitsConfig& cfg) {
  const Index n = adjacency.rows();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "hits needs a nonempty graph");
  const relmat::IncidenceMatrix<Scalar> transposed = adjacency.transpose();

  Vector<Scalar> authority = Vector<Scalar>::Constant(n, Scalar(1) / std::sqrt(static_cast<Scalar>(n)));
  Vector<Scalar> hub = authority;
  HitsResult result;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Vector<Scalar> next_authority = transposed * hub;  // sum over citing hubs
    const Scalar an = next_authority.norm();
    if (an == Scalar(0)) throw Error(ErrorCode::DegenerateGraph, "authority vector collapsed to zero");
    next_authority /= an;
    Vector<Scalar> next_hub = adjacency * next_authority;  // sum over cited authorities
    const Scalar hn = next_hub.norm();
    if (hn == Scalar(0)) throw Error(ErrorCode::DegenerateGraph, "hub vector collapsed to zero");
    next_hub /= hn;

    const double delta = static_cast<double>(std::max((next_authority - authority).cwiseAbs().maxCoeff(),
                                                      (next_hub - hub).cwiseAbs().maxCoeff()));
    authority = std::move(next_authority);
    hub = std::move(next_hub);
    result.deltas.push_back(delta);
    result.norms.emplace_back(static_cast<double>(authority.norm()), static_cast<double>(hub.norm()));
    result.iterations = it;
    if (delta < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.authority = authority.template cast<double>();
  result.hub = hub.template cast<double>();
  return result;
}

template HitsResult hits<double>(const relmat::IncidenceMatrix<double>&, const HitsConfig&);
template HitsResult hits<float>(const relmat::IncidenceMatrix<float>&, const HitsConfig&);

HitsResult hits(const CitationGraph& g, const HitsConfig& cfg) { return hits(g.adjacency(), cfg); }

// ---------------------------------------------------------------------------

DagViolationReport dag_violation_report(const CitationGraph& g) {
  DagViolationReport report;
  const auto& pubs = g.papers();
  for (Index i = 0; i < g.size(); ++i) {
    const auto refs = g.references(i);
    if (refs.empty()) continue;
    ++report.papers_with_references;
    const Timestamp own = pubs.at(i).published;
    bool violating = false;
    for (const auto j : refs) {
      if (pubs.at(j).published > own) {
        violating = true;
        report.offending_edges.emplace_back(g.catalog().id(i), g.catalog().id(j));
      }
    }
    if (violating) ++report.violating_papers;
  }
  if (report.papers_with_references > 0) {
    report.fraction = static_cast<double>(report.violating_papers) /
                      static_cast<double>(report.papers_with_references);
  }
  return report;
}

ImportanceScores importance(const CitationGraph& g, const PageRankConfig& pr, const HitsConfig& hc) {
  ImportanceScores s;
  s.pagerank = pagerank(g, pr).scores;
  if (g.edge_count() > 0) {
    const auto h = hits(g, hc);
    s.hub = h.hub;
    s.authority = h.authority;
  } else {
    s.hub = s.authority = Eigen::VectorXd::Zero(g.size());
  }
  s.citations.resize(g.size());
  s.references.resize(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    s.citations(i) = static_cast<int>(g.in_degree(i));
    s.references(i) = static_cast<int>(g.out_degree(i));
  }
  return s;
}

void write_importance(const std::string& path, const CitationGraph& g, const ImportanceScores& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "#id\tpagerank\thub\tauthority\tcitations\treferences\n";
  char buf[128];
  for (Index i = 0; i < g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g", s.pagerank(i), s.hub(i), s.authority(i));
    out << g.catalog().id(i) << '\t' << buf << '\t' << s.citations(i) << '\t' << s.references(i) << '\n';
  }
}

}  // namespace relrec::citegraph
