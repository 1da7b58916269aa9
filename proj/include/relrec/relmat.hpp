#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relrec/error.hpp"
#include "relrec/paper_id.hpp"

namespace relrec::relmat {

using Index = Eigen::Index;

/// Sparse incidence matrix (sessions x papers, citing x cited). Binary
/// matrices store 1.0 in every cell; normalized ones store positive weights.
template <typename Scalar = double>
using IncidenceMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;

/// Builds a binary incidence matrix; duplicate cells collapse to a single 1.
template <typename Scalar = double>
IncidenceMatrix<Scalar> make_binary(Index rows, Index cols,
                                    const std::vector<std::pair<Index, Index>>& cells) {
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(cells.size());
  for (const auto& [r, c] : cells) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw Error(ErrorCode::IndexOutOfRange, "cell (" + std::to_string(r) + "," +
                                                  std::to_string(c) + ") outside " +
                                                  std::to_string(rows) + "x" + std::to_string(cols));
    }
    triplets.emplace_back(r, c, Scalar(1));
  }
  IncidenceMatrix<Scalar> m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end(), [](const Scalar&, const Scalar& b) { return b; });
  m.makeCompressed();
  return m;
}

/// (M^T M)_ij for i != j, and 0 on the diagonal.
template <typename Scalar>
Scalar cooccur_columns(const IncidenceMatrix<Scalar>& m, Index i, Index j) {
  if (i < 0 || j < 0 || i >= m.cols() || j >= m.cols()) {
    throw Error(ErrorCode::IndexOutOfRange, "column index out of range");
  }
  if (i == j) return Scalar(0);
  return m.col(i).dot(m.col(j));
}

/// Co-occurrence of rows, i.e. column co-occurrence of the transpose.
template <typename Scalar>
Scalar cooccur_rows(const IncidenceMatrix<Scalar>& m, Index i, Index j) {
  const IncidenceMatrix<Scalar> t = m.transpose();
  return cooccur_columns(t, i, j);
}

/// Full co-occurrence matrix M^T M with the diagonal removed.
template <typename Scalar>
IncidenceMatrix<Scalar> cooccurrence(const IncidenceMatrix<Scalar>& m) {
  IncidenceMatrix<Scalar> product = (m.transpose() * m).pruned();
  product.prune([](Index r, Index c, const Scalar&) { return r != c; });
  return product;
}

enum class Axis { Row, Column };

/// Scales every row (or column) to unit L2 norm. All-zero vectors are left
/// untouched; the sparsity pattern does not change.
template <typename Scalar>
IncidenceMatrix<Scalar> normalize(const IncidenceMatrix<Scalar>& m, Axis axis) {
  IncidenceMatrix<Scalar> out = m;
  const Index n = axis == Axis::Row ? m.rows() : m.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sq = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Index k = 0; k < out.outerSize(); ++k) {
    for (typename IncidenceMatrix<Scalar>::InnerIterator it(out, k); it; ++it) {
      sq(axis == Axis::Row ? it.row() : it.col()) += it.value() * it.value();
    }
  }
  for (Index k = 0; k < out.outerSize(); ++k) {
    for (typename IncidenceMatrix<Scalar>::InnerIterator it(out, k); it; ++it) {
      const Scalar s = sq(axis == Axis::Row ? it.row() : it.col());
      if (s > Scalar(0)) it.valueRef() /= std::sqrt(s);
    }
  }
  return out;
}

template <typename Scalar = double>
struct Neighbor {
  Index target;
  Scalar score;

  bool operator==(const Neighbor&) const = default;
};

/// Ordering for neighbor lists: higher score first, then lower index. Catalog
/// indices follow lexicographic paper-id order, so this is the id tie-break.
template <typename Scalar>
bool ranks_before(const Neighbor<Scalar>& a, const Neighbor<Scalar>& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.target < b.target;
}

/// Bounded heap collecting the N best (index, score) pairs.
template <typename Scalar = double>
class TopN {
 public:
  explicit TopN(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(ErrorCode::InvalidArgument, "top-N capacity must be >= 1");
  }

  void push(Index target, Scalar score) {
    Neighbor<Scalar> n{target, score};
    if (heap_.size() < capacity_) {
      heap_.push(n);
    } else if (ranks_before(n, heap_.top())) {
      heap_.pop();
      heap_.push(n);
    }
  }

  /// Drains the heap into a best-first list.
  std::vector<Neighbor<Scalar>> take() {
    std::vector<Neighbor<Scalar>> out(heap_.size());
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      *it = heap_.top();
      heap_.pop();
    }
    return out;
  }

 private:
  struct WorstOnTop {
    bool operator()(const Neighbor<Scalar>& a, const Neighbor<Scalar>& b) const {
      return ranks_before(a, b);
    }
  };

  std::size_t capacity_;
  std::priority_queue<Neighbor<Scalar>, std::vector<Neighbor<Scalar>>, WorstOnTop> heap_;
};

template <typename Scalar = double>
struct NeighborList {
  Index source = 0;
  std::vector<Neighbor<Scalar>> entries;
};

/// The N columns with the highest co-occurrence (weighted product for
/// normalized matrices) against column i, excluding i itself and zero scores.
template <typename Scalar>
NeighborList<Scalar> topn_neighbors(const IncidenceMatrix<Scalar>& m, Index i, std::size_t n) {
  if (i < 0 || i >= m.cols()) throw Error(ErrorCode::IndexOutOfRange, "column index out of range");
  const Eigen::SparseVector<Scalar> column = m.col(i);
  const Eigen::SparseVector<Scalar> scores = m.transpose() * column;
  TopN<Scalar> top(n);
  for (typename Eigen::SparseVector<Scalar>::InnerIterator it(scores); it; ++it) {
    if (it.index() != i && it.value() > Scalar(0)) top.push(it.index(), it.value());
  }
  return {i, top.take()};
}

/// Sorted set of paper ids; the position of an id is its matrix index.
class PaperCatalog {
 public:
  PaperCatalog() = default;
  explicit PaperCatalog(std::vector<PaperId> ids);

  std::optional<Index> index_of(std::string_view id) const;
  const PaperId& id(Index i) const { return ids_.at(static_cast<std::size_t>(i)); }
  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::vector<PaperId>& ids() const { return ids_; }

 private:
  std::vector<PaperId> ids_;
  std::unordered_map<PaperId, Index> lookup_;
};

struct ScoredPaper {
  PaperId id;
  double score = 0;

  bool operator==(const ScoredPaper&) const = default;
};

/// Per-paper neighbor lists keyed by paper id.
class NeighborStore {
 public:
  void set(const PaperId& source, std::vector<ScoredPaper> entries);
  /// nullptr when the paper has no list.
  const std::vector<ScoredPaper>* find(std::string_view source) const;
  std::size_t size() const { return lists_.size(); }
  std::vector<PaperId> sources() const;

  /// Neighbor-list TSV: source_id, target_id, score, rank (1-based).
  void write_tsv(const std::string& path) const;
  static NeighborStore read_tsv(const std::string& path);

  bool operator==(const NeighborStore&) const = default;

 private:
  std::unordered_map<PaperId, std::vector<ScoredPaper>> lists_;
};

/// Converts an index-based neighbor list to ids through a catalog.
std::vector<ScoredPaper> to_scored(const NeighborList<double>& list, const PaperCatalog& catalog);

/// Neighbor lists for every column of m.
NeighborStore all_neighbors(const IncidenceMatrix<double>& m, const PaperCatalog& catalog,
                            std::size_t n);

}  // namespace relrec::relmat
