#include "relrec/relmat.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace relrec::relmat {

PaperCatalog::PaperCatalog(std::vector<PaperId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) lookup_.emplace(ids_[i], static_cast<Index>(i));
}

std::optional<Index> PaperCatalog::index_of(std::string_view id) const {
  const auto it = lookup_.find(PaperId(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void NeighborStore::set(const PaperId& source, std::vector<ScoredPaper> entries) {
  lists_[source] = std::move(entries);
}

const std::vector<ScoredPaper>* NeighborStore::find(std::string_view source) const {
  const auto it = lists_.find(PaperId(source));
  return it == lists_.end() ? nullptr : &it->second;
}

std::vector<PaperId> NeighborStore::sources() const {
  std::vector<PaperId> out;
  out.reserve(lists_.size());
  for (const auto& [k, _] : lists_) out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

void NeighborStore::write_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  char buf[64];
  for (const auto& source : sources()) {
    const auto& entries = lists_.at(source);
    for (std::size_t r = 0; r < entries.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", entries[r].score);
      out << source << '\t' << entries[r].id << '\t' << buf << '\t' << (r + 1) << '\n';
    }
  }
}

NeighborStore NeighborStore::read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  NeighborStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string source, target, score_text, rank_text;
    if (!std::getline(fields, source, '\t') || !std::getline(fields, target, '\t') ||
        !std::getline(fields, score_text, '\t') || !std::getline(fields, rank_text, '\t')) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected 4 columns");
    }
    double score = 0;
    std::size_t rank = 0;
    try {
      score = std::stod(score_text);
      rank = std::stoul(rank_text);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad number");
    }
    auto& list = store.lists_[source];
    if (rank != list.size() + 1) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": rank out of sequence");
    }
    list.push_back({target, score});
  }
  return store;
}

std::vector<ScoredPaper> to_scored(const NeighborList<double>& list, const PaperCatalog& catalog) {
  std::vector<ScoredPaper> out;
  out.reserve(list.entries.size());
  for (const auto& n : list.entries) out.push_back({catalog.id(n.target), n.score});
  return out;
}

NeighborStore all_neighbors(const IncidenceMatrix<double>& m, const PaperCatalog& catalog,
                            std::size_t n) {
  NeighborStore store;
  const IncidenceMatrix<double> co = cooccurrence(m);  // symmetric, so column i == row i
  for (Index i = 0; i < co.cols(); ++i) {
    TopN<double> top(n);
    for (IncidenceMatrix<double>::InnerIterator it(co, i); it; ++it) {
      if (it.value() > 0) top.push(it.row(), it.value());
    }
    auto entries = top.take();
    if (!entries.empty()) store.set(catalog.id(i), to_scored({i, std::move(entries)}, catalog));
  }
  return store;
}

}  // namespace relrec::relmat
