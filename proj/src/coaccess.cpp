#include "relrec/coaccess.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <cmath>
#include <unistd.h>

#include "relrec/error.hpp"

namespace relrec::coaccess {

std::string_view to_string(AccessKind kind) {
  return kind == AccessKind::Download ? "download" : "view";
}

std::string_view to_string(Normalization norm) {
  switch (norm) {
    case Normalization::None: return "none";
    case Normalization::Row: return "row";
    case Normalization::Column: return "column";
  }
  return "none";
}

std::optional<AccessKind> parse_access_kind(std::string_view text) {
  if (text == "download") return AccessKind::Download;
  if (text == "view") return AccessKind::View;
  return std::nullopt;
}

std::optional<Normalization> parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::None;
  if (text == "row") return Normalization::Row;
  if (text == "column") return Normalization::Column;
  return std::nullopt;
}

void CoAccessConfig::validate() const {
  if (top_n < 1) throw Error(ErrorCode::InvalidConfig, "top_n must be >= 1");
  if (t_lag < 0) throw Error(ErrorCode::InvalidConfig, "t_lag must be >= 0");
}

// ---------------------------------------------------------------------------

PublicationIndex::PublicationIndex(std::vector<PaperPublication> papers) {
  std::vector<PaperId> ids;
  ids.reserve(papers.size());
  for (const auto& p : papers) {
    if (p.updated < p.published) {
      throw Error(ErrorCode::InvalidArgument, "update before publication for " + p.id);
    }
    ids.push_back(p.id);
  }
  catalog_ = relmat::PaperCatalog(std::move(ids));
  if (static_cast<std::size_t>(catalog_.size()) != papers.size()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate paper ids in publication index");
  }
  papers_.resize(papers.size());
  for (auto& p : papers) {
    const auto i = *catalog_.index_of(p.id);
    papers_[static_cast<std::size_t>(i)] = std::move(p);
  }
}

const PaperPublication* PublicationIndex::find(std::string_view id) const {
  const auto i = catalog_.index_of(id);
  return i ? &papers_[static_cast<std::size_t>(*i)] : nullptr;
}

PublicationIndex PublicationIndex::read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<PaperPublication> papers;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string id, pub, upd;
    std::getline(fields, id, '\t');
    std::getline(fields, pub, '\t');
    std::getline(fields, upd, '\t');
    const auto p = parse_time(pub);
    const auto u = upd.empty() ? p : parse_time(upd);
    if (!is_valid_paper_id(id) || !p || !u) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": bad paper metadata");
    }
    papers.push_back({id, *p, *u});
  }
  return PublicationIndex(std::move(papers));
}

void PublicationIndex::write_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& p : papers_) {
    out << p.id << '\t' << format_datetime(p.published) << '\t' << format_datetime(p.updated) << '\n';
  }
}

// ---------------------------------------------------------------------------

bool should_count_pair(Timestamp session_time, Timestamp t_i, Timestamp t_j, Seconds t_lag) {
  const Timestamp reaction = session_time - t_lag;
  const bool monthly_list = in_same_month(reaction, t_i) && in_same_month(t_i, t_j);
  const Timestamp gap = t_i > t_j ? t_i - t_j : t_j - t_i;
  const bool weekly_list = reaction - t_j <= 7 * kDay && gap <= 7 * kDay;
  return !(monthly_list || weekly_list);
}

namespace {

bool matches(const logkit::AccessEvent& e, AccessKind kind) {
  return kind == AccessKind::Download ? e.kind == logkit::EventKind::FullTextDownload
                                      : e.kind == logkit::EventKind::AbstractView;
}

}  // namespace

relmat::IncidenceMatrix<double> build_session_matrix(const std::vector<Session>& sessions,
                                                     AccessKind kind,
                                                     const relmat::PaperCatalog& catalog) {
  std::vector<std::pair<Index, Index>> cells;
  for (std::size_t r = 0; r < sessions.size(); ++r) {
    for (const auto& e : sessions[r].events) {
      if (!e.paper_id || !matches(e, kind)) continue;
      if (const auto c = catalog.index_of(*e.paper_id)) cells.emplace_back(static_cast<Index>(r), *c);
    }
  }
  return relmat::make_binary<double>(static_cast<Index>(sessions.size()), catalog.size(), cells);
}

// ---------------------------------------------------------------------------
// Spill file: per session an int64 time, a uint32 count and the sorted
// distinct paper indices.

namespace {

class SpillFile {
 public:
  explicit SpillFile(const std::filesystem::path& dir) {
    static std::atomic<std::uint64_t> counter{0};
    const auto base = dir.empty() ? std::filesystem::temp_directory_path() : dir;
    std::ostringstream name;
    name << "relrec-spill-" << ::getpid() << '-' << counter++ << ".bin";
    path_ = base / name.str();
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::Io, "cannot create spill file " + path_.string());
  }
  ~SpillFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  SpillFile(const SpillFile&) = delete;
  SpillFile& operator=(const SpillFile&) = delete;

  void append(Timestamp t, const std::vector<std::uint32_t>& papers) {
    const auto n = static_cast<std::uint32_t>(papers.size());
    out_.write(reinterpret_cast<const char*>(&t), sizeof t);
    out_.write(reinterpret_cast<const char*>(&n), sizeof n);
    out_.write(reinterpret_cast<const char*>(papers.data()),
               static_cast<std::streamsize>(papers.size() * sizeof(std::uint32_t)));
  }

  void seal() {
    out_.close();
    if (!out_) throw Error(ErrorCode::Io, "failed writing spill file");
  }

  template <typename Fn>
  void scan(Fn&& fn) const {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot reopen spill file");
    Timestamp t = 0;
    std::uint32_t n = 0;
    std::vector<std::uint32_t> papers;
    while (in.read(reinterpret_cast<char*>(&t), sizeof t)) {
      in.read(reinterpret_cast<char*>(&n), sizeof n);
      papers.resize(n);
      in.read(reinterpret_cast<char*>(papers.data()), static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
      if (!in) throw Error(ErrorCode::Io, "truncated spill file");
      if (!fn(t, papers)) return;
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

relmat::NeighborStore count_coaccesses(const std::vector<Session>& sessions,
                                       const PublicationIndex& pubs, const CoAccessConfig& config,
                                       std::size_t memory_budget, CountStats* stats_out,
                                       const std::filesystem::path& spill_dir) {
  config.validate();
  CountStats stats;
  const auto& catalog = pubs.catalog();
  const std::size_t n_papers = static_cast<std::size_t>(catalog.size());

  // First run: encode sessions to the binary spill file and collect column
  // counts and per-paper upper bounds on distinct neighbors.
  SpillFile spill(spill_dir);
  std::vector<std::uint32_t> sessions_per_paper(n_papers, 0);
  std::vector<std::uint64_t> neighbor_bound(n_papers, 0);
  std::vector<std::uint32_t> papers;
  for (const auto& s : sessions) {
    ++stats.sessions_read;
    papers.clear();
    for (const auto& e : s.events) {
      if (!e.paper_id || !matches(e, config.kind)) continue;
      const auto idx = catalog.index_of(*e.paper_id);
      if (!idx) {
        ++stats.unknown_accesses;
        continue;
      }
      if (config.ignore_after_publication &&
          e.timestamp - pubs.at(*idx).published < *config.ignore_after_publication) {
        continue;
      }
      papers.push_back(static_cast<std::uint32_t>(*idx));
    }
    std::sort(papers.begin(), papers.end());
    papers.erase(std::unique(papers.begin(), papers.end()), papers.end());
    if (papers.size() < 2) continue;
    ++stats.sessions_used;
    for (const auto p : papers) {
      ++sessions_per_paper[p];
      neighbor_bound[p] += papers.size() - 1;
    }
    spill.append(s.start, papers);
  }
  spill.seal();

  const std::size_t budget_entries = memory_budget / kEntryBytes;
  relmat::NeighborStore store;
  if (n_papers == 0) {
    if (stats_out) *stats_out = stats;
    return store;
  }

  // Papers per pass: all of them first, or as planned from the bounds.
  auto planned_chunk = [&](std::size_t start) {
    if (!config.plan_passes) return n_papers - start;
    std::size_t used = 0, count = 0;
    for (std::size_t p = start; p < n_papers; ++p) {
      const std::size_t need = std::min<std::uint64_t>(neighbor_bound[p], n_papers - 1);
      if (count > 0 && used + need > budget_entries) break;
      used += need;
      ++count;
    }
    return std::max<std::size_t>(count, 1);
  };

  std::size_t start = 0;
  std::size_t chunk = planned_chunk(0);
  std::vector<std::unordered_map<std::uint32_t, double>> tables;
  while (start < n_papers) {
    const std::size_t end = std::min(n_papers, start + chunk);
    tables.assign(end - start, {});
    std::size_t entries = 0;
    bool overflow = false;
    ++stats.attempts;

    spill.scan([&](Timestamp session_time, const std::vector<std::uint32_t>& ps) {
      const auto first = std::lower_bound(ps.begin(), ps.end(), static_cast<std::uint32_t>(start));
      const double weight =
          config.normalization == Normalization::Row ? 1.0 / static_cast<double>(ps.size()) : 1.0;
      for (auto a = first; a != ps.end() && *a < end; ++a) {
        auto& table = tables[*a - start];
        for (const auto b : ps) {
          if (b == *a) continue;
          if (config.rush_filter) {
            const Timestamp ta = pubs.at(*a).published;
            const Timestamp tb = pubs.at(b).published;
            if (!should_count_pair(session_time, ta, tb, config.t_lag) ||
                !should_count_pair(session_time, tb, ta, config.t_lag)) {
              continue;
            }
          }
          const auto [it, inserted] = table.try_emplace(b, 0.0);
          if (inserted && ++entries > budget_entries) {
            overflow = true;
            return false;
          }
          it->second += weight;
        }
      }
      return true;
    });

    if (overflow) {
      if (end - start == 1) {
        throw Error(ErrorCode::BudgetTooSmall,
                    "neighbor table of " + catalog.id(static_cast<Index>(start)) +
                        " exceeds the memory budget of " + std::to_string(memory_budget) + " bytes");
      }
      chunk = std::max<std::size_t>(1, (end - start) / 2);
      continue;
    }

    stats.peak_entries = std::max(stats.peak_entries, entries);
    ++stats.passes;
    for (std::size_t a = start; a < end; ++a) {
      relmat::TopN<double> top(config.top_n);
      for (const auto& [b, value] : tables[a - start]) {
        double score = value;
        if (config.normalization == Normalization::Column) {
          score = value / std::sqrt(static_cast<double>(sessions_per_paper[a]) *
                                    static_cast<double>(sessions_per_paper[b]));
        }
        if (score > 0) top.push(static_cast<Index>(b), score);
      }
      auto entries_out = top.take();
      if (!entries_out.empty()) {
        store.set(catalog.id(static_cast<Index>(a)),
                  relmat::to_scored({static_cast<Index>(a), std::move(entries_out)}, catalog));
      }
    }
    start = end;
    if (config.plan_passes) chunk = planned_chunk(start);
  }

  if (stats_out) *stats_out = stats;
  return store;
}

}  // namespace relrec::coaccess
