#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relrec/relmat.hpp"
#include "relrec/sessionizer.hpp"
#include "relrec/timeutil.hpp"

namespace relrec::coaccess {

using relmat::Index;
using sessionizer::Session;

enum class AccessKind { Download, View };
enum class Normalization { None, Row, Column };

std::string_view to_string(AccessKind kind);
std::string_view to_string(Normalization norm);
std::optional<AccessKind> parse_access_kind(std::string_view text);
std::optional<Normalization> parse_normalization(std::string_view text);

struct CoAccessConfig {
  AccessKind kind = AccessKind::Download;
  /// Delay between alert mailings and the reactions to them.
  Seconds t_lag = 2 * kDay;
  bool rush_filter = true;
  Normalization normalization = Normalization::None;
  std::size_t top_n = 300;
  /// Optional stronger regularization: drop every access to a paper made within
  /// this many seconds after its publication.
  std::optional<Seconds> ignore_after_publication;
  /// Estimate pass sizes from a counting pre-pass instead of starting with all
  /// papers and halving on overflow.
  bool plan_passes = false;

  void validate() const;
};

struct PaperPublication {
  PaperId id;
  Timestamp published = 0;
  Timestamp updated = 0;
};

/// Publication dates for every known paper. Indices follow the sorted catalog.
class PublicationIndex {
 public:
  PublicationIndex() = default;
  explicit PublicationIndex(std::vector<PaperPublication> papers);

  const relmat::PaperCatalog& catalog() const { return catalog_; }
  const PaperPublication& at(Index i) const { return papers_.at(static_cast<std::size_t>(i)); }
  const PaperPublication* find(std::string_view id) const;
  Index size() const { return catalog_.size(); }
  const std::vector<PaperPublication>& papers() const { return papers_; }

  /// Paper metadata TSV: id, pub_date, update_date (extra columns ignored).
  static PublicationIndex read_tsv(const std::string& path);
  void write_tsv(const std::string& path) const;

 private:
  relmat::PaperCatalog catalog_;
  std::vector<PaperPublication> papers_;  // aligned with catalog_
};

/// Rush filter for a co-access of papers published at t_i and t_j inside a
/// session at session_time: false when the pair looks induced by new/recent/
/// current listings or alerts.
bool should_count_pair(Timestamp session_time, Timestamp t_i, Timestamp t_j, Seconds t_lag);

/// Binary session x paper matrix for the given access kind: one row per input
/// session, repeated accesses collapse to 1, unknown papers are left out.
relmat::IncidenceMatrix<double> build_session_matrix(const std::vector<Session>& sessions,
                                                     AccessKind kind,
                                                     const relmat::PaperCatalog& catalog);

struct CountStats {
  std::size_t sessions_read = 0;
  std::size_t sessions_used = 0;      // at least two distinct known papers
  std::size_t unknown_accesses = 0;   // paper ids missing from the publication index
  std::size_t passes = 0;             // successful passes
  std::size_t attempts = 0;           // including passes aborted on budget overflow
  std::size_t peak_entries = 0;
};

/// Approximate cost of one counter entry in a per-paper hash table.
inline constexpr std::size_t kEntryBytes = 32;

/// Out-of-core co-access counting. Sessions are first encoded to a compact
/// binary spill file; then repeated linear scans count, per pass, the
/// co-accesses of as many papers as fit in `memory_budget` bytes. On overflow
/// the pass is retried with half as many papers. The result does not depend on
/// the number of passes.
relmat::NeighborStore count_coaccesses(const std::vector<Session>& sessions,
                                       const PublicationIndex& pubs, const CoAccessConfig& config,
                                       std::size_t memory_budget, CountStats* stats = nullptr,
                                       const std::filesystem::path& spill_dir = {});

}  // namespace relrec::coaccess
