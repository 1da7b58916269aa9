#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relrec/coaccess.hpp"
#include "relrec/logkit.hpp"
#include "relrec/sessionizer.hpp"
#include "relrec/textsim.hpp"

namespace relrec::synthgen {

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t papers = 500;
  std::size_t topics = 5;
  /// Papers of a topic are grouped into clusters of this size; pairs inside a
  /// cluster are the planted related pairs.
  std::size_t cluster_size = 4;
  Timestamp start = from_civil(2001, 1, 1);
  int months = 60;
  std::size_t refs_min = 2;
  std::size_t refs_max = 14;
  /// Share of citing papers with one reference to a later paper.
  double violation_fraction = 0.02;
  /// Share of papers with a later revision date.
  double update_fraction = 1.0 / 3.0;
  std::size_t sessions = 5000;
  /// Probability that an access in a regular session stays in its topic.
  double affinity = 0.9;
  /// Probability that an in-topic access goes to the anchor paper's cluster.
  double cluster_pull = 0.6;
  double robot_fraction = 0.05;
  double rush_fraction = 0.1;
  /// Share of events written to the legacy local-time log.
  double legacy_fraction = 0.3;
  Seconds t_lag = 2 * kDay;

  void validate() const;
};

/// key = value lines; unknown keys are an error.
SynthConfig parse_synth_config(const std::string& path);

struct SynthPaper {
  coaccess::PaperPublication publication;
  std::size_t topic = 0;
  std::size_t cluster = 0;  // global cluster number
};

enum class SessionType { Regular, Robot, Rush };
std::string_view to_string(SessionType type);

struct SynthSession {
  SessionType type = SessionType::Regular;
  std::string address;
  std::string user_agent;
  std::size_t topic = 0;                     // home topic of regular sessions
  std::vector<logkit::AccessEvent> events;   // ground truth, time ordered
};

struct RawLine {
  Timestamp time;
  std::string text;
};

struct SynthCorpus {
  SynthConfig config;
  std::vector<SynthPaper> papers;  // by publication time
  std::vector<std::pair<PaperId, PaperId>> citations;
  std::vector<std::pair<PaperId, PaperId>> planted_pairs;  // first < second
  std::vector<textsim::Document> documents;
  std::vector<SynthSession> sessions;
  std::vector<RawLine> combined_log;  // Apache combined with UTC offsets
  std::vector<RawLine> legacy_log;    // local time, no offset
  std::size_t noise_lines = 0;        // non-paper requests among the raw lines

  coaccess::PublicationIndex publication_index() const;
  /// Every ground-truth access event, time ordered.
  std::vector<logkit::AccessEvent> events() const;
};

/// Log formats matching the generated raw files.
logkit::LogFormatSpec combined_format();
logkit::LogFormatSpec legacy_format();

/// Deterministic for a given config.
SynthCorpus generate(const SynthConfig& cfg);

/// Writes papers.tsv, citations.tsv, planted_pairs.tsv, topics.tsv,
/// corpus.ndjson, access_combined.log, access_legacy.tsv and synth.conf.
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

}  // namespace relrec::synthgen
