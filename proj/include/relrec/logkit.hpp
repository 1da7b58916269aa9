#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relrec/paper_id.hpp"
#include "relrec/timeutil.hpp"

namespace relrec::logkit {

enum class EventKind { AbstractView, FullTextDownload, Listing, Search, Other };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct AccessEvent {
  Timestamp timestamp = 0;
  std::string client_key;
  std::optional<PaperId> paper_id;
  EventKind kind = EventKind::Other;
  std::string source;

  bool operator==(const AccessEvent&) const = default;
};

enum class SkipReason { Malformed, NonPaperRequest, Robot };

std::string_view to_string(SkipReason reason);

struct Skip {
  SkipReason reason;
  std::string detail;
};

using ParseResult = std::variant<AccessEvent, Skip>;

/// Physical layout of a log source.
enum class Layout {
  NormalizedTsv,     // timestamp_utc_seconds, client_key, kind, paper_id|-, source
  NormalizedNdjson,  // same fields as a JSON object per line
  Combined,          // Apache combined-log style, optional numeric offset in the date
  LegacyTsv,         // local "YYYY-MM-DD HH:MM:SS", address, request, status, agent
};

struct LogFormatSpec {
  std::string name;
  Layout layout = Layout::NormalizedTsv;
  /// Applied to timestamps that carry no explicit offset.
  TimeZoneRule timezone = TimeZoneRule::fixed(0);
  /// Label attached to events from raw layouts.
  std::string source = "log";
  Timestamp epoch_begin = from_civil(1991, 1, 1);
  Timestamp epoch_end = from_civil(2100, 1, 1);
  std::size_t max_line_bytes = 64 * 1024;
};

/// Built-in formats: "tsv", "ndjson", "combined", "legacy-tsv".
std::optional<LogFormatSpec> format_by_name(std::string_view name);

enum class AgentClass { Human, Robot };

/// Case-insensitive substring patterns for crawlers, mirroring tools and
/// site-specific automation.
struct AgentClassifier {
  std::vector<std::string> robot_patterns;
  std::vector<std::string> site_patterns;

  /// A seed list of well-known crawlers and download tools. Configuration, not
  /// ground truth.
  static AgentClassifier seed();
  /// One pattern per line; blank lines and lines starting with '#' are ignored.
  /// Lines prefixed with "site:" go to the site-specific list.
  static AgentClassifier from_text(std::string_view text);
  static AgentClassifier load(const std::string& path);
};

AgentClass classify_agent(std::string_view user_agent, const AgentClassifier& classifier);

/// Lowercase hex digest of the client address and user-agent string.
std::string client_key(std::string_view address, std::string_view user_agent);

/// Parses one raw line. Never throws; every failure is a Skip. When a
/// classifier is given, robot agents are skipped.
ParseResult parse_line(std::string_view line, const LogFormatSpec& format,
                       const AgentClassifier* classifier = nullptr);

/// Maps a request path to an event kind and paper id, e.g. "/abs/hep-th/0101001".
/// Returns nullopt for static resources and other non-paper requests.
std::optional<std::pair<EventKind, std::optional<PaperId>>> classify_request(std::string_view path);

std::string format_tsv(const AccessEvent& e);
std::string format_ndjson(const AccessEvent& e);

struct ParseStats {
  std::size_t lines = 0;
  std::size_t events = 0;
  std::size_t malformed = 0;
  std::size_t non_paper = 0;
  std::size_t robots = 0;
};

/// Reads a plain or gzip-compressed file line by line with a bounded buffer.
/// Lines longer than `max_line_bytes` are delivered truncated with
/// `overlong = true`.
class LineReader {
 public:
  LineReader(const std::string& path, std::size_t max_line_bytes);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line, bool& overlong);

 private:
  void* handle_ = nullptr;  // gzFile
  std::size_t max_line_bytes_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;

  int get();
};

/// Parses a whole file; one result per line.
std::vector<AccessEvent> parse_file(const std::string& path, const LogFormatSpec& format,
                                    const AgentClassifier* classifier, ParseStats& stats);

/// Pull-style stream of events: returns nullopt when exhausted.
using EventSource = std::function<std::optional<AccessEvent>()>;

EventSource from_vector(std::vector<AccessEvent> events);

/// Merges approximately ordered per-source streams into one stream that is
/// non-decreasing in timestamp. Equal timestamps are ordered by source label,
/// then stream position, then input order. Throws DisorderExceeded if an event
/// arrives more than `disorder_bound` seconds behind the newest event already
/// seen on its stream.
class StreamMerger {
 public:
  StreamMerger(std::vector<EventSource> sources, Seconds disorder_bound = kHour);
  ~StreamMerger();
  StreamMerger(StreamMerger&&) noexcept;
  StreamMerger& operator=(StreamMerger&&) noexcept;

  std::optional<AccessEvent> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<AccessEvent> merge_streams(std::vector<std::vector<AccessEvent>> streams,
                                       Seconds disorder_bound = kHour);

/// Reads a normalized event file (TSV or ndjson, detected per line).
std::vector<AccessEvent> read_events(const std::string& path, ParseStats* stats = nullptr);

}  // namespace relrec::logkit
