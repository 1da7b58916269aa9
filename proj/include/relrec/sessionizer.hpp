#pragma once

#include <functional>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "relrec/logkit.hpp"

namespace relrec::sessionizer {

using logkit::AccessEvent;
using logkit::EventKind;

struct Session {
  std::string client_key;
  std::vector<AccessEvent> events;
  Timestamp start = 0;
  Timestamp end = 0;

  /// Accesses that carry a paper id.
  std::size_t countable() const;
  bool operator==(const Session&) const = default;
};

enum class FilterStep {
  Dedup,      // unify identical consecutive accesses
  ValidId,    // keep only paper-identified accesses with a valid id
  Size,       // duration and access-count caps
  Kinds,      // keep only the configured access kinds
};

std::string_view to_string(FilterStep step);

struct SessionizerConfig {
  Seconds timeout = 30 * kMinute;
  std::vector<FilterStep> filters = {FilterStep::Dedup, FilterStep::ValidId, FilterStep::Size,
                                     FilterStep::Kinds};
  std::size_t min_countable = 2;
  std::size_t max_countable = 300;
  Seconds max_duration = 16 * kHour;
  std::set<EventKind> kinds = {EventKind::AbstractView, EventKind::FullTextDownload};

  void validate() const;
};

/// Parses a filter chain such as
/// "dedup,valid-id,size:min=2:max=300:hours=16,kinds:download+view".
/// Parameters update `config` in place.
void parse_filter_spec(std::string_view spec, SessionizerConfig& config);

enum class DropReason { TooSmall, TooLarge, TooLong };

std::string_view to_string(DropReason reason);

struct Drop {
  DropReason reason;
};

using FilterResult = std::variant<Session, Drop>;

/// Runs the configured filter chain. Regardless of the chain, a session ending
/// with fewer than `min_countable` paper accesses is dropped as too small.
FilterResult apply_filters(Session session, const SessionizerConfig& config);

/// Streaming sessionizer: one linear pass, open sessions held in an LRU list
/// keyed by client. A session expires once its client has been idle for more
/// than the timeout, or at finish().
class Sessionizer {
 public:
  using Sink = std::function<void(Session&&)>;

  Sessionizer(Seconds timeout, Sink sink);

  /// Throws UnorderedInput if the timestamp regresses.
  void push(const AccessEvent& event);
  /// Flushes every open session.
  void finish();

  std::size_t open_sessions() const { return index_.size(); }
  std::size_t peak_open_sessions() const { return peak_open_; }
  std::size_t emitted() const { return emitted_; }

 private:
  using Lru = std::list<Session>;

  Seconds timeout_;
  Sink sink_;
  Lru lru_;  // front = least recently active
  std::unordered_map<std::string, Lru::iterator> index_;
  std::optional<Timestamp> last_;
  std::size_t peak_open_ = 0;
  std::size_t emitted_ = 0;

  void expire_before(Timestamp cutoff);
};

/// Batch convenience over Sessionizer; sessions are returned in expiry order.
std::vector<Session> sessionize(const std::vector<AccessEvent>& events, Seconds timeout);

struct ConcurrencySample {
  Timestamp time;
  std::size_t active;
};

struct ConcurrencySeries {
  Seconds window = 0;
  std::vector<ConcurrencySample> samples;
};

/// For each sample time, the number of sessions with at least one event in the
/// trailing window (time - window, time]. With step == 0, samples are taken at
/// every distinct event timestamp; otherwise on a regular grid starting at the
/// first event.
ConcurrencySeries concurrency_series(const std::vector<Session>& sessions, Seconds window,
                                     Seconds step = 0);

// Session file: one ndjson object per line,
// {client_key, start, end, accesses: [{t, kind, paper_id}]}
std::string to_ndjson(const Session& s);
Session session_from_ndjson(std::string_view line);
std::vector<Session> read_sessions(const std::string& path);
void write_sessions(const std::string& path, const std::vector<Session>& sessions);

}  // namespace relrec::sessionizer
