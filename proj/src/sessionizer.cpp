#include "relrec/sessionizer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include "json.hpp"

#include "relrec/error.hpp"

namespace relrec::sessionizer {

std::size_t Session::countable() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const AccessEvent& e) { return e.paper_id.has_value(); }));
}

std::string_view to_string(FilterStep step) {
  switch (step) {
    case FilterStep::Dedup: return "dedup";
    case FilterStep::ValidId: return "valid-id";
    case FilterStep::Size: return "size";
    case FilterStep::Kinds: return "kinds";
  }
  return "?";
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::TooSmall: return "too_small";
    case DropReason::TooLarge: return "too_large";
    case DropReason::TooLong: return "too_long";
  }
  return "?";
}

void SessionizerConfig::validate() const {
  if (timeout <= 0) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
  if (max_countable < min_countable) throw Error(ErrorCode::InvalidConfig, "max < min session size");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::size_t to_size(std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::InvalidConfig, "bad number in filter spec: " + std::string(v));
  }
  return out;
}

}  // namespace

void parse_filter_spec(std::string_view spec, SessionizerConfig& config) {
  config.filters.clear();
  if (spec.empty()) return;
  for (auto item : split(spec, ',')) {
    const auto parts = split(item, ':');
    const auto name = parts.front();
    if (name == "dedup") {
      config.filters.push_back(FilterStep::Dedup);
    } else if (name == "valid-id") {
      config.filters.push_back(FilterStep::ValidId);
    } else if (name == "size") {
      config.filters.push_back(FilterStep::Size);
      for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidConfig, "expected key=value");
        const auto key = parts[i].substr(0, eq);
        const auto value = parts[i].substr(eq + 1);
        if (key == "min") {
          config.min_countable = to_size(value);
        } else if (key == "max") {
          config.max_countable = to_size(value);
        } else if (key == "hours") {
          config.max_duration = static_cast<Seconds>(to_size(value)) * kHour;
        } else {
          throw Error(ErrorCode::InvalidConfig, "unknown size parameter " + std::string(key));
        }
      }
    } else if (name == "kinds") {
      config.filters.push_back(FilterStep::Kinds);
      if (parts.size() > 1) {
        config.kinds.clear();
        for (auto k : split(parts[1], '+')) {
          const auto kind = logkit::parse_event_kind(k);
          if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown kind " + std::string(k));
          config.kinds.insert(*kind);
        }
      }
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown filter step " + std::string(name));
    }
  }
  config.validate();
}

namespace {

void refresh_bounds(Session& s) {
  if (!s.events.empty()) {
    s.start = s.events.front().timestamp;
    s.end = s.events.back().timestamp;
  }
}

}  // namespace

FilterResult apply_filters(Session session, const SessionizerConfig& config) {
  for (const auto step : config.filters) {
    auto& ev = session.events;
    switch (step) {
      case FilterStep::Dedup: {
        auto same = [](const AccessEvent& a, const AccessEvent& b) {
          return a.kind == b.kind && a.paper_id == b.paper_id;
        };
        ev.erase(std::unique(ev.begin(), ev.end(), same), ev.end());
        break;
      }
      case FilterStep::ValidId:
        std::erase_if(ev, [](const AccessEvent& e) { return !e.paper_id || !is_valid_paper_id(*e.paper_id); });
        break;
      case FilterStep::Size: {
        const auto n = session.countable();
        if (n < config.min_countable) return Drop{DropReason::TooSmall};
        if (n > config.max_countable) return Drop{DropReason::TooLarge};
        if (!ev.empty() && ev.back().timestamp - ev.front().timestamp > config.max_duration) {
          return Drop{DropReason::TooLong};
        }
        break;
      }
      case FilterStep::Kinds:
        std::erase_if(ev, [&](const AccessEvent& e) { return !config.kinds.contains(e.kind); });
        break;
    }
  }
  if (session.countable() < config.min_countable) return Drop{DropReason::TooSmall};
  refresh_bounds(session);
  return session;
}

// ---------------------------------------------------------------------------

Sessionizer::Sessionizer(Seconds timeout, Sink sink) : timeout_(timeout), sink_(std::move(sink)) {
  if (timeout_ <= 0) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
}

void Sessionizer::expire_before(Timestamp cutoff) {
  while (!lru_.empty() && lru_.front().end < cutoff) {
    index_.erase(lru_.front().client_key);
    Session s = std::move(lru_.front());
    lru_.pop_front();
    ++emitted_;
    sink_(std::move(s));
  }
}

void Sessionizer::push(const AccessEvent& event) {
  if (last_ && event.timestamp < *last_) {
    throw Error(ErrorCode::UnorderedInput, "timestamp " + std::to_string(event.timestamp) +
                                               " after " + std::to_string(*last_));
  }
  last_ = event.timestamp;
  // idle for more than the timeout: end < t - timeout
  expire_before(event.timestamp - timeout_);

  if (auto it = index_.find(event.client_key); it != index_.end()) {
    auto node = it->second;
    node->events.push_back(event);
    node->end = event.timestamp;
    lru_.splice(lru_.end(), lru_, node);
  } else {
    Session s{event.client_key, {event}, event.timestamp, event.timestamp};
    lru_.push_back(std::move(s));
    index_.emplace(event.client_key, std::prev(lru_.end()));
  }
  peak_open_ = std::max(peak_open_, index_.size());
}

void Sessionizer::finish() {
  expire_before(std::numeric_limits<Timestamp>::max());
}

std::vector<Session> sessionize(const std::vector<AccessEvent>& events, Seconds timeout) {
  std::vector<Session> out;
  Sessionizer s(timeout, [&](Session&& session) { out.push_back(std::move(session)); });
  for (const auto& e : events) s.push(e);
  s.finish();
  return out;
}

ConcurrencySeries concurrency_series(const std::vector<Session>& sessions, Seconds window,
                                     Seconds step) {
  ConcurrencySeries series;
  series.window = window;
  std::vector<std::pair<Timestamp, std::size_t>> events;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    for (const auto& e : sessions[i].events) events.emplace_back(e.timestamp, i);
  }
  if (events.empty()) return series;
  std::sort(events.begin(), events.end());

  std::vector<Timestamp> times;
  if (step <= 0) {
    for (const auto& [t, _] : events) {
      if (times.empty() || times.back() != t) times.push_back(t);
    }
  } else {
    for (Timestamp t = events.front().first; t <= events.back().first; t += step) times.push_back(t);
  }

  // sliding window over sorted events: per-session hit counts inside (t - window, t]
  std::vector<std::size_t> hits(sessions.size(), 0);
  std::size_t active = 0, head = 0, tail = 0;
  for (const Timestamp t : times) {
    while (head < events.size() && events[head].first <= t) {
      if (hits[events[head].second]++ == 0) ++active;
      ++head;
    }
    while (tail < head && events[tail].first <= t - window) {
      if (--hits[events[tail].second] == 0) --active;
      ++tail;
    }
    series.samples.push_back({t, active});
  }
  return series;
}

// ---------------------------------------------------------------------------

std::string to_ndjson(const Session& s) {
  nlohmann::json j;
  j["client_key"] = s.client_key;
  j["start"] = s.start;
  j["end"] = s.end;
  auto& acc = j["accesses"] = nlohmann::json::array();
  for (const auto& e : s.events) {
    acc.push_back({{"t", e.timestamp},
                   {"kind", logkit::to_string(e.kind)},
                   {"paper_id", e.paper_id ? *e.paper_id : "-"}});
  }
  return j.dump();
}

Session session_from_ndjson(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::Parse, "invalid session json");
  try {
    Session s;
    s.client_key = j.at("client_key").get<std::string>();
    for (const auto& a : j.at("accesses")) {
      AccessEvent e;
      e.timestamp = a.at("t").get<Timestamp>();
      e.client_key = s.client_key;
      const auto kind = logkit::parse_event_kind(a.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::Parse, "unknown access kind");
      e.kind = *kind;
      if (auto p = a.at("paper_id").get<std::string>(); p != "-") e.paper_id = std::move(p);
      s.events.push_back(std::move(e));
    }
    s.start = j.at("start").get<Timestamp>();
    s.end = j.at("end").get<Timestamp>();
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, ex.what());
  }
}

std::vector<Session> read_sessions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<Session> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(session_from_ndjson(line));
  }
  return out;
}

void write_sessions(const std::string& path, const std::vector<Session>& sessions) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  for (const auto& s : sessions) out << to_ndjson(s) << '\n';
}

}  // namespace relrec::sessionizer
