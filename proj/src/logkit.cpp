#include "relrec/logkit.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include "json.hpp"

#include "relrec/error.hpp"

namespace relrec::logkit {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AbstractView: return "view";
    case EventKind::FullTextDownload: return "download";
    case EventKind::Listing: return "listing";
    case EventKind::Search: return "search";
    case EventKind::Other: return "other";
  }
  return "other";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "view") return EventKind::AbstractView;
  if (text == "download") return EventKind::FullTextDownload;
  if (text == "listing") return EventKind::Listing;
  if (text == "search") return EventKind::Search;
  if (text == "other") return EventKind::Other;
  return std::nullopt;
}

std::string_view to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::Malformed: return "malformed";
    case SkipReason::NonPaperRequest: return "non_paper";
    case SkipReason::Robot: return "robot";
  }
  return "malformed";
}

std::optional<LogFormatSpec> format_by_name(std::string_view name) {
  LogFormatSpec spec;
  spec.name = std::string(name);
  if (name == "tsv") {
    spec.layout = Layout::NormalizedTsv;
  } else if (name == "ndjson") {
    spec.layout = Layout::NormalizedNdjson;
  } else if (name == "combined") {
    spec.layout = Layout::Combined;
    spec.source = "combined";
  } else if (name == "legacy-tsv") {
    spec.layout = Layout::LegacyTsv;
    spec.source = "legacy";
  } else {
    return std::nullopt;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Agent classification

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

AgentClassifier AgentClassifier::seed() {
  AgentClassifier c;
  c.robot_patterns = {
      "googlebot",   "bingbot",      "msnbot",       "slurp",         "baiduspider",
      "yandex",      "teoma",        "ia_archiver",  "archive.org_bot", "crawler",
      "spider",      "robot",        "bot/",         "bot;",          "wget",
      "curl/",       "libwww-perl",  "lwp-",         "python-urllib", "python-requests",
      "java/",       "httrack",      "webcopier",    "webzip",        "teleport",
      "offline explorer", "webstripper", "websucker", "pavuk",        "larbin",
      "harvest",     "fetch",        "scooter",      "gigabot",       "ask jeeves",
  };
  c.site_patterns = {"mirror-sync", "arxiv-harvester", "oai-pmh"};
  return c;
}

AgentClassifier AgentClassifier::from_text(std::string_view text) {
  AgentClassifier c;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("site:")) {
      c.site_patterns.push_back(lowercase(trim(line.substr(5))));
    } else {
      c.robot_patterns.push_back(lowercase(line));
    }
  }
  return c;
}

AgentClassifier AgentClassifier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open agent list " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_text(text);
}

AgentClass classify_agent(std::string_view user_agent, const AgentClassifier& classifier) {
  const auto agent = lowercase(user_agent);
  auto matches = [&](const std::vector<std::string>& patterns) {
    return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
      return !p.empty() && agent.find(lowercase(p)) != std::string::npos;
    });
  };
  return matches(classifier.robot_patterns) || matches(classifier.site_patterns) ? AgentClass::Robot
                                                                                  : AgentClass::Human;
}

std::string client_key(std::string_view address, std::string_view user_agent) {
  std::string material;
  material.reserve(address.size() + user_agent.size() + 1);
  material.append(address).push_back('\x1f');
  material.append(user_agent);

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(material.data(), material.size(), digest.data(), &len, EVP_sha256(), nullptr);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(16);
  for (unsigned i = 0; i < 8 && i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Request classification

std::optional<std::pair<EventKind, std::optional<PaperId>>> classify_request(std::string_view path) {
  if (const auto q = path.find_first_of("?#"); q != std::string_view::npos) {
    const auto base = path.substr(0, q);
    if (base.starts_with("/find") || base.starts_with("/search")) {
      return std::pair{EventKind::Search, std::optional<PaperId>{}};
    }
    path = base;
  }
  static constexpr std::array<std::string_view, 8> kStatic = {".css", ".js",  ".png", ".gif",
                                                              ".jpg", ".ico", ".txt", ".svg"};
  for (auto ext : kStatic) {
    if (path.ends_with(ext)) return std::nullopt;
  }

  auto paper_after = [](std::string_view rest) -> std::optional<PaperId> {
    for (std::string_view suffix : {".pdf", ".ps", ".gz"}) {
      if (rest.ends_with(suffix)) rest.remove_suffix(suffix.size());
    }
    // version suffix such as "v2"
    if (const auto v = rest.rfind('v'); v != std::string_view::npos && v + 1 < rest.size() &&
                                        v > 0 && std::isdigit(static_cast<unsigned char>(rest[v - 1]))) {
      const auto digits = rest.substr(v + 1);
      if (std::all_of(digits.begin(), digits.end(),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        rest = rest.substr(0, v);
      }
    }
    if (!is_valid_paper_id(rest)) return std::nullopt;
    return PaperId(rest);
  };

  struct Prefix {
    std::string_view prefix;
    EventKind kind;
  };
  static constexpr std::array<Prefix, 5> kPaperPrefixes = {{
      {"/abs/", EventKind::AbstractView},
      {"/pdf/", EventKind::FullTextDownload},
      {"/ps/", EventKind::FullTextDownload},
      {"/format/", EventKind::FullTextDownload},
      {"/e-print/", EventKind::FullTextDownload},
  }};
  for (const auto& p : kPaperPrefixes) {
    if (path.starts_with(p.prefix)) {
      auto id = paper_after(path.substr(p.prefix.size()));
      if (!id) return std::nullopt;
      return std::pair{p.kind, std::optional<PaperId>{std::move(*id)}};
    }
  }
  if (path.starts_with("/list/") || path.starts_with("/new") || path.starts_with("/recent")) {
    return std::pair{EventKind::Listing, std::optional<PaperId>{}};
  }
  if (path.starts_with("/find") || path.starts_with("/search")) {
    return std::pair{EventKind::Search, std::optional<PaperId>{}};
  }
  return std::pair{EventKind::Other, std::optional<PaperId>{}};
}

// ---------------------------------------------------------------------------
// Line parsing

namespace {

Skip malformed(std::string detail) { return Skip{SkipReason::Malformed, std::move(detail)}; }

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool kind_needs_paper(EventKind k) {
  return k == EventKind::AbstractView || k == EventKind::FullTextDownload;
}

ParseResult finish(AccessEvent e, const LogFormatSpec& format) {
  if (e.timestamp < format.epoch_begin || e.timestamp >= format.epoch_end) {
    return malformed("timestamp outside corpus epoch");
  }
  if (e.paper_id && !is_valid_paper_id(*e.paper_id)) return malformed("invalid paper id");
  if (kind_needs_paper(e.kind) && !e.paper_id) return malformed("paper kind without paper id");
  return e;
}

ParseResult parse_normalized_tsv(std::string_view line, const LogFormatSpec& format) {
  const auto cols = split_tabs(line);
  if (cols.size() != 5) return malformed("expected 5 columns");
  AccessEvent e;
  if (!parse_int(cols[0], e.timestamp)) return malformed("bad timestamp");
  if (cols[1].empty()) return malformed("empty client key");
  e.client_key = std::string(cols[1]);
  const auto kind = parse_event_kind(cols[2]);
  if (!kind) return malformed("unknown kind");
  e.kind = *kind;
  if (cols[3] != "-") e.paper_id = std::string(cols[3]);
  e.source = std::string(cols[4]);
  return finish(std::move(e), format);
}

ParseResult parse_normalized_ndjson(std::string_view line, const LogFormatSpec& format) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return malformed("invalid json");
  AccessEvent e;
  const auto ts = j.find("timestamp_utc_seconds");
  const auto key = j.find("client_key");
  const auto kind = j.find("kind");
  if (ts == j.end() || !ts->is_number_integer()) return malformed("bad timestamp");
  if (key == j.end() || !key->is_string() || key->get_ref<const std::string&>().empty()) {
    return malformed("bad client key");
  }
  if (kind == j.end() || !kind->is_string()) return malformed("bad kind");
  e.timestamp = ts->get<Timestamp>();
  e.client_key = key->get<std::string>();
  const auto k = parse_event_kind(kind->get_ref<const std::string&>());
  if (!k) return malformed("unknown kind");
  e.kind = *k;
  if (const auto p = j.find("paper_id"); p != j.end() && p->is_string() && *p != "-") {
    e.paper_id = p->get<std::string>();
  } else if (p != j.end() && !p->is_null() && !p->is_string()) {
    return malformed("bad paper id");
  }
  if (const auto s = j.find("source"); s != j.end() && s->is_string()) e.source = s->get<std::string>();
  return finish(std::move(e), format);
}

const std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Parses a request line "GET /path HTTP/1.0" into (method, path).
std::optional<std::pair<std::string_view, std::string_view>> split_request(std::string_view req) {
  const auto sp1 = req.find(' ');
  if (sp1 == std::string_view::npos || sp1 == 0) return std::nullopt;
  const auto method = req.substr(0, sp1);
  auto rest = req.substr(sp1 + 1);
  const auto sp2 = rest.find(' ');
  const auto path = rest.substr(0, sp2);
  if (path.empty() || path.front() != '/') return std::nullopt;
  return std::pair{method, path};
}

ParseResult from_request(Timestamp ts, std::string_view address, std::string_view request,
                         int status, std::string_view agent, const LogFormatSpec& format,
                         const AgentClassifier* classifier) {
  const auto req = split_request(request);
  if (!req) return malformed("bad request line");
  if (classifier && classify_agent(agent, *classifier) == AgentClass::Robot) {
    return Skip{SkipReason::Robot, std::string(agent.substr(0, 128))};
  }
  if (req->first != "GET" && req->first != "POST") return Skip{SkipReason::NonPaperRequest, "method"};
  if (status >= 400) return Skip{SkipReason::NonPaperRequest, "status"};
  auto classified = classify_request(req->second);
  if (!classified) return Skip{SkipReason::NonPaperRequest, "resource"};
  AccessEvent e;
  e.timestamp = ts;
  e.client_key = client_key(address, agent);
  e.kind = classified->first;
  e.paper_id = std::move(classified->second);
  e.source = format.source;
  return finish(std::move(e), format);
}

// Reads a double-quoted field starting at `pos` (which must point at '"').
std::optional<std::string> quoted(std::string_view line, std::size_t& pos) {
  if (pos >= line.size() || line[pos] != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = pos + 1; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) {
      out.push_back(line[++i]);
    } else if (line[i] == '"') {
      pos = i + 1;
      return out;
    } else {
      out.push_back(line[i]);
    }
  }
  return std::nullopt;
}

void skip_spaces(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && line[pos] == ' ') ++pos;
}

std::optional<std::string_view> bare_token(std::string_view line, std::size_t& pos) {
  skip_spaces(line, pos);
  const auto end = line.find(' ', pos);
  if (pos >= line.size()) return std::nullopt;
  auto tok = line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
  pos = end == std::string_view::npos ? line.size() : end;
  return tok;
}

// "10/Oct/2004:13:55:36 -0700" or "10/Oct/2004:13:55:36"
std::optional<Timestamp> parse_clf_time(std::string_view s, const TimeZoneRule& tz) {
  if (s.size() < 20 || s[2] != '/' || s[6] != '/' || s[11] != ':' || s[14] != ':' || s[17] != ':') {
    return std::nullopt;
  }
  int day = 0, year = 0, h = 0, mi = 0, sec = 0;
  if (!parse_int(s.substr(0, 2), day) || !parse_int(s.substr(7, 4), year) ||
      !parse_int(s.substr(12, 2), h) || !parse_int(s.substr(15, 2), mi) ||
      !parse_int(s.substr(18, 2), sec)) {
    return std::nullopt;
  }
  const auto mon = std::find(kMonths.begin(), kMonths.end(), s.substr(3, 3));
  if (mon == kMonths.end()) return std::nullopt;
  const unsigned month = static_cast<unsigned>(mon - kMonths.begin()) + 1;
  const CivilTime local{year, month, static_cast<unsigned>(day), h, mi, sec};
  if (h > 23 || mi > 59 || sec > 60 || day < 1 || day > 31) return std::nullopt;
  if (s.size() == 20) return tz.to_utc(local);
  if (s.size() != 26 || s[20] != ' ') return std::nullopt;
  const auto off = TimeZoneRule::parse(s.substr(21));
  if (!off) return std::nullopt;
  return off->to_utc(local);
}

ParseResult parse_combined(std::string_view line, const LogFormatSpec& format,
                           const AgentClassifier* classifier) {
  std::size_t pos = 0;
  const auto host = bare_token(line, pos);
  const auto ident = bare_token(line, pos);
  const auto user = bare_token(line, pos);
  if (!host || !ident || !user) return malformed("missing host fields");
  skip_spaces(line, pos);
  if (pos >= line.size() || line[pos] != '[') return malformed("missing date");
  const auto close = line.find(']', pos);
  if (close == std::string_view::npos) return malformed("unterminated date");
  const auto ts = parse_clf_time(line.substr(pos + 1, close - pos - 1), format.timezone);
  if (!ts) return malformed("bad date");
  pos = close + 1;
  skip_spaces(line, pos);
  const auto request = quoted(line, pos);
  if (!request) return malformed("bad request field");
  const auto status_tok = bare_token(line, pos);
  const auto bytes_tok = bare_token(line, pos);
  int status = 0;
  if (!status_tok || !parse_int(*status_tok, status) || !bytes_tok) return malformed("bad status");
  skip_spaces(line, pos);
  const auto referer = quoted(line, pos);
  skip_spaces(line, pos);
  const auto agent = quoted(line, pos);
  if (!referer || !agent) return malformed("bad referer/agent");
  return from_request(*ts, *host, *request, status, *agent, format, classifier);
}

ParseResult parse_legacy_tsv(std::string_view line, const LogFormatSpec& format,
                             const AgentClassifier* classifier) {
  const auto cols = split_tabs(line);
  if (cols.size() != 5) return malformed("expected 5 columns");
  const auto when = cols[0];
  if (when.size() != 19 || when[10] != ' ') return malformed("bad local time");
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (when[4] != '-' || when[7] != '-' || when[13] != ':' || when[16] != ':' ||
      !parse_int(when.substr(0, 4), y) || !parse_int(when.substr(5, 2), mo) ||
      !parse_int(when.substr(8, 2), d) || !parse_int(when.substr(11, 2), h) ||
      !parse_int(when.substr(14, 2), mi) || !parse_int(when.substr(17, 2), s)) {
    return malformed("bad local time");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    return malformed("bad local time");
  }
  const auto ts = format.timezone.to_utc(
      CivilTime{y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s});
  int status = 0;
  if (cols[1].empty()) return malformed("empty address");
  if (!parse_int(cols[3], status)) return malformed("bad status");
  return from_request(ts, cols[1], cols[2], status, cols[4], format, classifier);
}

}  // namespace

ParseResult parse_line(std::string_view line, const LogFormatSpec& format,
                       const AgentClassifier* classifier) {
  if (line.size() > format.max_line_bytes) return malformed("line too long");
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (trim(line).empty()) return malformed("empty line");
  if (line.find('\0') != std::string_view::npos) return malformed("embedded NUL");
  switch (format.layout) {
    case Layout::NormalizedTsv: return parse_normalized_tsv(line, format);
    case Layout::NormalizedNdjson: return parse_normalized_ndjson(line, format);
    case Layout::Combined: return parse_combined(line, format, classifier);
    case Layout::LegacyTsv: return parse_legacy_tsv(line, format, classifier);
  }
  return malformed("unknown layout");
}

std::string format_tsv(const AccessEvent& e) {
  std::string out = std::to_string(e.timestamp);
  out.push_back('\t');
  out += e.client_key;
  out.push_back('\t');
  out += to_string(e.kind);
  out.push_back('\t');
  out += e.paper_id ? *e.paper_id : "-";
  out.push_back('\t');
  out += e.source;
  return out;
}

std::string format_ndjson(const AccessEvent& e) {
  nlohmann::json j;
  j["timestamp_utc_seconds"] = e.timestamp;
  j["client_key"] = e.client_key;
  j["kind"] = to_string(e.kind);
  j["paper_id"] = e.paper_id ? *e.paper_id : "-";
  j["source"] = e.source;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Line reader

LineReader::LineReader(const std::string& path, std::size_t max_line_bytes)
    : max_line_bytes_(max_line_bytes), buffer_(1 << 16) {
  handle_ = gzopen(path.c_str(), "rb");
  if (!handle_) throw Error(ErrorCode::Io, "cannot open " + path);
}

LineReader::~LineReader() {
  if (handle_) gzclose(static_cast<gzFile>(handle_));
}

int LineReader::get() {
  if (pos_ == end_) {
    if (eof_) return -1;
    const int n = gzread(static_cast<gzFile>(handle_), buffer_.data(),
                         static_cast<unsigned>(buffer_.size()));
    if (n <= 0) {
      eof_ = true;
      return -1;
    }
    pos_ = 0;
    end_ = static_cast<std::size_t>(n);
  }
  return static_cast<unsigned char>(buffer_[pos_++]);
}

bool LineReader::next(std::string& line, bool& overlong) {
  line.clear();
  overlong = false;
  int c = get();
  if (c < 0) return false;
  while (c >= 0 && c != '\n') {
    if (line.size() < max_line_bytes_) {
      line.push_back(static_cast<char>(c));
    } else {
      overlong = true;
    }
    c = get();
  }
  return true;
}

std::vector<AccessEvent> parse_file(const std::string& path, const LogFormatSpec& format,
                                    const AgentClassifier* classifier, ParseStats& stats) {
  std::vector<AccessEvent> out;
  LineReader reader(path, format.max_line_bytes);
  std::string line;
  bool overlong = false;
  while (reader.next(line, overlong)) {
    ++stats.lines;
    ParseResult r = overlong ? ParseResult{malformed("line too long")}
                             : parse_line(line, format, classifier);
    if (auto* e = std::get_if<AccessEvent>(&r)) {
      ++stats.events;
      out.push_back(std::move(*e));
    } else {
      switch (std::get<Skip>(r).reason) {
        case SkipReason::Malformed: ++stats.malformed; break;
        case SkipReason::NonPaperRequest: ++stats.non_paper; break;
        case SkipReason::Robot: ++stats.robots; break;
      }
    }
  }
  return out;
}

std::vector<AccessEvent> read_events(const std::string& path, ParseStats* stats) {
  ParseStats local;
  ParseStats& s = stats ? *stats : local;
  LogFormatSpec tsv = *format_by_name("tsv");
  LogFormatSpec json = *format_by_name("ndjson");
  // normalized files are trusted to already respect the corpus epoch
  tsv.epoch_begin = json.epoch_begin = std::numeric_limits<Timestamp>::min();
  tsv.epoch_end = json.epoch_end = std::numeric_limits<Timestamp>::max();
  std::vector<AccessEvent> out;
  LineReader reader(path, tsv.max_line_bytes);
  std::string line;
  bool overlong = false;
  while (reader.next(line, overlong)) {
    if (trim(line).empty()) continue;
    ++s.lines;
    const auto& fmt = trim(line).front() == '{' ? json : tsv;
    auto r = overlong ? ParseResult{malformed("line too long")} : parse_line(line, fmt);
    if (auto* e = std::get_if<AccessEvent>(&r)) {
      ++s.events;
      out.push_back(std::move(*e));
    } else {
      ++s.malformed;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Merging

EventSource from_vector(std::vector<AccessEvent> events) {
  auto data = std::make_shared<std::vector<AccessEvent>>(std::move(events));
  auto index = std::make_shared<std::size_t>(0);
  return [data, index]() -> std::optional<AccessEvent> {
    if (*index >= data->size()) return std::nullopt;
    return (*data)[(*index)++];
  };
}

namespace {

struct Pending {
  AccessEvent event;
  std::uint64_t seq;
};

struct PendingLater {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.event.timestamp != b.event.timestamp) return a.event.timestamp > b.event.timestamp;
    return a.seq > b.seq;
  }
};

}  // namespace

struct StreamMerger::Impl {
  struct Stream {
    EventSource source;
    std::vector<Pending> heap;  // min-heap by (timestamp, seq)
    Timestamp newest = std::numeric_limits<Timestamp>::min();
    std::uint64_t seq = 0;
    bool exhausted = false;
  };

  std::vector<Stream> streams;
  Seconds bound;

  // Returns the stream's next releasable event, reading ahead as needed.
  const Pending* head(Stream& s) {
    while (true) {
      if (!s.heap.empty() &&
          (s.exhausted || s.heap.front().event.timestamp <= s.newest - bound)) {
        return &s.heap.front();
      }
      if (s.exhausted) return nullptr;
      auto next = s.source();
      if (!next) {
        s.exhausted = true;
        continue;
      }
      if (s.newest != std::numeric_limits<Timestamp>::min() && next->timestamp < s.newest - bound) {
        throw Error(ErrorCode::DisorderExceeded,
                    "event at " + std::to_string(next->timestamp) + " arrived after " +
                        std::to_string(s.newest) + " (bound " + std::to_string(bound) + "s)");
      }
      s.newest = std::max(s.newest, next->timestamp);
      s.heap.push_back(Pending{std::move(*next), s.seq++});
      std::push_heap(s.heap.begin(), s.heap.end(), PendingLater{});
    }
  }
};

StreamMerger::StreamMerger(std::vector<EventSource> sources, Seconds disorder_bound)
    : impl_(std::make_unique<Impl>()) {
  if (disorder_bound < 0) throw Error(ErrorCode::InvalidArgument, "negative disorder bound");
  impl_->bound = disorder_bound;
  for (auto& s : sources) impl_->streams.emplace_back().source = std::move(s);
}

StreamMerger::~StreamMerger() = default;
StreamMerger::StreamMerger(StreamMerger&&) noexcept = default;
StreamMerger& StreamMerger::operator=(StreamMerger&&) noexcept = default;

std::optional<AccessEvent> StreamMerger::next() {
  std::size_t best = impl_->streams.size();
  const Pending* best_head = nullptr;
  for (std::size_t i = 0; i < impl_->streams.size(); ++i) {
    const Pending* h = impl_->head(impl_->streams[i]);
    if (!h) continue;
    if (!best_head || h->event.timestamp < best_head->event.timestamp ||
        (h->event.timestamp == best_head->event.timestamp &&
         h->event.source < best_head->event.source)) {
      best = i;
      best_head = h;
    }
  }
  if (!best_head) return std::nullopt;
  auto& heap = impl_->streams[best].heap;
  std::pop_heap(heap.begin(), heap.end(), PendingLater{});
  AccessEvent out = std::move(heap.back().event);
  heap.pop_back();
  return out;
}

std::vector<AccessEvent> merge_streams(std::vector<std::vector<AccessEvent>> streams,
                                       Seconds disorder_bound) {
  std::vector<EventSource> sources;
  std::size_t total = 0;
  for (auto& s : streams) {
    total += s.size();
    sources.push_back(from_vector(std::move(s)));
  }
  StreamMerger merger(std::move(sources), disorder_bound);
  std::vector<AccessEvent> out;
  out.reserve(total);
  while (auto e = merger.next()) out.push_back(std::move(*e));
  return out;
}

}  // namespace relrec::logkit
