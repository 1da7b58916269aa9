#include "relrec/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "relrec/error.hpp"

namespace relrec::synthgen {

namespace fs = std::filesystem;
using logkit::AccessEvent;
using logkit::EventKind;

void SynthConfig::validate() const {
  const auto fraction = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be in [0,1]");
  };
  fraction(violation_fraction, "violation_fraction");
  fraction(update_fraction, "update_fraction");
  fraction(affinity, "affinity");
  fraction(cluster_pull, "cluster_pull");
  fraction(robot_fraction, "robot_fraction");
  fraction(rush_fraction, "rush_fraction");
  fraction(legacy_fraction, "legacy_fraction");
  if (robot_fraction + rush_fraction > 1.0) throw Error(ErrorCode::InvalidConfig, "robot + rush fractions exceed 1");
  if (papers < 2) throw Error(ErrorCode::InvalidConfig, "need at least two papers");
  if (topics < 1 || topics > papers) throw Error(ErrorCode::InvalidConfig, "topics must be in [1, papers]");
  if (cluster_size < 2) throw Error(ErrorCode::InvalidConfig, "cluster_size must be >= 2");
  if (months < 3) throw Error(ErrorCode::InvalidConfig, "timeline must span at least 3 months");
  if (refs_min > refs_max) throw Error(ErrorCode::InvalidConfig, "refs_min > refs_max");
  if (t_lag < 0) throw Error(ErrorCode::InvalidConfig, "negative t_lag");
}

std::string_view to_string(SessionType type) {
  switch (type) {
    case SessionType::Regular: return "regular";
    case SessionType::Robot: return "robot";
    case SessionType::Rush: return "rush";
  }
  return "regular";
}

namespace {

// Engine-only randomness so output does not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = engine_(); while (v >= limit);
    return v % n;
  }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  // Index drawn proportionally to non-negative weights; -1 if all are zero.
  long weighted(const std::vector<double>& w) {
    double total = 0;
    for (double x : w) total += x;
    if (total <= 0) return -1;
    double r = unit() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0) continue;
      if (r < w[i]) return static_cast<long>(i);
      r -= w[i];
    }
    for (std::size_t i = w.size(); i-- > 0;) {
      if (w[i] > 0) return static_cast<long>(i);
    }
    return -1;
  }

 private:
  std::mt19937_64 engine_;
};

const std::array<const char*, 8> kArchives = {"hep-th", "hep-ph", "astro-ph", "cond-mat",
                                              "gr-qc",  "quant-ph", "nucl-th", "math-ph"};

const std::vector<std::string> kHumanAgents = {
    "Mozilla/5.0 (X11; Linux x86_64; rv:45.0) Gecko/20100101 Firefox/45.0",
    "Mozilla/5.0 (Windows NT 6.1; WOW64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/49.0 Safari/537.36",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_11_4) AppleWebKit/601.5.17 (KHTML, like Gecko) Version/9.1 Safari/601.5.17",
    "Mozilla/4.0 (compatible; MSIE 6.0; Windows NT 5.1; SV1)",
    "Opera/9.80 (X11; Linux i686; U; en) Presto/2.2.15 Version/10.00",
    "Mozilla/5.0 (X11; U; Linux i686; en-US; rv:1.8.1.4) Gecko/20070515 Firefox/2.0.0.4",
};

const std::vector<std::string> kRobotAgents = {
    "Googlebot/2.1 (+http://www.google.com/bot.html)",
    "msnbot/1.0 (+http://search.msn.com/msnbot.htm)",
    "Mozilla/5.0 (compatible; Yahoo! Slurp; http://help.yahoo.com/help/us/ysearch/slurp)",
    "Wget/1.10.2",
    "ia_archiver (+http://www.alexa.com/site/help/webmasters; crawler@alexa.com)",
    "libwww-perl/5.805",
};

const std::vector<std::string> kFunctionWords = {"the", "of", "and", "in", "we", "is", "to", "for", "with", "that"};

std::string make_word(Rng& rng) {
  static const char* const onsets[] = {"b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                       "br", "cr", "gr", "pl", "st", "tr", "qu", "sh", "th"};
  static const char* const vowels[] = {"a", "e", "i", "o", "u", "ia", "eo", "ou"};
  std::string w;
  const auto syllables = rng.between(2, 4);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += onsets[rng.below(std::size(onsets))];
    w += vowels[rng.below(std::size(vowels))];
  }
  if (rng.chance(0.5)) w += "n";
  return w;
}

std::vector<std::string> make_vocabulary(Rng& rng, std::size_t n, std::set<std::string>& used,
                                         const std::unordered_set<std::string>& stop) {
  std::vector<std::string> out;
  while (out.size() < n) {
    auto w = make_word(rng);
    if (stop.count(w) || !used.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string clf_time(Timestamp utc, Seconds offset) {
  static const char* const months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                       "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const auto c = to_civil(utc + offset);
  const Seconds a = offset < 0 ? -offset : offset;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d %c%02lld%02lld", c.day, months[c.month - 1], c.year,
                c.hour, c.minute, c.second, offset < 0 ? '-' : '+', static_cast<long long>(a / kHour),
                static_cast<long long>((a % kHour) / kMinute));
  return buf;
}

std::string local_time(Timestamp utc, Seconds offset) {
  const auto c = to_civil(utc + offset);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", c.year, c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

const TimeZoneRule& combined_zone() {
  static const TimeZoneRule z = *TimeZoneRule::named("America/New_York");
  return z;
}

const TimeZoneRule& legacy_zone() {
  static const TimeZoneRule z = *TimeZoneRule::named("America/Denver");
  return z;
}

struct Request {
  std::string path;
  std::optional<EventKind> kind;  // nullopt: static noise, not an event
  std::optional<PaperId> paper;
};

}  // namespace

logkit::LogFormatSpec combined_format() {
  auto f = *logkit::format_by_name("combined");
  f.timezone = combined_zone();
  f.source = "combined";
  return f;
}

logkit::LogFormatSpec legacy_format() {
  auto f = *logkit::format_by_name("legacy-tsv");
  f.timezone = legacy_zone();
  f.source = "legacy";
  return f;
}

coaccess::PublicationIndex SynthCorpus::publication_index() const {
  std::vector<coaccess::PaperPublication> pubs;
  pubs.reserve(papers.size());
  for (const auto& p : papers) pubs.push_back(p.publication);
  return coaccess::PublicationIndex(std::move(pubs));
}

std::vector<AccessEvent> SynthCorpus::events() const {
  std::vector<AccessEvent> all;
  for (const auto& s : sessions) all.insert(all.end(), s.events.begin(), s.events.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const AccessEvent& a, const AccessEvent& b) { return a.timestamp < b.timestamp; });
  return all;
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SynthCorpus out;
  out.config = cfg;
  const Timestamp end = add_months(month_start(cfg.start), cfg.months);
  const Seconds span = end - cfg.start;

  // --- papers -------------------------------------------------------------
  std::vector<Timestamp> times(cfg.papers);
  for (auto& t : times) t = cfg.start + static_cast<Seconds>(rng.unit() * static_cast<double>(span - kDay));
  std::sort(times.begin(), times.end());

  std::map<std::string, int> serial;  // archive + yymm -> running number
  std::vector<std::size_t> cluster_fill(cfg.topics, cfg.cluster_size);
  std::vector<std::size_t> current_cluster(cfg.topics, 0);
  std::size_t clusters = 0;
  out.papers.resize(cfg.papers);
  for (std::size_t i = 0; i < cfg.papers; ++i) {
    auto& p = out.papers[i];
    p.topic = i < cfg.topics ? i : rng.below(cfg.topics);
    if (cluster_fill[p.topic] == cfg.cluster_size) {
      current_cluster[p.topic] = clusters++;
      cluster_fill[p.topic] = 0;
    }
    p.cluster = current_cluster[p.topic];
    ++cluster_fill[p.topic];

    const std::string archive = kArchives[p.topic % kArchives.size()];
    const auto c = to_civil(times[i]);
    const auto yymm = two_digits(c.year % 100) + two_digits(static_cast<int>(c.month));
    const int n = ++serial[archive + yymm];
    if (n > 999) throw Error(ErrorCode::InvalidConfig, "more than 999 papers in one archive and month");
    char num[16];
    std::snprintf(num, sizeof num, "%03d", n);
    p.publication.id = archive + "/" + yymm + num;
    p.publication.published = times[i];
    p.publication.updated = times[i];
    if (rng.chance(cfg.update_fraction)) {
      p.publication.updated = times[i] + static_cast<Seconds>(rng.between(1, 180)) * kDay;
    }
  }

  std::vector<std::vector<std::size_t>> by_cluster(clusters);
  for (std::size_t i = 0; i < cfg.papers; ++i) by_cluster[out.papers[i].cluster].push_back(i);
  for (const auto& members : by_cluster) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        auto x = out.papers[members[a]].publication.id;
        auto y = out.papers[members[b]].publication.id;
        if (y < x) std::swap(x, y);
        out.planted_pairs.emplace_back(x, y);
      }
    }
  }
  std::sort(out.planted_pairs.begin(), out.planted_pairs.end());

  // --- citations ----------------------------------------------------------
  std::vector<std::size_t> in_degree(cfg.papers, 0);
  std::vector<std::vector<std::size_t>> refs(cfg.papers);
  for (std::size_t k = 1; k < cfg.papers; ++k) {
    const auto& pk = out.papers[k];
    std::vector<double> w(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& pj = out.papers[j];
      if (pj.publication.published >= pk.publication.published) continue;
      const double relation = pj.cluster == pk.cluster ? 20.0 : pj.topic == pk.topic ? 4.0 : 0.3;
      const double age_days =
          static_cast<double>(pk.publication.published - pj.publication.published) / static_cast<double>(kDay);
      w[j] = relation * std::exp(-age_days / 365.0) * (1.0 + static_cast<double>(in_degree[j]));
    }
    const auto want = std::min<std::uint64_t>(rng.between(cfg.refs_min, cfg.refs_max), k);
    for (std::uint64_t r = 0; r < want; ++r) {
      const auto j = rng.weighted(w);
      if (j < 0) break;
      refs[k].push_back(static_cast<std::size_t>(j));
      w[static_cast<std::size_t>(j)] = 0;
    }
    for (const auto j : refs[k]) ++in_degree[j];
  }
  // A few citing papers get a reference to a later paper, as if added in a
  // revision; the revision date moves past the cited paper.
  for (std::size_t k = 0; k < cfg.papers; ++k) {
    if (refs[k].empty() || !rng.chance(cfg.violation_fraction)) continue;
    auto& pk = out.papers[k].publication;
    std::vector<std::size_t> later;
    for (std::size_t j = k + 1; j < cfg.papers && out.papers[j].publication.published <= pk.published + 90 * kDay; ++j) {
      if (out.papers[j].publication.published > pk.published) later.push_back(j);
    }
    if (later.empty()) continue;
    const auto j = rng.pick(later);
    refs[k].push_back(j);
    pk.updated = std::max(pk.updated, out.papers[j].publication.published + static_cast<Seconds>(rng.between(1, 30)) * kDay);
  }
  for (std::size_t k = 0; k < cfg.papers; ++k) {
    for (const auto j : refs[k]) out.citations.emplace_back(out.papers[k].publication.id, out.papers[j].publication.id);
  }

  // --- texts --------------------------------------------------------------
  const auto stop = textsim::default_stop_list();
  std::set<std::string> used;
  const auto common = make_vocabulary(rng, 200, used, stop);
  std::vector<std::vector<std::string>> topic_vocab(cfg.topics);
  for (auto& v : topic_vocab) v = make_vocabulary(rng, 150, used, stop);
  std::vector<std::vector<std::string>> cluster_vocab(clusters);
  for (auto& v : cluster_vocab) v = make_vocabulary(rng, 8, used, stop);

  const auto draw_word = [&](const SynthPaper& p, double cluster_share, double topic_share) -> const std::string& {
    const double r = rng.unit();
    if (r < cluster_share) return rng.pick(cluster_vocab[p.cluster]);
    if (r < cluster_share + topic_share) return rng.pick(topic_vocab[p.topic]);
    return rng.pick(common);
  };
  for (std::size_t i = 0; i < cfg.papers; ++i) {
    const auto& p = out.papers[i];
    textsim::Document d;
    d.id = p.publication.id;
    for (int w = 0; w < 6; ++w) d.title += (w ? " " : "") + draw_word(p, 0.35, 0.5);
    for (int w = 0; w < 80; ++w) {
      if (w) d.abstract += ' ';
      if (rng.chance(0.15)) d.abstract += rng.pick(kFunctionWords) + " ";
      d.abstract += draw_word(p, 0.15, 0.6);
    }
    d.abstract += '.';

    std::string full = "1 Introduction\n";
    std::size_t column = 0;
    for (int w = 0; w < 400; ++w) {
      const auto& word = draw_word(p, 0.1, 0.55);
      if (column >= 12) {
        if (word.size() >= 6 && rng.chance(0.3)) {
          const auto cut = word.size() / 2;
          full += " " + word.substr(0, cut) + "-\n" + word.substr(cut);
        } else {
          full += "\n" + word;
        }
        column = 1;
        continue;
      }
      full += (column ? " " : "") + word;
      ++column;
    }
    full += ".\n\n";
    const double heading = rng.unit();
    if (heading < 0.85) {
      full += "References\n";
    } else if (heading < 0.95) {
      full += "ACKNOWLEDGMENTS\nThis work was partly supported by a grant.\n\n";
    } else {
      full += "\n";
    }
    std::size_t n = 0;
    for (const auto j : refs[i]) {
      full += "[" + std::to_string(++n) + "] A. Author, " + draw_word(out.papers[j], 0.3, 0.5) + " " +
              draw_word(out.papers[j], 0.3, 0.5) + ", " + out.papers[j].publication.id + "\n";
    }
    d.fulltext = std::move(full);
    out.documents.push_back(std::move(d));
  }

  // --- sessions -----------------------------------------------------------
  std::vector<std::vector<std::size_t>> by_topic(cfg.topics);
  for (std::size_t i = 0; i < cfg.papers; ++i) by_topic[out.papers[i].topic].push_back(i);
  const auto published_by = [&](Timestamp t) {
    // papers sorted by time: count of papers with publication <= t
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  };

  const Timestamp first_session = add_months(month_start(cfg.start), 2);
  for (std::size_t s = 0; s < cfg.sessions; ++s) {
    SynthSession session;
    session.address = "10." + std::to_string((s + 1) >> 16 & 255) + "." + std::to_string((s + 1) >> 8 & 255) + "." +
                      std::to_string((s + 1) & 255);
    const double kind = rng.unit();
    session.type = kind < cfg.robot_fraction                      ? SessionType::Robot
                   : kind < cfg.robot_fraction + cfg.rush_fraction ? SessionType::Rush
                                                                   : SessionType::Regular;
    session.user_agent = session.type == SessionType::Robot ? rng.pick(kRobotAgents) : rng.pick(kHumanAgents);

    const auto draw_time = [&] {
      return first_session + static_cast<Seconds>(rng.unit() * static_cast<double>(end - first_session - kDay));
    };
    Timestamp t = draw_time();
    std::vector<std::size_t> papers;

    if (session.type == SessionType::Rush) {
      // Fresh papers read together right after the announcement.
      bool ok = false;
      for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
        const auto anchor = rng.below(cfg.papers);
        const Timestamp pub = times[anchor];
        const Timestamp when = pub + cfg.t_lag + static_cast<Seconds>(rng.below(3 * kDay));
        if (when >= end - kDay) continue;
        std::vector<std::size_t> fresh;
        for (std::size_t i = 0; i < cfg.papers; ++i) {
          if (times[i] >= when - cfg.t_lag - 7 * kDay && times[i] <= when - cfg.t_lag) fresh.push_back(i);
        }
        if (fresh.size() < 2) continue;
        const auto n = std::min<std::size_t>(fresh.size(), rng.between(2, 6));
        for (std::size_t k = 0; k < n; ++k) {
          const auto pick = rng.below(fresh.size() - k) + k;
          std::swap(fresh[k], fresh[pick]);
          papers.push_back(fresh[k]);
        }
        t = when;
        ok = true;
      }
      if (!ok) session.type = SessionType::Regular;
    }

    // Too early for enough readable papers: try another time.
    const Seconds min_age = session.type == SessionType::Regular ? 40 * kDay : 0;
    const std::size_t min_papers = session.type == SessionType::Regular ? 2 : 1;
    for (int attempt = 0; attempt < 100 && session.type != SessionType::Rush && published_by(t - min_age) < min_papers;
         ++attempt) {
      t = draw_time();
    }

    if (session.type == SessionType::Robot) {
      const auto available = published_by(t);
      if (available == 0) continue;
      const auto n = rng.between(10, 40);
      for (std::uint64_t k = 0; k < n; ++k) papers.push_back(rng.below(available));
    } else if (session.type == SessionType::Regular) {
      // Only papers older than 40 days, so listing-driven filters never apply.
      const auto available = published_by(t - 40 * kDay);
      if (available < 2) continue;
      const auto anchor = rng.below(available);
      session.topic = out.papers[anchor].topic;
      papers.push_back(anchor);
      std::vector<std::size_t> mates, topical, foreign;
      for (const auto j : by_cluster[out.papers[anchor].cluster]) {
        if (j < available && j != anchor) mates.push_back(j);
      }
      for (const auto j : by_topic[session.topic]) {
        if (j < available) topical.push_back(j);
      }
      for (std::size_t j = 0; j < available; ++j) {
        if (out.papers[j].topic != session.topic) foreign.push_back(j);
      }
      const auto n = rng.between(2, 8);
      for (std::uint64_t k = 1; k < n; ++k) {
        for (int attempt = 0; attempt < 8; ++attempt) {
          std::size_t j;
          if (rng.chance(cfg.affinity) || foreign.empty()) {
            j = (!mates.empty() && rng.chance(cfg.cluster_pull)) ? rng.pick(mates) : rng.pick(topical);
          } else {
            j = rng.pick(foreign);
          }
          if (std::find(papers.begin(), papers.end(), j) == papers.end()) {
            papers.push_back(j);
            break;
          }
        }
      }
    }

    const auto key = logkit::client_key(session.address, session.user_agent);
    const bool legacy = rng.chance(cfg.legacy_fraction);
    const auto add = [&](Timestamp when, EventKind kind, std::optional<PaperId> id) {
      AccessEvent e;
      e.timestamp = when;
      e.client_key = key;
      e.kind = kind;
      e.paper_id = std::move(id);
      e.source = legacy ? "legacy" : "combined";
      session.events.push_back(std::move(e));
    };
    const bool robot = session.type == SessionType::Robot;
    if (!robot && rng.chance(0.3)) {
      add(t, EventKind::Listing, std::nullopt);
      t += static_cast<Seconds>(rng.between(10, 120));
    }
    for (const auto i : papers) {
      const auto& id = out.papers[i].publication.id;
      if (robot) {
        add(t, rng.chance(0.5) ? EventKind::FullTextDownload : EventKind::AbstractView, id);
        t += static_cast<Seconds>(rng.between(5, 30));
        continue;
      }
      add(t, EventKind::AbstractView, id);
      if (rng.chance(0.7)) {
        t += static_cast<Seconds>(rng.between(20, 120));
        add(t, EventKind::FullTextDownload, id);
      }
      t += static_cast<Seconds>(rng.between(60, 600));
    }
    out.sessions.push_back(std::move(session));
  }

  // --- raw logs -----------------------------------------------------------
  for (auto& session : out.sessions) {
    for (auto& e : session.events) {
      std::string path;
      if (e.kind == EventKind::Listing) {
        path = "/list/" + std::string(kArchives[session.topic % kArchives.size()]) + "/new";
      } else if (e.kind == EventKind::AbstractView) {
        path = "/abs/" + *e.paper_id;
      } else {
        path = "/pdf/" + *e.paper_id + "v" + std::to_string(1 + rng.below(3));
      }
      const std::string request = "GET " + path + " HTTP/1.0";
      bool legacy = e.source == "legacy";
      if (legacy) {
        // Local times inside a daylight-saving fold are ambiguous; such
        // events go to the log that records offsets.
        const auto offset = legacy_zone().offset_at(e.timestamp);
        const auto c = to_civil(e.timestamp + offset);
        if (legacy_zone().to_utc(c) != e.timestamp) {
          legacy = false;
          e.source = "combined";
        }
      }
      if (legacy) {
        out.legacy_log.push_back({e.timestamp, local_time(e.timestamp, legacy_zone().offset_at(e.timestamp)) + "\t" +
                                                   session.address + "\t" + request + "\t200\t" + session.user_agent});
      } else {
        out.combined_log.push_back({e.timestamp, session.address + " - - [" +
                                                     clf_time(e.timestamp, combined_zone().offset_at(e.timestamp)) +
                                                     "] \"" + request + "\" 200 " +
                                                     std::to_string(rng.between(2000, 400000)) + " \"-\" \"" +
                                                     session.user_agent + "\""});
      }
      if (!legacy && rng.chance(0.05)) {
        // Page assets fetched with the request: parsed and skipped as non-paper.
        out.combined_log.push_back({e.timestamp, session.address + " - - [" +
                                                     clf_time(e.timestamp, combined_zone().offset_at(e.timestamp)) +
                                                     "] \"GET /css/arXiv.css HTTP/1.0\" 200 1834 \"-\" \"" +
                                                     session.user_agent + "\""});
        ++out.noise_lines;
      }
    }
  }
  const auto by_time = [](const RawLine& a, const RawLine& b) { return a.time < b.time; };
  std::stable_sort(out.combined_log.begin(), out.combined_log.end(), by_time);
  std::stable_sort(out.legacy_log.begin(), out.legacy_log.end(), by_time);
  // The legacy server flushed its buffers slightly out of order.
  for (std::size_t i = 0; i + 1 < out.legacy_log.size(); ++i) {
    if (out.legacy_log[i + 1].time - out.legacy_log[i].time <= 10 * kMinute && rng.chance(0.02)) {
      std::swap(out.legacy_log[i], out.legacy_log[i + 1]);
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double need_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, key + ": expected a number, got '" + v + "'");
}

std::uint64_t need_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto d = std::stoull(v, &used);
    if (used == v.size() && v.front() != '-') return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, key + ": expected a non-negative integer, got '" + v + "'");
}

}  // namespace

SynthConfig parse_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  SynthConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "seed") cfg.seed = need_uint(key, value);
    else if (key == "papers") cfg.papers = need_uint(key, value);
    else if (key == "topics") cfg.topics = need_uint(key, value);
    else if (key == "cluster_size") cfg.cluster_size = need_uint(key, value);
    else if (key == "months") cfg.months = static_cast<int>(need_uint(key, value));
    else if (key == "refs_min") cfg.refs_min = need_uint(key, value);
    else if (key == "refs_max") cfg.refs_max = need_uint(key, value);
    else if (key == "sessions") cfg.sessions = need_uint(key, value);
    else if (key == "violation_fraction") cfg.violation_fraction = need_double(key, value);
    else if (key == "update_fraction") cfg.update_fraction = need_double(key, value);
    else if (key == "affinity") cfg.affinity = need_double(key, value);
    else if (key == "cluster_pull") cfg.cluster_pull = need_double(key, value);
    else if (key == "robot_fraction") cfg.robot_fraction = need_double(key, value);
    else if (key == "rush_fraction") cfg.rush_fraction = need_double(key, value);
    else if (key == "legacy_fraction") cfg.legacy_fraction = need_double(key, value);
    else if (key == "start") {
      const auto t = parse_time(value);
      if (!t) throw Error(ErrorCode::InvalidConfig, "start: bad date '" + value + "'");
      cfg.start = *t;
    } else if (key == "t_lag") {
      const auto d = parse_duration(value);
      if (!d) throw Error(ErrorCode::InvalidConfig, "t_lag: bad duration '" + value + "'");
      cfg.t_lag = *d;
    } else {
      throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(root / name);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (root / name).string());
    return out;
  };

  corpus.publication_index().write_tsv((root / "papers.tsv").string());
  {
    auto out = open("topics.tsv");
    for (const auto& p : corpus.papers) out << p.publication.id << '\t' << p.topic << '\t' << p.cluster << '\n';
  }
  {
    auto out = open("citations.tsv");
    for (const auto& [a, b] : corpus.citations) out << a << '\t' << b << '\n';
  }
  {
    auto out = open("planted_pairs.tsv");
    for (const auto& [a, b] : corpus.planted_pairs) out << a << '\t' << b << '\n';
  }
  textsim::write_corpus((root / "corpus.ndjson").string(), corpus.documents);
  {
    auto out = open("access_combined.log");
    for (const auto& l : corpus.combined_log) out << l.text << '\n';
  }
  {
    auto out = open("access_legacy.tsv");
    for (const auto& l : corpus.legacy_log) out << l.text << '\n';
  }
  {
    const auto& c = corpus.config;
    auto out = open("synth.conf");
    out << "seed = " << c.seed << "\npapers = " << c.papers << "\ntopics = " << c.topics
        << "\ncluster_size = " << c.cluster_size << "\nstart = " << format_date(c.start) << "\nmonths = " << c.months
        << "\nrefs_min = " << c.refs_min << "\nrefs_max = " << c.refs_max
        << "\nviolation_fraction = " << c.violation_fraction << "\nupdate_fraction = " << c.update_fraction
        << "\nsessions = " << c.sessions << "\naffinity = " << c.affinity << "\ncluster_pull = " << c.cluster_pull
        << "\nrobot_fraction = " << c.robot_fraction << "\nrush_fraction = " << c.rush_fraction
        << "\nlegacy_fraction = " << c.legacy_fraction << "\nt_lag = " << c.t_lag << "\n";
  }
}

}  // namespace relrec::synthgen
