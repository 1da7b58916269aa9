#pragma once

// Brute-force reference implementations. Deliberately naive: dense tables,
// straight loops, no reuse of the library's counting or evaluation code.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "relrec/citegraph.hpp"
#include "relrec/coaccess.hpp"
#include "relrec/logkit.hpp"
#include "relrec/sessionizer.hpp"
#include "relrec/timeutil.hpp"

namespace oracle {

using relrec::PaperId;
using relrec::Seconds;
using relrec::Timestamp;
using relrec::coaccess::PublicationIndex;
using relrec::logkit::AccessEvent;
using relrec::logkit::EventKind;
using relrec::relmat::ScoredPaper;
using relrec::sessionizer::Session;

using Lists = std::map<PaperId, std::vector<ScoredPaper>>;

inline void sort_best_first(std::vector<ScoredPaper>& v) {
  std::sort(v.begin(), v.end(), [](const ScoredPaper& a, const ScoredPaper& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
}

inline int month_number(Timestamp t) {
  const auto c = relrec::to_civil(t);
  return c.year * 12 + static_cast<int>(c.month) - 1;
}

// Listing-induced co-access test written out from its two conditions.
inline bool rush_pair(Timestamp session, Timestamp ta, Timestamp tb, Seconds lag) {
  const Timestamp r = session - lag;
  const auto one_way = [&](Timestamp ti, Timestamp tj) {
    const bool monthly = month_number(r) == month_number(ti) && month_number(ti) == month_number(tj);
    const bool weekly = r - tj <= 7 * relrec::kDay && std::llabs(ti - tj) <= 7 * relrec::kDay;
    return monthly || weekly;
  };
  return one_way(ta, tb) || one_way(tb, ta);
}

struct CoAccessOptions {
  EventKind kind = EventKind::FullTextDownload;
  bool rush_filter = true;
  Seconds lag = 2 * relrec::kDay;
  std::size_t top_n = 300;
};

// Dense paper x paper count table over every session.
inline Lists coaccess(const std::vector<Session>& sessions, const PublicationIndex& pubs,
                      const CoAccessOptions& o) {
  const auto n = static_cast<std::size_t>(pubs.size());
  std::vector<std::vector<double>> count(n, std::vector<double>(n, 0.0));
  for (const auto& s : sessions) {
    std::vector<bool> seen(n, false);
    for (const auto& e : s.events) {
      if (e.kind != o.kind || !e.paper_id) continue;
      if (auto idx = pubs.catalog().index_of(*e.paper_id)) seen[static_cast<std::size_t>(*idx)] = true;
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (!seen[a]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a || !seen[b]) continue;
        const auto ta = pubs.at(static_cast<long>(a)).published;
        const auto tb = pubs.at(static_cast<long>(b)).published;
        if (o.rush_filter && rush_pair(s.start, ta, tb, o.lag)) continue;
        count[a][b] += 1;
      }
    }
  }
  Lists out;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<ScoredPaper> v;
    for (std::size_t b = 0; b < n; ++b) {
      if (count[a][b] > 0) v.push_back({pubs.at(static_cast<long>(b)).id, count[a][b]});
    }
    sort_best_first(v);
    if (v.size() > o.top_n) v.resize(o.top_n);
    if (!v.empty()) out[pubs.at(static_cast<long>(a)).id] = std::move(v);
  }
  return out;
}

inline std::vector<Session> before(const std::vector<Session>& sessions, Timestamp t) {
  std::vector<Session> out;
  for (const auto& s : sessions) {
    Session c{s.client_key, {}, s.start, s.end};
    for (const auto& e : s.events) {
      if (e.timestamp < t) c.events.push_back(e);
    }
    if (!c.events.empty() && s.start < t) out.push_back(std::move(c));
  }
  return out;
}

// Co-citation (by_citer) or co-reference counts on edges whose citing paper
// was published before t.
inline Lists citation_pairs(const std::vector<std::pair<PaperId, PaperId>>& edges,
                            const PublicationIndex& pubs, Timestamp t, bool co_citation,
                            std::size_t top_n = 300) {
  std::map<PaperId, std::set<PaperId>> groups;  // citer -> refs, or cited -> citers
  for (const auto& [citing, cited] : edges) {
    if (citing == cited || !pubs.find(citing) || !pubs.find(cited)) continue;
    if (pubs.find(citing)->published >= t) continue;
    if (co_citation) {
      groups[citing].insert(cited);
    } else {
      groups[cited].insert(citing);
    }
  }
  std::map<PaperId, std::map<PaperId, double>> count;
  for (const auto& [_, members] : groups) {
    for (const auto& a : members) {
      for (const auto& b : members) {
        if (a != b) count[a][b] += 1;
      }
    }
  }
  Lists out;
  for (const auto& [a, row] : count) {
    std::vector<ScoredPaper> v;
    for (const auto& [b, c] : row) v.push_back({b, c});
    sort_best_first(v);
    if (v.size() > top_n) v.resize(top_n);
    out[a] = std::move(v);
  }
  return out;
}

// Events grouped by client in arrival order, then cut at gaps above the
// timeout. Sessions come back ordered by (client, start).
inline std::vector<Session> group_then_split(const std::vector<AccessEvent>& events, Seconds timeout) {
  std::map<std::string, std::vector<AccessEvent>> by_client;
  for (const auto& e : events) by_client[e.client_key].push_back(e);
  std::vector<Session> out;
  for (const auto& [key, evs] : by_client) {
    Session cur{key, {}, 0, 0};
    for (const auto& e : evs) {
      if (!cur.events.empty() && e.timestamp - cur.events.back().timestamp > timeout) {
        cur.start = cur.events.front().timestamp;
        cur.end = cur.events.back().timestamp;
        out.push_back(std::move(cur));
        cur = Session{key, {}, 0, 0};
      }
      cur.events.push_back(e);
    }
    cur.start = cur.events.front().timestamp;
    cur.end = cur.events.back().timestamp;
    out.push_back(std::move(cur));
  }
  return out;
}

// Dense power iteration with uniform redistribution of dangling mass.
inline std::vector<Eigen::VectorXd> pagerank_trace(const Eigen::MatrixXd& c, double d, int iterations) {
  const auto n = c.rows();
  Eigen::VectorXd pr = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<Eigen::VectorXd> trace;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    double dangling = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double out = c.row(j).sum();
      if (out == 0) {
        dangling += pr(j);
        continue;
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c(j, i) != 0) next(i) += pr(j) / out;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      next(i) = (1 - d) / static_cast<double>(n) + d * (next(i) + dangling / static_cast<double>(n));
    }
    pr = next;
    trace.push_back(pr);
  }
  return trace;
}

inline double average_precision(const std::vector<PaperId>& ranking, const std::set<PaperId>& relevant) {
  double hits = 0, total = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (relevant.count(ranking[i])) {
      hits += 1;
      total += hits / static_cast<double>(i + 1);
    }
  }
  return total / static_cast<double>(relevant.size());
}

// Measures as naive snapshots: co-citation, co-reference or co-download.
enum class Measure { CoCitation, CoReference, CoDownload };

struct World {
  const PublicationIndex& pubs;
  const std::vector<std::pair<PaperId, PaperId>>& edges;
  const std::vector<Session>& sessions;
};

inline Lists snapshot(const World& w, Measure m, Timestamp t) {
  if (m == Measure::CoDownload) return coaccess(before(w.sessions, t), w.pubs, {});
  return citation_pairs(w.edges, w.pubs, t, m == Measure::CoCitation);
}

inline std::set<PaperId> vertices(const World& w) {
  std::set<PaperId> v;
  for (const auto& [a, b] : w.edges) {
    if (a == b || !w.pubs.find(a) || !w.pubs.find(b)) continue;
    v.insert(a);
    v.insert(b);
  }
  return v;
}

inline std::map<PaperId, std::set<PaperId>> references(const World& w) {
  std::map<PaperId, std::set<PaperId>> refs;
  for (const auto& [a, b] : w.edges) {
    if (a != b && w.pubs.find(a) && w.pubs.find(b)) refs[a].insert(b);
  }
  return refs;
}

struct Row {
  long x;
  double value;
  std::size_t support;
};

inline std::vector<Row> means(const std::map<long, std::vector<double>>& cells) {
  std::vector<Row> rows;
  for (const auto& [x, vals] : cells) {
    double s = 0;
    for (const auto v : vals) s += v;
    rows.push_back({x, s / static_cast<double>(vals.size()), vals.size()});
  }
  return rows;
}

inline std::vector<Row> setting1(const World& w, Measure m, Timestamp begin, Timestamp end,
                                 const std::vector<std::size_t>& ranks) {
  const auto lists = snapshot(w, m, begin);
  const auto v = vertices(w);
  const auto refs = references(w);
  const std::size_t depth = *std::max_element(ranks.begin(), ranks.end());
  std::map<long, std::vector<double>> cells;
  for (const auto& [paper, all] : refs) {
    const auto t = w.pubs.find(paper)->published;
    if (t < begin || t > end) continue;
    std::vector<PaperId> r;
    for (const auto& id : all) {
      if (w.pubs.find(id)->published < begin) r.push_back(id);
    }
    if (r.size() < 2) continue;
    std::vector<double> recall(ranks.size(), 0.0);
    for (const auto& held : r) {
      std::map<PaperId, double> score;
      for (const auto& in : r) {
        if (in == held) continue;
        const auto it = lists.find(in);
        if (it == lists.end()) continue;
        for (const auto& e : it->second) score[e.id] += e.score;
      }
      std::vector<ScoredPaper> cand;
      for (const auto& [id, s] : score) {
        const bool input = id != held && std::find(r.begin(), r.end(), id) != r.end();
        if (!input && v.count(id)) cand.push_back({id, s});
      }
      sort_best_first(cand);
      if (cand.size() > depth) cand.resize(depth);
      for (std::size_t k = 0; k < ranks.size(); ++k) {
        for (std::size_t pos = 0; pos < cand.size() && pos < ranks[k]; ++pos) {
          if (cand[pos].id == held) recall[k] += 1;
        }
      }
    }
    for (std::size_t k = 0; k < ranks.size(); ++k) {
      cells[static_cast<long>(ranks[k])].push_back(recall[k] / static_cast<double>(r.size()));
    }
  }
  return means(cells);
}

struct Setting2Rows {
  std::vector<Row> map;
  std::vector<Row> recommendations;
};

inline Setting2Rows setting2(const World& w, Measure m, Timestamp eval_begin, Timestamp eval_end,
                             Timestamp gt_begin, Timestamp gt_end, std::size_t n_max) {
  const auto v = vertices(w);
  const auto refs = references(w);
  std::map<PaperId, std::set<PaperId>> related;
  for (const auto& [citer, r] : refs) {
    const auto tk = w.pubs.find(citer)->published;
    if (tk < gt_begin || tk > gt_end) continue;
    for (const auto& i : r) {
      for (const auto& j : r) {
        const auto tj = w.pubs.find(j)->published;
        if (j != i && tj >= eval_begin && tj <= gt_begin) related[i].insert(j);
      }
    }
  }
  std::vector<Timestamp> grid;
  {
    const auto c = relrec::to_civil(eval_begin);
    int y = c.year, mo = static_cast<int>(c.month);
    for (;;) {
      const auto t = relrec::from_civil(y, static_cast<unsigned>(mo), 1);
      if (t > gt_begin) break;
      grid.push_back(t);
      if (++mo == 13) {
        mo = 1;
        ++y;
      }
    }
  }
  std::map<Timestamp, Lists> snaps;
  for (const auto t : grid) snaps[t] = snapshot(w, m, t);

  std::map<long, std::vector<double>> ap, count;
  for (const auto& p : w.pubs.papers()) {
    if (p.published < eval_begin || p.published > eval_end) continue;
    const auto rel = related.find(p.id);
    if (rel == related.end()) continue;
    for (const auto t : grid) {
      if (t < p.published) continue;
      std::set<PaperId> target;
      for (const auto& d : rel->second) {
        if (w.pubs.find(d)->published <= t) target.insert(d);
      }
      if (target.empty()) continue;
      std::vector<PaperId> ranking;
      const auto& lists = snaps[t];
      if (const auto it = lists.find(p.id); it != lists.end()) {
        for (const auto& e : it->second) {
          if (ranking.size() == n_max) break;
          if (w.pubs.find(e.id)->published < eval_begin || !v.count(e.id)) continue;
          ranking.push_back(e.id);
        }
      }
      const long dt = month_number(t) - month_number(p.published);
      ap[dt].push_back(average_precision(ranking, target));
      count[dt].push_back(static_cast<double>(ranking.size()));
    }
  }
  return {means(ap), means(count)};
}

inline std::vector<Row> setting3(const World& w, Measure m, Timestamp t0, Timestamp gt_end, int max_age,
                                 std::size_t n_max) {
  const auto v = vertices(w);
  const auto refs = references(w);
  const auto lists = snapshot(w, m, t0);
  const auto c0 = relrec::to_civil(t0);
  const auto back = [&](int x) {
    int mo = static_cast<int>(c0.month) - 1 - x;
    int y = c0.year;
    while (mo < 0) {
      mo += 12;
      --y;
    }
    return relrec::from_civil(y, static_cast<unsigned>(mo + 1), c0.day, c0.hour, c0.minute, c0.second);
  };
  std::map<long, std::vector<double>> cells;
  for (const auto& p : w.pubs.papers()) {
    if (p.updated < t0 || p.updated > gt_end) continue;
    const auto it = refs.find(p.id);
    if (it == refs.end()) continue;
    std::vector<PaperId> r;
    for (const auto& id : it->second) {
      if (w.pubs.find(id)->published <= t0) r.push_back(id);
    }
    for (int x = 0; x <= max_age; ++x) {
      const auto hi = back(x), lo = back(x + 1);
      std::vector<double> aps;
      for (const auto& i : r) {
        const auto ti = w.pubs.find(i)->published;
        if (ti <= lo || ti > hi) continue;
        std::set<PaperId> target;
        for (const auto& j : r) {
          if (j != i && w.pubs.find(j)->published >= hi) target.insert(j);
        }
        if (target.empty()) continue;
        std::vector<PaperId> ranking;
        if (const auto l = lists.find(i); l != lists.end()) {
          for (const auto& e : l->second) {
            if (ranking.size() == n_max) break;
            if (v.count(e.id)) ranking.push_back(e.id);
          }
        }
        aps.push_back(average_precision(ranking, target));
      }
      if (aps.empty()) continue;
      double s = 0;
      for (const auto a : aps) s += a;
      cells[-x].push_back(s / static_cast<double>(aps.size()));
    }
  }
  return means(cells);
}

}  // namespace oracle
