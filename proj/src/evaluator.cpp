#include "relrec/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "relrec/error.hpp"

namespace relrec::evaluator {

using recommender::RecommendOptions;
using relmat::ScoredPaper;

double average_precision(const std::vector<PaperId>& ranking,
                         const std::unordered_set<PaperId>& relevant) {
  if (relevant.empty()) throw Error(ErrorCode::EmptyRelevantSet, "average precision needs relevant items");
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!relevant.count(ranking[i])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

double recall_at(const std::vector<PaperId>& ranking, const PaperId& target, std::size_t n) {
  const auto k = std::min(n, ranking.size());
  return std::find(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k), target) !=
                 ranking.begin() + static_cast<std::ptrdiff_t>(k)
             ? 1.0
             : 0.0;
}

// ---------------------------------------------------------------------------
// Measures

namespace {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::CoCitation: return "co-citation";
    case Family::CoReference: return "co-reference";
    case Family::CoDownload: return "co-download";
    case Family::CoView: return "co-view";
    case Family::TfidfMeta: return "tfidf_meta";
    case Family::TfidfFullText: return "tfidf_fulltext";
  }
  return "";
}

bool is_text(Family f) { return f == Family::TfidfMeta || f == Family::TfidfFullText; }

}  // namespace

std::string MeasureSpec::name() const {
  std::string out(family_name(family));
  if (norm != citegraph::Normalization::None) out += ":" + std::string(citegraph::to_string(norm));
  return out;
}

MeasureSpec MeasureSpec::parse(std::string_view text) {
  MeasureSpec spec;
  auto base = text;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    base = text.substr(0, colon);
    const auto norm = citegraph::parse_normalization(text.substr(colon + 1));
    if (!norm) throw Error(ErrorCode::InvalidArgument, "unknown normalization in measure " + std::string(text));
    spec.norm = *norm;
  }
  for (auto f : {Family::CoCitation, Family::CoReference, Family::CoDownload, Family::CoView,
                 Family::TfidfMeta, Family::TfidfFullText}) {
    if (base == family_name(f)) {
      spec.family = f;
      if (is_text(f) && spec.norm != citegraph::Normalization::None) {
        throw Error(ErrorCode::InvalidArgument, "text measures take no normalization");
      }
      return spec;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure " + std::string(text));
}

std::vector<Session> sessions_before(const std::vector<Session>& sessions, Timestamp t) {
  std::vector<Session> out;
  for (const auto& s : sessions) {
    if (s.start >= t) continue;
    if (s.end < t) {
      out.push_back(s);
      continue;
    }
    Session cut = s;
    std::erase_if(cut.events, [t](const logkit::AccessEvent& e) { return e.timestamp >= t; });
    if (cut.events.empty()) continue;
    cut.end = cut.events.back().timestamp;
    out.push_back(std::move(cut));
  }
  return out;
}

std::unordered_set<PaperId> graph_vertices(const CitationGraph& graph) {
  std::unordered_set<PaperId> v;
  for (relmat::Index i = 0; i < graph.size(); ++i) {
    if (graph.connected(i)) v.insert(graph.catalog().id(i));
  }
  return v;
}

MeasureFactory::MeasureFactory(const Corpus& corpus, FactoryOptions options)
    : corpus_(corpus), options_(options),
      known_(std::make_shared<relmat::PaperCatalog>(corpus.papers.catalog())) {}

std::size_t MeasureFactory::built() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::shared_ptr<const NeighborSource> MeasureFactory::snapshot(const MeasureSpec& spec, Timestamp t) {
  // Text measures are time independent; share one snapshot.
  const auto key = std::pair(spec, is_text(spec.family) ? Timestamp{0} : t);
  std::lock_guard lock(mutex_);
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  auto source = build(spec, t);
  cache_.emplace(key, source);
  return source;
}

std::shared_ptr<const NeighborSource> MeasureFactory::build(const MeasureSpec& spec, Timestamp t) {
  using recommender::StoreSource;
  const auto name = spec.name();
  switch (spec.family) {
    case Family::CoCitation:
    case Family::CoReference: {
      const auto cut = corpus_.graph.cut_before(t);
      auto store = spec.family == Family::CoCitation
                       ? citegraph::co_citation_store(cut, options_.top_n, spec.norm)
                       : citegraph::co_reference_store(cut, options_.top_n, spec.norm);
      return std::make_shared<StoreSource>(name, std::make_shared<relmat::NeighborStore>(std::move(store)), known_);
    }
    case Family::CoDownload:
    case Family::CoView: {
      coaccess::CoAccessConfig cfg;
      cfg.kind = spec.family == Family::CoDownload ? coaccess::AccessKind::Download : coaccess::AccessKind::View;
      cfg.t_lag = options_.t_lag;
      cfg.rush_filter = options_.rush_filter;
      cfg.top_n = options_.top_n;
      cfg.normalization = spec.norm == citegraph::Normalization::Row      ? coaccess::Normalization::Row
                          : spec.norm == citegraph::Normalization::Column ? coaccess::Normalization::Column
                                                                          : coaccess::Normalization::None;
      auto store = coaccess::count_coaccesses(sessions_before(corpus_.sessions, t), corpus_.papers, cfg,
                                              options_.memory_budget);
      return std::make_shared<StoreSource>(name, std::make_shared<relmat::NeighborStore>(std::move(store)), known_);
    }
    case Family::TfidfMeta:
    case Family::TfidfFullText: {
      const auto mode = spec.family == Family::TfidfMeta ? textsim::Mode::Meta : textsim::Mode::FullText;
      auto& index = text_[mode];
      if (!index) {
        if (corpus_.documents.empty()) throw Error(ErrorCode::InvalidConfig, name + " needs a document corpus");
        index = std::make_shared<textsim::TextIndex>(textsim::TextIndex::build(corpus_.documents, mode));
      }
      return std::make_shared<recommender::TextSource>(name, index);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure family");
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

// Runs fn(i) for i in [0, count) on a few threads. Each call writes only its
// own slot, so the caller's ordered reduction stays deterministic.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<PaperId> ids_of(const std::vector<ScoredPaper>& entries) {
  std::vector<PaperId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

// Ordered mean accumulator keyed by x.
struct MeanTable {
  std::map<long, std::pair<double, std::size_t>> cells;

  void add(long x, double v) {
    auto& c = cells[x];
    c.first += v;
    ++c.second;
  }

  void emit(const std::string& algorithm, const std::string& metric, std::vector<ResultRow>& rows) const {
    for (const auto& [x, c] : cells) {
      rows.push_back({algorithm, metric, x, c.first / static_cast<double>(c.second), c.second});
    }
  }
};

}  // namespace

void write_results(const std::string& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "algorithm\tmetric\tx\tvalue\tsupport\n";
  char buf[64];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << r.algorithm << '\t' << r.metric << '\t' << r.x << '\t' << buf << '\t' << r.support << '\n';
  }
}

void write_document_values(const std::string& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << "algorithm\tdocument\tx\tvalue\n";
  char buf[64];
  for (const auto& d : result.documents) {
    std::snprintf(buf, sizeof buf, "%.17g", d.value);
    out << d.algorithm << '\t' << d.document << '\t' << d.x << '\t' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Setting 1

EvalResult setting1(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting1Config& cfg) {
  if (cfg.ranks.empty()) throw Error(ErrorCode::InvalidConfig, "no evaluation ranks");
  if (!(cfg.eval_begin < cfg.eval_end)) throw Error(ErrorCode::InvalidConfig, "eval_begin must precede eval_end");
  const auto& g = corpus.graph;
  const auto& pubs = corpus.papers;
  const auto vertices = graph_vertices(g);
  const std::size_t max_rank = *std::max_element(cfg.ranks.begin(), cfg.ranks.end());

  struct TestPaper {
    PaperId id;
    std::vector<PaperId> references;
  };
  std::vector<TestPaper> tests;
  for (relmat::Index k = 0; k < g.size(); ++k) {
    const auto t = pubs.at(k).published;
    if (t < cfg.eval_begin || t > cfg.eval_end) continue;
    TestPaper tp{g.catalog().id(k), {}};
    for (const auto i : g.references(k)) {
      if (pubs.at(i).published < cfg.eval_begin) tp.references.push_back(g.catalog().id(i));
    }
    if (tp.references.size() >= 2) tests.push_back(std::move(tp));
  }
  if (tests.empty()) throw Error(ErrorCode::EmptyTestSet, "no test paper with two or more past references");

  EvalResult result;
  for (const auto& spec : measures) {
    const auto source = factory.snapshot(spec, cfg.eval_begin);
    const auto name = spec.name();
    RecommendOptions opts;
    opts.agg = cfg.agg;
    opts.n = max_rank;
    opts.universe = [&vertices](const PaperId& id) { return vertices.count(id) > 0; };

    // per test paper: recall per rank, averaged over held-out references
    std::vector<std::vector<double>> recall(tests.size(), std::vector<double>(cfg.ranks.size(), 0.0));
    parallel_for(tests.size(), cfg.threads, [&](std::size_t p) {
      const auto& refs = tests[p].references;
      for (std::size_t j = 0; j < refs.size(); ++j) {
        std::vector<PaperId> inputs;
        for (std::size_t i = 0; i < refs.size(); ++i) {
          if (i != j) inputs.push_back(refs[i]);
        }
        std::vector<PaperId> ranking;
        try {
          ranking = ids_of(recommender::recommend_for_set(inputs, *source, opts).ranking.entries);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoInputsResolved) throw;
        }
        for (std::size_t r = 0; r < cfg.ranks.size(); ++r) recall[p][r] += recall_at(ranking, refs[j], cfg.ranks[r]);
      }
      for (auto& v : recall[p]) v /= static_cast<double>(refs.size());
    });

    MeanTable table;
    for (std::size_t p = 0; p < tests.size(); ++p) {
      for (std::size_t r = 0; r < cfg.ranks.size(); ++r) {
        const auto x = static_cast<long>(cfg.ranks[r]);
        table.add(x, recall[p][r]);
        result.documents.push_back({name, tests[p].id, x, recall[p][r]});
      }
    }
    table.emit(name, "recall", result.rows);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Setting 2

std::map<PaperId, std::set<PaperId>> future_related(const Corpus& corpus, const Setting2Config& cfg) {
  const auto& g = corpus.graph;
  const auto& pubs = corpus.papers;
  std::map<PaperId, std::set<PaperId>> related;
  for (relmat::Index k = 0; k < g.size(); ++k) {
    const auto tk = pubs.at(k).published;
    if (tk < cfg.gt_begin || tk > cfg.gt_end) continue;
    const auto refs = g.references(k);
    std::vector<relmat::Index> recent;
    for (const auto j : refs) {
      const auto tj = pubs.at(j).published;
      if (tj >= cfg.eval_begin && tj <= cfg.gt_begin) recent.push_back(j);
    }
    for (const auto i : refs) {
      for (const auto j : recent) {
        if (j != i) related[g.catalog().id(i)].insert(g.catalog().id(j));
      }
    }
  }
  return related;
}

EvalResult setting2(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting2Config& cfg) {
  if (!(cfg.eval_begin < cfg.eval_end && cfg.eval_end < cfg.gt_begin && cfg.gt_begin < cfg.gt_end)) {
    throw Error(ErrorCode::InvalidConfig, "setting 2 needs eval_begin < eval_end < gt_begin < gt_end");
  }
  if (cfg.n_max == 0) throw Error(ErrorCode::InvalidConfig, "n_max must be >= 1");
  const auto& g = corpus.graph;
  const auto& pubs = corpus.papers;
  const auto vertices = graph_vertices(g);
  const auto related = future_related(corpus, cfg);

  std::vector<relmat::Index> tests;
  for (relmat::Index k = 0; k < g.size(); ++k) {
    const auto t = pubs.at(k).published;
    if (t >= cfg.eval_begin && t <= cfg.eval_end) tests.push_back(k);
  }
  if (tests.empty()) throw Error(ErrorCode::EmptyTestSet, "no paper in the evaluation window");

  // Month starts from the first test paper's publication up to gt_begin.
  std::vector<Timestamp> grid;
  for (Timestamp m = month_start(cfg.eval_begin); m <= cfg.gt_begin; m = add_months(m, 1)) grid.push_back(m);

  struct Point {
    long dt;
    double ap;
    std::size_t recommended;
  };
  EvalResult result;
  for (const auto& spec : measures) {
    const auto name = spec.name();
    // Build snapshots up front so worker threads only read.
    std::vector<std::shared_ptr<const NeighborSource>> snapshots;
    for (const auto t : grid) snapshots.push_back(factory.snapshot(spec, t));

    std::vector<std::vector<Point>> points(tests.size());
    parallel_for(tests.size(), cfg.threads, [&](std::size_t p) {
      const auto k = tests[p];
      const auto id = g.catalog().id(k);
      const auto tk = pubs.at(k).published;
      const auto rel = related.find(id);
      if (rel == related.end()) return;
      for (std::size_t x = 0; x < grid.size(); ++x) {
        const auto tx = grid[x];
        if (tx < tk) continue;
        std::unordered_set<PaperId> target;
        for (const auto& d : rel->second) {
          if (pubs.find(d)->published <= tx) target.insert(d);
        }
        if (target.empty()) continue;
        const auto& source = *snapshots[x];
        std::vector<PaperId> ranking;
        if (source.knows(id)) {
          for (const auto& e : source.neighbors(id, std::numeric_limits<std::size_t>::max())) {
            const auto* pub = pubs.find(e.id);
            if (pub && pub->published < cfg.eval_begin) continue;
            if (!vertices.count(e.id)) continue;
            ranking.push_back(e.id);
            if (ranking.size() == cfg.n_max) break;
          }
        }
        points[p].push_back({months_between(tk, tx), average_precision(ranking, target), ranking.size()});
      }
    });

    MeanTable map, count;
    for (std::size_t p = 0; p < tests.size(); ++p) {
      for (const auto& pt : points[p]) {
        map.add(pt.dt, pt.ap);
        count.add(pt.dt, static_cast<double>(pt.recommended));
        result.documents.push_back({name, g.catalog().id(tests[p]), pt.dt, pt.ap});
      }
    }
    map.emit(name, "map", result.rows);
    count.emit(name, "recommendations", result.rows);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Setting 3

EvalResult setting3(const Corpus& corpus, MeasureFactory& factory,
                    const std::vector<MeasureSpec>& measures, const Setting3Config& cfg) {
  if (!(cfg.t0 < cfg.gt_end)) throw Error(ErrorCode::InvalidConfig, "t0 must precede gt_end");
  if (cfg.max_age_months < 0) throw Error(ErrorCode::InvalidConfig, "max_age_months must be >= 0");
  if (cfg.n_max == 0) throw Error(ErrorCode::InvalidConfig, "n_max must be >= 1");
  const auto& g = corpus.graph;
  const auto& pubs = corpus.papers;
  const auto vertices = graph_vertices(g);

  std::vector<relmat::Index> tests;
  for (relmat::Index k = 0; k < g.size(); ++k) {
    const auto& p = pubs.at(k);
    const auto t = cfg.use_update_date ? p.updated : p.published;
    if (t >= cfg.t0 && t <= cfg.gt_end) tests.push_back(k);
  }
  if (tests.empty()) throw Error(ErrorCode::EmptyTestSet, "no paper in the ground-truth window");

  // t_x = t0 shifted back by x months (calendar arithmetic on t0's month).
  std::vector<Timestamp> grid;
  for (int x = 0; x <= cfg.max_age_months + 1; ++x) {
    grid.push_back(x == 0 ? cfg.t0 : add_months(month_start(cfg.t0), -x) + (cfg.t0 - month_start(cfg.t0)));
  }

  EvalResult result;
  for (const auto& spec : measures) {
    const auto name = spec.name();
    const auto source = factory.snapshot(spec, cfg.t0);

    // per test paper: (age bucket, mean AP over its references)
    std::vector<std::vector<std::pair<long, double>>> points(tests.size());
    parallel_for(tests.size(), cfg.threads, [&](std::size_t p) {
      std::vector<relmat::Index> refs;
      for (const auto i : g.references(tests[p])) {
        if (pubs.at(i).published <= cfg.t0) refs.push_back(i);
      }
      for (int x = 0; x <= cfg.max_age_months; ++x) {
        const auto upper = grid[static_cast<std::size_t>(x)];
        const auto lower = grid[static_cast<std::size_t>(x) + 1];
        double sum = 0;
        std::size_t n = 0;
        for (const auto i : refs) {
          const auto ti = pubs.at(i).published;
          if (!(ti > lower && ti <= upper)) continue;
          std::unordered_set<PaperId> target;
          for (const auto j : refs) {
            if (j != i && pubs.at(j).published >= upper) target.insert(g.catalog().id(j));
          }
          if (target.empty()) continue;
          std::vector<PaperId> ranking;
          const auto& id = g.catalog().id(i);
          if (source->knows(id)) {
            for (const auto& e : source->neighbors(id, std::numeric_limits<std::size_t>::max())) {
              if (!vertices.count(e.id)) continue;
              ranking.push_back(e.id);
              if (ranking.size() == cfg.n_max) break;
            }
          }
          sum += average_precision(ranking, target);
          ++n;
        }
        if (n > 0) points[p].emplace_back(-static_cast<long>(x), sum / static_cast<double>(n));
      }
    });

    MeanTable map;
    for (std::size_t p = 0; p < tests.size(); ++p) {
      for (const auto& [dt, ap] : points[p]) {
        map.add(dt, ap);
        result.documents.push_back({name, g.catalog().id(tests[p]), dt, ap});
      }
    }
    map.emit(name, "map", result.rows);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Timestamp need_time(const std::string& key, const std::string& value) {
  const auto t = parse_time(value);
  if (!t) throw Error(ErrorCode::InvalidConfig, key + ": bad time '" + value + "'");
  return *t;
}

std::size_t need_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used == value.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidConfig, key + ": expected a non-negative integer, got '" + value + "'");
}

bool need_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  throw Error(ErrorCode::InvalidConfig, key + ": expected a boolean, got '" + value + "'");
}

}  // namespace

EvalConfig parse_eval_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (base / p).string();
  };

  EvalConfig cfg;
  std::optional<Timestamp> t0;
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
    if (key == "papers") cfg.papers = resolve(value);
    else if (key == "citations") cfg.citations = resolve(value);
    else if (key == "sessions") cfg.sessions = resolve(value);
    else if (key == "corpus") cfg.corpus = resolve(value);
    else if (key == "output") cfg.output = resolve(value);
    else if (key == "measures") {
      cfg.measures.clear();
      for (const auto& m : split_list(value)) cfg.measures.push_back(MeasureSpec::parse(m));
    } else if (key == "eval_begin") {
      cfg.setting1.eval_begin = cfg.setting2.eval_begin = need_time(key, value);
    } else if (key == "eval_end") {
      cfg.setting1.eval_end = cfg.setting2.eval_end = need_time(key, value);
    } else if (key == "gt_begin") {
      cfg.setting2.gt_begin = need_time(key, value);
      if (!t0) cfg.setting3.t0 = cfg.setting2.gt_begin;
    } else if (key == "gt_end") {
      cfg.setting2.gt_end = cfg.setting3.gt_end = need_time(key, value);
    } else if (key == "t0") {
      t0 = cfg.setting3.t0 = need_time(key, value);
    } else if (key == "ranks") {
      cfg.setting1.ranks.clear();
      for (const auto& r : split_list(value)) {
        const auto n = need_count(key, r);
        if (n == 0) throw Error(ErrorCode::InvalidConfig, "ranks must be >= 1");
        cfg.setting1.ranks.push_back(n);
      }
    } else if (key == "agg") {
      const auto fn = recommender::parse_agg(value);
      if (!fn) throw Error(ErrorCode::InvalidConfig, "agg: unknown aggregation '" + value + "'");
      cfg.setting1.agg = *fn;
    } else if (key == "n_max") {
      cfg.setting2.n_max = cfg.setting3.n_max = need_count(key, value);
    } else if (key == "max_age_months") {
      cfg.setting3.max_age_months = static_cast<int>(need_count(key, value));
    } else if (key == "use_update_date") {
      cfg.setting3.use_update_date = need_bool(key, value);
    } else if (key == "threads") {
      cfg.setting1.threads = cfg.setting2.threads = cfg.setting3.threads =
          static_cast<unsigned>(need_count(key, value));
    } else if (key == "top_n") {
      cfg.factory.top_n = need_count(key, value);
    } else if (key == "t_lag") {
      const auto d = parse_duration(value);
      if (!d) throw Error(ErrorCode::InvalidConfig, "t_lag: bad duration '" + value + "'");
      cfg.factory.t_lag = *d;
    } else if (key == "rush_filter") {
      cfg.factory.rush_filter = need_bool(key, value);
    } else if (key == "memory_budget") {
      cfg.factory.memory_budget = need_count(key, value);
    } else {
      throw Error(ErrorCode::InvalidConfig, path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.measures.empty()) throw Error(ErrorCode::InvalidConfig, "no measures configured");
  if (cfg.papers.empty() || cfg.citations.empty()) {
    throw Error(ErrorCode::InvalidConfig, "papers and citations are required");
  }
  return cfg;
}

Corpus load_corpus(const EvalConfig& cfg) {
  Corpus corpus;
  corpus.papers = PublicationIndex::read_tsv(cfg.papers);
  corpus.graph = CitationGraph(corpus.papers, citegraph::read_edges(cfg.citations));
  if (!cfg.sessions.empty()) corpus.sessions = sessionizer::read_sessions(cfg.sessions);
  if (!cfg.corpus.empty()) corpus.documents = textsim::read_corpus(cfg.corpus);
  return corpus;
}

}  // namespace relrec::evaluator
