// relrec: command line front end for the whole pipeline.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relrec/citegraph.hpp"
#include "relrec/coaccess.hpp"
#include "relrec/error.hpp"
#include "relrec/evaluator.hpp"
#include "relrec/logkit.hpp"
#include "relrec/recommender.hpp"
#include "relrec/recsvc.hpp"
#include "relrec/sessionizer.hpp"
#include "relrec/synthgen.hpp"
#include "relrec/textsim.hpp"

namespace fs = std::filesystem;
using namespace relrec;

namespace {

std::size_t parse_bytes(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  std::size_t scale = 1;
  const auto suffix = text.substr(used);
  if (suffix == "K" || suffix == "k") scale = std::size_t{1} << 10;
  else if (suffix == "M" || suffix == "m") scale = std::size_t{1} << 20;
  else if (suffix == "G" || suffix == "g") scale = std::size_t{1} << 30;
  else if (!suffix.empty()) throw Error(ErrorCode::InvalidArgument, "bad size " + text);
  if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative size " + text);
  return static_cast<std::size_t>(v * static_cast<double>(scale));
}

Seconds need_duration(const std::string& text, const char* what) {
  const auto d = parse_duration(text);
  if (!d) throw Error(ErrorCode::InvalidArgument, std::string("bad ") + what + ": " + text);
  return *d;
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\n' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void print_stats(const char* label, const logkit::ParseStats& s) {
  std::cerr << label << ": lines=" << s.lines << " events=" << s.events << " malformed=" << s.malformed
            << " non_paper=" << s.non_paper << " robots=" << s.robots << '\n';
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string robots;
  bool keep_robots = false;
  bool ndjson = false;
  std::string disorder = "1h";
};

// FORMAT[@ZONE]:PATH
logkit::LogFormatSpec input_format(const std::string& spec, std::string& path) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "input must be FORMAT[@ZONE]:PATH, got " + spec);
  auto head = spec.substr(0, colon);
  path = spec.substr(colon + 1);
  std::string zone;
  if (const auto at = head.find('@'); at != std::string::npos) {
    zone = head.substr(at + 1);
    head.resize(at);
  }
  auto format = logkit::format_by_name(head);
  if (!format) throw Error(ErrorCode::InvalidArgument, "unknown log format " + head);
  if (!zone.empty()) {
    const auto tz = TimeZoneRule::parse(zone);
    if (!tz) throw Error(ErrorCode::InvalidArgument, "unknown time zone " + zone);
    format->timezone = *tz;
  }
  format->source = fs::path(path).stem().string();
  return *format;
}

int run_ingest(const IngestArgs& a) {
  logkit::AgentClassifier classifier = a.robots.empty() ? logkit::AgentClassifier::seed()
                                                        : logkit::AgentClassifier::load(a.robots);
  std::vector<std::vector<logkit::AccessEvent>> streams;
  for (const auto& spec : a.inputs) {
    std::string path;
    const auto format = input_format(spec, path);
    logkit::ParseStats stats;
    streams.push_back(logkit::parse_file(path, format, a.keep_robots ? nullptr : &classifier, stats));
    print_stats(path.c_str(), stats);
  }
  const auto merged = logkit::merge_streams(std::move(streams), need_duration(a.disorder, "disorder bound"));
  std::ofstream out(a.out);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + a.out);
  for (const auto& e : merged) out << (a.ndjson ? logkit::format_ndjson(e) : logkit::format_tsv(e)) << '\n';
  std::cerr << "wrote " << merged.size() << " events to " << a.out << '\n';
  return 0;
}

// --- sessionize -------------------------------------------------------------

struct SessionizeArgs {
  std::string events;
  std::string out;
  std::string timeout = "30m";
  std::string filters = "dedup,valid-id,size:min=2:max=300:hours=16,kinds:download+view";
};

int run_sessionize(const SessionizeArgs& a) {
  sessionizer::SessionizerConfig cfg;
  cfg.timeout = need_duration(a.timeout, "timeout");
  sessionizer::parse_filter_spec(a.filters, cfg);
  cfg.validate();
  const auto events = logkit::read_events(a.events);
  std::vector<sessionizer::Session> kept;
  std::map<std::string, std::size_t> dropped;
  std::size_t raw = 0;
  sessionizer::Sessionizer s(cfg.timeout, [&](sessionizer::Session&& session) {
    ++raw;
    auto r = sessionizer::apply_filters(std::move(session), cfg);
    if (auto* ok = std::get_if<sessionizer::Session>(&r)) {
      kept.push_back(std::move(*ok));
    } else {
      ++dropped[std::string(sessionizer::to_string(std::get<sessionizer::Drop>(r).reason))];
    }
  });
  for (const auto& e : events) s.push(e);
  s.finish();
  sessionizer::write_sessions(a.out, kept);
  std::cerr << "sessions: raw=" << raw << " kept=" << kept.size();
  for (const auto& [reason, n] : dropped) std::cerr << ' ' << reason << '=' << n;
  std::cerr << " peak_open=" << s.peak_open_sessions() << '\n';
  return 0;
}

// --- coaccess ---------------------------------------------------------------

struct CoaccessArgs {
  std::string sessions;
  std::string papers;
  std::string out;
  std::string kind = "download";
  std::string lag = "2d";
  bool no_rush_filter = false;
  std::string norm = "none";
  std::size_t top_n = 300;
  std::string memory = "256M";
  std::string ignore_after;
  bool plan = false;
  std::string spill_dir;
};

int run_coaccess(const CoaccessArgs& a) {
  coaccess::CoAccessConfig cfg;
  const auto kind = coaccess::parse_access_kind(a.kind);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "kind must be download or view");
  cfg.kind = *kind;
  cfg.t_lag = need_duration(a.lag, "lag");
  cfg.rush_filter = !a.no_rush_filter;
  const auto norm = coaccess::parse_normalization(a.norm);
  if (!norm) throw Error(ErrorCode::InvalidArgument, "norm must be none, row or column");
  cfg.normalization = *norm;
  cfg.top_n = a.top_n;
  cfg.plan_passes = a.plan;
  if (!a.ignore_after.empty()) cfg.ignore_after_publication = need_duration(a.ignore_after, "ignore-after");
  const auto sessions = sessionizer::read_sessions(a.sessions);
  const auto pubs = coaccess::PublicationIndex::read_tsv(a.papers);
  coaccess::CountStats stats;
  const auto store = coaccess::count_coaccesses(sessions, pubs, cfg, parse_bytes(a.memory), &stats, a.spill_dir);
  if (const auto parent = fs::path(a.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  store.write_tsv(a.out);
  std::cerr << "sessions read=" << stats.sessions_read << " used=" << stats.sessions_used
            << " unknown_accesses=" << stats.unknown_accesses << " passes=" << stats.passes
            << " attempts=" << stats.attempts << " peak_entries=" << stats.peak_entries << '\n';
  return 0;
}

// --- citegraph --------------------------------------------------------------

struct CitegraphArgs {
  std::string papers;
  std::string citations;
  std::string out;
  std::string norm = "none";
  std::size_t top_n = 300;
  double damping = 0.85;
  std::string dangling = "redistribute";
  bool quiet = false;
};

citegraph::CitationGraph load_graph(const CitegraphArgs& a) {
  citegraph::LoadReport report;
  auto g = citegraph::CitationGraph::load(a.papers, a.citations, &report);
  std::cerr << "edges read=" << report.edges_read << " kept=" << g.edge_count() << " self=" << report.self_edges
            << " duplicate=" << report.duplicate_edges << " unknown=" << report.unknown_endpoints << '\n';
  return g;
}

int run_cocitation(const CitegraphArgs& a, bool co_reference) {
  const auto g = load_graph(a);
  const auto norm = citegraph::parse_normalization(a.norm);
  if (!norm) throw Error(ErrorCode::InvalidArgument, "norm must be none, row or column");
  const auto store = co_reference ? citegraph::co_reference_store(g, a.top_n, *norm)
                                  : citegraph::co_citation_store(g, a.top_n, *norm);
  if (const auto parent = fs::path(a.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  store.write_tsv(a.out);
  return 0;
}

int run_importance(const CitegraphArgs& a) {
  const auto g = load_graph(a);
  citegraph::PageRankConfig pr;
  pr.damping = a.damping;
  if (a.dangling == "remove") pr.dangling = citegraph::DanglingPolicy::Remove;
  else if (a.dangling != "redistribute") throw Error(ErrorCode::InvalidArgument, "dangling must be redistribute or remove");
  citegraph::write_importance(a.out, g, citegraph::importance(g, pr));
  return 0;
}

int run_dag(const CitegraphArgs& a) {
  const auto g = load_graph(a);
  const auto r = citegraph::dag_violation_report(g);
  std::cout << "papers_with_references\t" << r.papers_with_references << "\nviolating_papers\t"
            << r.violating_papers << "\nfraction\t" << r.fraction << '\n';
  if (!a.quiet) {
    for (const auto& [from, to] : r.offending_edges) std::cout << "edge\t" << from << '\t' << to << '\n';
  }
  return 0;
}

// --- textsim ----------------------------------------------------------------

int run_text_index(const std::string& corpus, const std::string& out) {
  const auto docs = textsim::read_corpus(corpus);
  for (const auto mode : {textsim::Mode::Meta, textsim::Mode::FullText}) {
    textsim::IndexStats stats;
    const auto index = textsim::TextIndex::build(docs, mode, textsim::default_stop_list(), &stats);
    index.save((fs::path(out) / std::string(textsim::to_string(mode))).string());
    std::cerr << textsim::to_string(mode) << ": documents=" << stats.documents << " terms=" << stats.terms
              << " postings=" << stats.postings << " joined_hyphenations=" << stats.joined_hyphenations;
    if (mode == textsim::Mode::FullText) {
      std::cerr << " reference_rules=";
      for (int r = 0; r < 6; ++r) std::cerr << (r ? "," : "") << stats.stripped[r];
    }
    std::cerr << '\n';
  }
  return 0;
}

int run_text_query(const std::string& index_dir, const std::string& mode, const std::string& id, std::size_t n,
                   std::size_t k_query) {
  if (!textsim::parse_mode(mode)) throw Error(ErrorCode::InvalidArgument, "mode must be meta or fulltext");
  const auto index = textsim::TextIndex::load((fs::path(index_dir) / mode).string());
  for (const auto& e : textsim::rank_similar(index, id, n, k_query)) std::cout << e.id << '\t' << e.score << '\n';
  return 0;
}

// --- store-backed commands --------------------------------------------------

std::string store_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RELREC_STORE")) return env;
  throw Error(ErrorCode::InvalidArgument, "no store directory: pass --store or set RELREC_STORE");
}

int run_recommend(const std::string& store, const std::string& ids, const std::string& measure, const std::string& agg,
                  std::size_t n) {
  recsvc::Service service(std::make_shared<recsvc::Store>(recsvc::load_store(store_dir(store))), 0);
  recsvc::RecommendRequest req;
  req.ids = split_ids(ids);
  req.measure = measure;
  const auto fn = recommender::parse_agg(agg);
  if (!fn) throw Error(ErrorCode::InvalidArgument, "agg must be one of min, mean, max, sum");
  req.agg = *fn;
  req.n = n;
  const auto r = service.recommend(req);
  std::cout << r.body.dump(2) << '\n';
  return r.status == 200 ? 0 : 1;
}

int run_serve(const std::string& store, const std::string& host, int port) {
  const auto dir = store_dir(store);
  recsvc::Service service(std::make_shared<recsvc::Store>(recsvc::load_store(dir)));
  std::cerr << "serving " << dir << " on http://" << host << ':' << port << '\n';
  recsvc::serve(service, host, port);
  return 0;
}

// --- evaluate ---------------------------------------------------------------

int run_evaluate(int setting, const std::string& config, const std::string& out, const std::string& per_doc) {
  const auto cfg = evaluator::parse_eval_config(config);
  const auto corpus = evaluator::load_corpus(cfg);
  evaluator::MeasureFactory factory(corpus, cfg.factory);
  evaluator::EvalResult result;
  switch (setting) {
    case 1: result = evaluator::setting1(corpus, factory, cfg.measures, cfg.setting1); break;
    case 2: result = evaluator::setting2(corpus, factory, cfg.measures, cfg.setting2); break;
    default: result = evaluator::setting3(corpus, factory, cfg.measures, cfg.setting3); break;
  }
  const auto target = !out.empty() ? out : !cfg.output.empty() ? cfg.output : std::string();
  if (target.empty()) {
    std::cout << "algorithm\tmetric\tx\tvalue\tsupport\n";
    for (const auto& r : result.rows) {
      std::cout << r.algorithm << '\t' << r.metric << '\t' << r.x << '\t' << r.value << '\t' << r.support << '\n';
    }
  } else {
    evaluator::write_results(target, result);
  }
  if (!per_doc.empty()) evaluator::write_document_values(per_doc, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relatedness measures and recommendations for scholarly papers"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse raw access logs into one ordered event file");
  c_ingest->add_option("-i,--input", ingest.inputs, "FORMAT[@ZONE]:PATH, format one of combined, legacy-tsv, tsv, ndjson")
      ->required();
  c_ingest->add_option("-o,--out", ingest.out, "Output event file")->required();
  c_ingest->add_option("--robots", ingest.robots, "User-agent pattern file (default: built-in list)");
  c_ingest->add_flag("--keep-robots", ingest.keep_robots, "Do not drop robot traffic");
  c_ingest->add_flag("--ndjson", ingest.ndjson, "Write ndjson instead of TSV");
  c_ingest->add_option("--disorder", ingest.disorder, "Tolerated timestamp disorder per input")->capture_default_str();

  SessionizeArgs sess;
  auto* c_sess = app.add_subcommand("sessionize", "Group events into filtered sessions");
  c_sess->add_option("-e,--events", sess.events, "Event file (TSV or ndjson)")->required();
  c_sess->add_option("-o,--out", sess.out, "Session ndjson output")->required();
  c_sess->add_option("-t,--timeout", sess.timeout, "Idle timeout")->capture_default_str();
  c_sess->add_option("--filters", sess.filters, "Filter chain")->capture_default_str();

  CoaccessArgs co;
  auto* c_co = app.add_subcommand("coaccess", "Count co-downloads or co-views into neighbor lists");
  c_co->add_option("-s,--sessions", co.sessions, "Session ndjson")->required();
  c_co->add_option("-p,--papers", co.papers, "Paper metadata TSV")->required();
  c_co->add_option("-o,--out", co.out, "Neighbor-list TSV")->required();
  c_co->add_option("--kind", co.kind, "download or view")->capture_default_str();
  c_co->add_option("--lag", co.lag, "Delay between announcement and reaction")->capture_default_str();
  c_co->add_flag("--no-rush-filter", co.no_rush_filter, "Count pairs read right after announcement too");
  c_co->add_option("--norm", co.norm, "none, row or column")->capture_default_str();
  c_co->add_option("--top-n", co.top_n, "Neighbors kept per paper")->capture_default_str();
  c_co->add_option("--memory", co.memory, "Counter memory budget (K/M/G suffix)")->capture_default_str();
  c_co->add_option("--ignore-after", co.ignore_after, "Drop accesses this soon after publication");
  c_co->add_flag("--plan", co.plan, "Size passes from a counting pre-pass");
  c_co->add_option("--spill-dir", co.spill_dir, "Directory for the temporary session file");

  CitegraphArgs cg;
  auto* c_cg = app.add_subcommand("citegraph", "Citation graph measures");
  c_cg->require_subcommand(1);
  const auto graph_inputs = [&cg](CLI::App* c) {
    c->add_option("-p,--papers", cg.papers, "Paper metadata TSV")->required();
    c->add_option("-c,--citations", cg.citations, "Edge list TSV (citing, cited)")->required();
  };
  auto* c_cocite = c_cg->add_subcommand("cocite", "Co-citation neighbor lists");
  auto* c_coref = c_cg->add_subcommand("coref", "Co-reference neighbor lists");
  for (auto* c : {c_cocite, c_coref}) {
    graph_inputs(c);
    c->add_option("-o,--out", cg.out, "Neighbor-list TSV")->required();
    c->add_option("--norm", cg.norm, "none, row or column")->capture_default_str();
    c->add_option("--top-n", cg.top_n, "Neighbors kept per paper")->capture_default_str();
  }
  auto* c_imp = c_cg->add_subcommand("importance", "PageRank, HITS and citation counts");
  graph_inputs(c_imp);
  c_imp->add_option("-o,--out", cg.out, "Importance TSV")->required();
  c_imp->add_option("--damping", cg.damping, "PageRank damping factor")->capture_default_str();
  c_imp->add_option("--dangling", cg.dangling, "redistribute or remove")->capture_default_str();
  auto* c_dag = c_cg->add_subcommand("dag", "Report citations of later papers");
  graph_inputs(c_dag);
  c_dag->add_flag("-q,--quiet", cg.quiet, "Only print the summary");

  std::string text_corpus, text_out, text_index, text_mode = "meta", text_id;
  std::size_t text_n = 10, text_k = textsim::kQueryTerms;
  auto* c_text = app.add_subcommand("textsim", "TF-IDF text similarity");
  c_text->require_subcommand(1);
  auto* c_tindex = c_text->add_subcommand("index", "Build meta and fulltext indexes");
  c_tindex->add_option("-c,--corpus", text_corpus, "Corpus ndjson")->required();
  c_tindex->add_option("-o,--out", text_out, "Index directory")->required();
  auto* c_tquery = c_text->add_subcommand("query", "Most similar papers to a paper");
  c_tquery->add_option("-x,--index", text_index, "Index directory")->required();
  c_tquery->add_option("--id", text_id, "Query paper id")->required();
  c_tquery->add_option("--mode", text_mode, "meta or fulltext")->capture_default_str();
  c_tquery->add_option("-n,--top-n", text_n, "Results")->capture_default_str();
  c_tquery->add_option("--k-query", text_k, "Query terms taken from the paper")->capture_default_str();

  std::string rec_store, rec_ids, rec_measure = recsvc::kDefaultMeasure, rec_agg = "sum";
  std::size_t rec_n = recsvc::kDefaultResults;
  auto* c_rec = app.add_subcommand("recommend", "Recommendations for a set of papers");
  c_rec->add_option("--store", rec_store, "Store directory (default: $RELREC_STORE)");
  c_rec->add_option("--ids", rec_ids, "Comma separated paper ids")->required();
  c_rec->add_option("--measure", rec_measure, "Measure name")->capture_default_str();
  c_rec->add_option("--agg", rec_agg, "min, mean, max or sum")->capture_default_str();
  c_rec->add_option("-n,--top-n", rec_n, "Results (1-100)")->capture_default_str();

  std::string eval_config, eval_out, eval_docs;
  auto* c_eval = app.add_subcommand("evaluate", "Offline evaluation");
  c_eval->require_subcommand(1);
  std::vector<CLI::App*> settings;
  for (const char* name : {"setting1", "setting2", "setting3"}) {
    auto* c = c_eval->add_subcommand(name, std::string("Run ") + name);
    c->add_option("--config", eval_config, "Key-value config file")->required();
    c->add_option("-o,--out", eval_out, "Result TSV (default: config output or stdout)");
    c->add_option("--per-document", eval_docs, "Per-document values TSV");
    settings.push_back(c);
  }

  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus with logs");
  c_synth->add_option("--config", synth_config, "Key-value config file (defaults otherwise)");
  c_synth->add_option("-o,--out", synth_out, "Output directory")->required();
  c_synth->add_option("--seed", synth_seed, "Override the seed");

  std::string serve_store, serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* c_serve = app.add_subcommand("serve", "HTTP JSON recommendation service");
  c_serve->add_option("--store", serve_store, "Store directory (default: $RELREC_STORE)");
  c_serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  c_serve->add_option("--port", serve_port, "Port")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_ingest->parsed()) return run_ingest(ingest);
    if (c_sess->parsed()) return run_sessionize(sess);
    if (c_co->parsed()) return run_coaccess(co);
    if (c_cocite->parsed()) return run_cocitation(cg, false);
    if (c_coref->parsed()) return run_cocitation(cg, true);
    if (c_imp->parsed()) return run_importance(cg);
    if (c_dag->parsed()) return run_dag(cg);
    if (c_tindex->parsed()) return run_text_index(text_corpus, text_out);
    if (c_tquery->parsed()) return run_text_query(text_index, text_mode, text_id, text_n, text_k);
    if (c_rec->parsed()) return run_recommend(rec_store, rec_ids, rec_measure, rec_agg, rec_n);
    for (int s = 0; s < 3; ++s) {
      if (settings[static_cast<std::size_t>(s)]->parsed()) return run_evaluate(s + 1, eval_config, eval_out, eval_docs);
    }
    if (c_synth->parsed()) {
      auto cfg = synth_config.empty() ? synthgen::SynthConfig{} : synthgen::parse_synth_config(synth_config);
      if (synth_seed) cfg.seed = *synth_seed;
      const auto corpus = synthgen::generate(cfg);
      synthgen::write_corpus(corpus, synth_out);
      std::cerr << "papers=" << corpus.papers.size() << " citations=" << corpus.citations.size()
                << " sessions=" << corpus.sessions.size() << " combined_lines=" << corpus.combined_log.size()
                << " legacy_lines=" << corpus.legacy_log.size() << '\n';
      return 0;
    }
    if (c_serve->parsed()) return run_serve(serve_store, serve_host, serve_port);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
