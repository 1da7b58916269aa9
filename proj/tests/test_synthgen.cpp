#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "relrec/citegraph.hpp"
#include "relrec/error.hpp"
#include "relrec/synthgen.hpp"

using namespace relrec;
using namespace relrec::synthgen;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("same seed, same files") {
  SynthConfig cfg;
  cfg.papers = 120;
  cfg.sessions = 600;
  const auto a = fs::temp_directory_path() / "relrec_synth_a";
  const auto b = fs::temp_directory_path() / "relrec_synth_b";
  write_corpus(generate(cfg), a.string());
  write_corpus(generate(cfg), b.string());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    ++files;
  }
  CHECK(files == 8);
  cfg.seed = 2;
  CHECK(generate(cfg).citations != generate(SynthConfig{.papers = 120, .sessions = 600}).citations);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("pure topic sessions stay in their topic") {
  SynthConfig cfg;
  cfg.papers = 200;
  cfg.sessions = 1500;
  cfg.affinity = 1.0;
  cfg.robot_fraction = 0;
  cfg.rush_fraction = 0;
  const auto corpus = generate(cfg);
  std::map<PaperId, std::size_t> topic;
  for (const auto& p : corpus.papers) topic[p.publication.id] = p.topic;
  std::size_t pairs = 0;
  for (const auto& s : corpus.sessions) {
    CHECK(s.type == SessionType::Regular);
    std::set<PaperId> seen;
    for (const auto& e : s.events) {
      if (e.paper_id) seen.insert(*e.paper_id);
    }
    for (const auto& a : seen) {
      for (const auto& b : seen) {
        if (a < b) {
          CHECK(topic[a] == topic[b]);
          ++pairs;
        }
      }
    }
  }
  CHECK(pairs > 100);
}

TEST_CASE("citation structure") {
  const auto corpus = generate(SynthConfig{});
  CHECK(corpus.papers.size() == 500);
  CHECK(corpus.sessions.size() == 5000);
  const citegraph::CitationGraph g(corpus.publication_index(), corpus.citations);
  CHECK(g.edge_count() == corpus.citations.size());
  const auto report = citegraph::dag_violation_report(g);
  const double n = static_cast<double>(report.papers_with_references);
  const double sd = std::sqrt(0.02 * 0.98 / n);
  CHECK(std::abs(report.fraction - 0.02) <= 3 * sd);

  std::map<PaperId, const SynthPaper*> by_id;
  for (const auto& p : corpus.papers) by_id[p.publication.id] = &p;
  for (const auto& [a, b] : corpus.planted_pairs) {
    CHECK(a < b);
    CHECK(by_id[a]->cluster == by_id[b]->cluster);
  }
  for (const auto& p : corpus.papers) CHECK(is_valid_paper_id(p.publication.id));
  CHECK(corpus.documents.size() == 500);
  CHECK(corpus.documents[0].fulltext.has_value());
}

TEST_CASE("session types and raw logs") {
  const auto corpus = generate(SynthConfig{});
  std::map<SessionType, std::size_t> types;
  for (const auto& s : corpus.sessions) ++types[s.type];
  CHECK(types[SessionType::Robot] > 150);
  CHECK(types[SessionType::Rush] > 350);
  CHECK(corpus.noise_lines > 0);
  CHECK(corpus.combined_log.size() + corpus.legacy_log.size() == corpus.events().size() + corpus.noise_lines);
  const auto robots = logkit::AgentClassifier::seed();
  for (const auto& s : corpus.sessions) {
    CHECK((logkit::classify_agent(s.user_agent, robots) == logkit::AgentClass::Robot) == (s.type == SessionType::Robot));
  }
}

TEST_CASE("config parsing and validation") {
  const auto path = fs::temp_directory_path() / "relrec_synth.conf";
  {
    std::ofstream out(path);
    out << "# small\nseed = 9\npapers = 50\nstart = 2002-03-01\nt_lag = 1d\naffinity = 0.5\n";
  }
  const auto cfg = parse_synth_config(path.string());
  CHECK(cfg.seed == 9);
  CHECK(cfg.papers == 50);
  CHECK(cfg.start == from_civil(2002, 3, 1));
  CHECK(cfg.t_lag == kDay);
  CHECK(cfg.affinity == 0.5);
  {
    std::ofstream out(path);
    out << "planets = 9\n";
  }
  CHECK_THROWS_AS(parse_synth_config(path.string()), Error);
  SynthConfig bad;
  bad.affinity = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  fs::remove(path);
}
