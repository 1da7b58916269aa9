#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <thread>

#include "relrec/coaccess.hpp"
#include "relrec/error.hpp"
#include "relrec/recsvc.hpp"
#include "relrec/synthgen.hpp"

// after the Eigen-based headers, see recsvc_http.cpp
#include <httplib.h>

using namespace relrec;
using namespace relrec::recsvc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// A store directory built from a small synthetic corpus, shared by the cases.
const fs::path& store_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "relrec_store_test";
    fs::remove_all(d);
    fs::create_directories(d / "measures");
    synthgen::SynthConfig cfg;
    cfg.papers = 150;
    cfg.sessions = 2000;
    const auto corpus = synthgen::generate(cfg);
    const auto pubs = corpus.publication_index();
    pubs.write_tsv((d / "papers.tsv").string());
    textsim::write_corpus((d / "corpus.ndjson").string(), corpus.documents);
    std::vector<sessionizer::Session> sessions;
    for (const auto& s : corpus.sessions) {
      sessionizer::Session x{s.events.front().client_key, s.events, s.events.front().timestamp, s.events.back().timestamp};
      sessions.push_back(std::move(x));
    }
    coaccess::count_coaccesses(sessions, pubs, {}, 1 << 24).write_tsv((d / "measures" / "co-download.tsv").string());
    textsim::TextIndex::build(corpus.documents, textsim::Mode::Meta).save((d / "text" / "meta").string());
    return d;
  }();
  return dir;
}

std::shared_ptr<const Store> shared_store() {
  static const auto store = std::make_shared<const Store>(load_store(store_dir().string()));
  return store;
}

// A paper with co-download neighbors.
PaperId busy_paper(const Store& s) {
  for (const auto& id : s.catalog->ids()) {
    if (s.measures.at("co-download")->neighbors(id, 5).size() >= 5) return id;
  }
  return {};
}

}  // namespace

TEST_CASE("resolve ids in free text") {
  const auto r = resolve_ids("see hep-th/0602276 and hep-th/0607226");
  REQUIRE(r.ids.size() == 2);
  CHECK(r.ids[0].id == "hep-th/0602276");
  CHECK(r.ids[1].id == "hep-th/0607226");
  CHECK_FALSE(r.ids[0].known);
  CHECK(resolve_ids("").ids.empty());
  CHECK(resolve_ids("hep-th/0602276 again hep-th/0602276v2.").ids.size() == 1);

  const auto bib = resolve_ids("@article{x, eprint = {0704.0001v3}, note = {arXiv:math.AG/0601001.}}\n"
                               "and a bad one hep-th/06022");
  REQUIRE(bib.ids.size() == 2);
  CHECK(bib.ids[0].id == "0704.0001");
  CHECK(bib.ids[1].id == "math.AG/0601001");
  CHECK(bib.unrecognized == std::vector<std::string>{"hep-th/06022"});

  const relmat::PaperCatalog known({"0704.0001"});
  CHECK(resolve_ids("0704.0001", &known).ids[0].known);
}

TEST_CASE("store loading") {
  const auto& s = *shared_store();
  CHECK(s.papers.size() == 150);
  CHECK(s.measures.count("co-download") == 1);
  CHECK(s.measures.count("tfidf_meta") == 1);
  CHECK(s.documents.size() == 150);
  CHECK_THROWS_AS(load_store((fs::temp_directory_path() / "relrec_no_such_store").string()), Error);
}

TEST_CASE("handlers") {
  const Service svc(shared_store(), 42);
  const auto& store = svc.store();
  const auto busy = busy_paper(store);
  REQUIRE_FALSE(busy.empty());

  SUBCASE("resolve mirrors resolve_ids") {
    const auto text = "refs: " + busy + " and hep-th/9901001 and 0704.0001";
    const auto r = svc.handle("POST", "/api/resolve", json{{"text", text}}.dump());
    CHECK(r.status == 200);
    const auto expect = resolve_ids(text, store.catalog.get());
    REQUIRE(r.body["ids"].size() == expect.ids.size());
    for (std::size_t i = 0; i < expect.ids.size(); ++i) {
      CHECK(r.body["ids"][i]["id"] == expect.ids[i].id);
      CHECK(r.body["ids"][i]["known"] == expect.ids[i].known);
    }
    CHECK(svc.handle("POST", "/api/resolve", "{not json").status == 400);
    CHECK(svc.handle("POST", "/api/resolve", "{\"txt\": 1}").status == 400);
  }

  SUBCASE("recommend") {
    const auto r = svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"n", 5}}.dump());
    REQUIRE(r.status == 200);
    CHECK(r.body["measure"] == "co-download");
    const auto& items = r.body["items"];
    CHECK(items.size() <= 5);
    CHECK(items.size() > 0);
    for (std::size_t i = 1; i < items.size(); ++i) CHECK(items[i]["score"] <= items[i - 1]["score"]);
    for (const auto& it : items) {
      CHECK(it["id"] != busy);
      CHECK(it.contains("title"));
      CHECK(it.contains("published"));
    }

    const auto text = svc.handle("POST", "/api/recommend",
                                 json{{"ids", {busy, "hep-th/9901001"}}, {"measure", "tfidf_meta"}, {"agg", "max"}}.dump());
    REQUIRE(text.status == 200);
    CHECK(text.body["unknown"] == json::array({"hep-th/9901001"}));
    CHECK(text.body["items"].size() == kDefaultResults);
  }

  SUBCASE("recommend errors") {
    CHECK(svc.handle("POST", "/api/recommend", json{{"ids", json::array()}}.dump()).status == 400);
    CHECK(svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"n", 0}}.dump()).status == 400);
    CHECK(svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"n", 101}}.dump()).status == 400);
    CHECK(svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"agg", "median"}}.dump()).status == 400);
    CHECK(svc.handle("POST", "/api/recommend", json{{"ids", {"nonsense"}}}.dump()).status == 400);
    const auto m = svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"measure", "co-smell"}}.dump());
    CHECK(m.status == 404);
    CHECK(m.body["error"] == "unknown_measure");
    const auto none = svc.handle("POST", "/api/recommend", json{{"ids", {"hep-th/9901001"}}}.dump());
    CHECK(none.status == 422);
    CHECK(none.body["error"] == "no_inputs_resolved");
  }

  SUBCASE("paper, random and measures") {
    const auto p = svc.handle("GET", "/api/paper/" + busy, "");
    CHECK(p.status == 200);
    CHECK(p.body["id"] == busy);
    CHECK(p.body.contains("abstract"));
    CHECK(svc.handle("GET", "/api/paper/hep-th/9901001", "").status == 404);
    for (int i = 0; i < 5; ++i) {
      const auto r = svc.handle("GET", "/api/random", "");
      CHECK(r.status == 200);
      CHECK(store.papers.find(r.body["id"].get<std::string>()) != nullptr);
    }
    const auto m = svc.handle("GET", "/api/measures", "");
    CHECK(m.body["default"] == "co-download");
    CHECK(m.body["measures"].size() == 2);
    CHECK(svc.handle("DELETE", "/api/measures", "").status == 404);
  }
}

TEST_CASE("http round trip") {
  const Service svc(shared_store(), 7);
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread worker([&] {
    try {
      server.run();
    } catch (const std::exception&) {
    }
  });

  httplib::Client client("127.0.0.1", port);
  const auto busy = busy_paper(svc.store());
  const auto res = client.Post("/api/recommend", json{{"ids", {busy}}, {"n", 3}}.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = json::parse(res->body);
  CHECK(body == svc.handle("POST", "/api/recommend", json{{"ids", {busy}}, {"n", 3}}.dump()).body);

  const auto random = client.Get("/api/random");
  REQUIRE(random);
  CHECK(random->status == 200);
  CHECK(svc.store().papers.find(json::parse(random->body)["id"].get<std::string>()) != nullptr);

  const auto missing = client.Get("/api/paper/hep-th/9901001");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  worker.join();
}
