#include "relrec/recsvc.hpp"

#include <filesystem>
#include <fstream>
#include <regex>
#include <unordered_set>

#include "relrec/error.hpp"

namespace relrec::recsvc {

namespace fs = std::filesystem;
using nlohmann::json;

ResolveResult resolve_ids(std::string_view text, const relmat::PaperCatalog* known) {
  // Anything that looks like an identifier attempt: archive/number or
  // dddd.number, optionally followed by a version.
  static const std::regex candidate(R"(([A-Za-z][A-Za-z.\-]*/\d+|\b\d{4}\.\d+)(v\d+)?)", std::regex::optimize);
  ResolveResult result;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> seen_bad;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), candidate); it != std::sregex_iterator(); ++it) {
    std::string id = (*it)[1].str();
    if (!is_valid_paper_id(id)) {
      // Allow a trailing sentence period after the number.
      if (!id.empty() && id.back() == '.') id.pop_back();
      if (!is_valid_paper_id(id)) {
        if (seen_bad.insert(it->str()).second) result.unrecognized.push_back(it->str());
        continue;
      }
    }
    if (!seen.insert(id).second) continue;
    const bool is_known = known && known->index_of(id).has_value();
    result.ids.push_back({std::move(id), is_known});
  }
  return result;
}

Store load_store(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw Error(ErrorCode::Io, "store directory not found: " + dir);
  Store store;
  store.papers = coaccess::PublicationIndex::read_tsv((root / "papers.tsv").string());
  store.catalog = std::make_shared<relmat::PaperCatalog>(store.papers.catalog());

  if (fs::exists(root / "corpus.ndjson")) {
    for (auto& d : textsim::read_corpus((root / "corpus.ndjson").string())) {
      d.fulltext.reset();
      auto id = d.id;
      store.documents.emplace(std::move(id), std::move(d));
    }
  }
  if (fs::is_directory(root / "measures")) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root / "measures")) {
      if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto name = f.stem().string();
      auto ns = std::make_shared<relmat::NeighborStore>(relmat::NeighborStore::read_tsv(f.string()));
      store.measures.emplace(name, std::make_shared<recommender::StoreSource>(name, std::move(ns), store.catalog));
    }
  }
  for (const auto* mode : {"meta", "fulltext"}) {
    const auto path = root / "text" / mode;
    if (!fs::exists(path / "lexicon.tsv")) continue;
    const auto name = std::string("tfidf_") + mode;
    auto index = std::make_shared<textsim::TextIndex>(textsim::TextIndex::load(path.string()));
    store.measures.emplace(name, std::make_shared<recommender::TextSource>(name, std::move(index)));
  }
  if (store.measures.empty()) throw Error(ErrorCode::Io, "store " + dir + " holds no measures");
  return store;
}

Response error_response(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", code}, {"message", message}}};
}

Service::Service(std::shared_ptr<const Store> store, std::uint64_t seed) : store_(std::move(store)), rng_(seed) {
  if (!store_) throw Error(ErrorCode::InvalidArgument, "null store");
}

json Service::describe(const PaperId& id) const {
  json j{{"id", id}};
  if (const auto* p = store_->papers.find(id)) {
    j["published"] = format_date(p->published);
    j["updated"] = format_date(p->updated);
  }
  if (const auto it = store_->documents.find(id); it != store_->documents.end()) {
    j["title"] = it->second.title;
  }
  return j;
}

Response Service::resolve(const json& request) const {
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string()) {
    return error_response(400, "bad_request", "expected {\"text\": string}");
  }
  const auto r = resolve_ids(request["text"].get<std::string>(), store_->catalog.get());
  json ids = json::array();
  for (const auto& id : r.ids) ids.push_back({{"id", id.id}, {"known", id.known}});
  return {200, json{{"ids", ids}, {"unrecognized", r.unrecognized}}};
}

Response Service::recommend(const json& request) const {
  if (!request.is_object()) return error_response(400, "bad_request", "expected a JSON object");
  RecommendRequest req;
  if (!request.contains("ids") || !request["ids"].is_array()) {
    return error_response(400, "bad_request", "ids must be an array of paper ids");
  }
  for (const auto& v : request["ids"]) {
    if (!v.is_string()) return error_response(400, "bad_request", "ids must be strings");
    req.ids.push_back(v.get<std::string>());
  }
  if (request.contains("measure")) {
    if (!request["measure"].is_string()) return error_response(400, "bad_request", "measure must be a string");
    req.measure = request["measure"].get<std::string>();
  }
  if (request.contains("agg")) {
    const auto fn = request["agg"].is_string() ? recommender::parse_agg(request["agg"].get<std::string>()) : std::nullopt;
    if (!fn) return error_response(400, "bad_request", "agg must be one of min, mean, max, sum");
    req.agg = *fn;
  }
  if (request.contains("n")) {
    if (!request["n"].is_number_integer()) return error_response(400, "bad_request", "n must be an integer");
    const auto n = request["n"].get<long long>();
    if (n < 1 || n > static_cast<long long>(kMaxResults)) {
      return error_response(400, "bad_request", "n must be between 1 and " + std::to_string(kMaxResults));
    }
    req.n = static_cast<std::size_t>(n);
  }
  return recommend(req);
}

Response Service::recommend(const RecommendRequest& req) const {
  if (req.ids.empty()) return error_response(400, "bad_request", "at least one id is required");
  if (req.n < 1 || req.n > kMaxResults) {
    return error_response(400, "bad_request", "n must be between 1 and " + std::to_string(kMaxResults));
  }
  for (const auto& id : req.ids) {
    if (!is_valid_paper_id(id)) return error_response(400, "bad_request", "malformed paper id: " + id);
  }
  const auto m = store_->measures.find(req.measure);
  if (m == store_->measures.end()) return error_response(404, "unknown_measure", "no measure named " + req.measure);

  recommender::RecommendOptions opts;
  opts.agg = req.agg;
  opts.n = req.n;
  recommender::Recommendation rec;
  try {
    rec = recommender::recommend_for_set(req.ids, *m->second, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoInputsResolved) return error_response(422, "no_inputs_resolved", e.what());
    throw;
  }
  json items = json::array();
  std::size_t rank = 0;
  for (const auto& e : rec.ranking.entries) {
    auto item = describe(e.id);
    item["score"] = e.score;
    item["rank"] = ++rank;
    items.push_back(std::move(item));
  }
  return {200, json{{"measure", req.measure},
                    {"agg", recommender::to_string(req.agg)},
                    {"n", req.n},
                    {"resolved", rec.resolved},
                    {"unknown", rec.unknown},
                    {"items", items}}};
}

Response Service::paper(std::string_view id) const {
  const PaperId pid(id);
  if (!store_->papers.find(pid)) return error_response(404, "unknown_paper", "no paper " + pid);
  auto j = describe(pid);
  if (const auto it = store_->documents.find(pid); it != store_->documents.end()) j["abstract"] = it->second.abstract;
  json measures = json::array();
  for (const auto& [name, source] : store_->measures) {
    if (!source->neighbors(pid, 1).empty()) measures.push_back(name);
  }
  j["measures"] = measures;
  return {200, j};
}

Response Service::random_paper() const {
  const auto& ids = store_->catalog->ids();
  if (ids.empty()) return error_response(404, "empty_store", "no papers loaded");
  std::size_t i;
  {
    std::lock_guard lock(rng_mutex_);
    i = std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng_);
  }
  return {200, describe(ids[i])};
}

Response Service::measures() const {
  json names = json::array();
  for (const auto& [name, source] : store_->measures) names.push_back(name);
  return {200, json{{"measures", names}, {"default", kDefaultMeasure}}};
}

Response Service::handle(std::string_view method, std::string_view path, std::string_view body) const {
  try {
    const auto parse_body = [&]() { return json::parse(body.begin(), body.end(), nullptr, false); };
    if (method == "POST" && path == "/api/resolve") {
      const auto j = parse_body();
      if (j.is_discarded()) return error_response(400, "bad_request", "invalid JSON");
      return resolve(j);
    }
    if (method == "POST" && path == "/api/recommend") {
      const auto j = parse_body();
      if (j.is_discarded()) return error_response(400, "bad_request", "invalid JSON");
      return recommend(j);
    }
    if (method == "GET" && path == "/api/random") return random_paper();
    if (method == "GET" && path == "/api/measures") return measures();
    constexpr std::string_view paper_prefix = "/api/paper/";
    if (method == "GET" && path.starts_with(paper_prefix)) return paper(path.substr(paper_prefix.size()));
    return error_response(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace relrec::recsvc
