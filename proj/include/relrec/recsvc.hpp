#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "relrec/coaccess.hpp"
#include "relrec/recommender.hpp"
#include "relrec/textsim.hpp"

namespace relrec::recsvc {

struct ResolvedId {
  PaperId id;
  bool known = false;
};

struct ResolveResult {
  std::vector<ResolvedId> ids;            // first occurrence order, no duplicates
  std::vector<std::string> unrecognized;  // id-like fragments outside the grammar
};

/// Finds paper identifiers in free text such as a pasted BibTeX file. Version
/// suffixes are dropped. `known` may be null, in which case nothing is known.
ResolveResult resolve_ids(std::string_view text, const relmat::PaperCatalog* known = nullptr);

inline constexpr std::size_t kDefaultResults = 20;
inline constexpr std::size_t kMaxResults = 100;
inline constexpr const char* kDefaultMeasure = "co-download";

/// Everything the service reads; loaded once, never modified.
struct Store {
  coaccess::PublicationIndex papers;
  std::shared_ptr<const relmat::PaperCatalog> catalog;
  std::map<std::string, std::shared_ptr<const recommender::NeighborSource>> measures;
  std::map<PaperId, textsim::Document> documents;
};

/// Store directory layout:
///   papers.tsv               paper ids and dates (required)
///   corpus.ndjson            titles and abstracts (optional)
///   measures/<name>.tsv      neighbor lists, one file per measure
///   text/meta, text/fulltext TF-IDF indexes (optional)
Store load_store(const std::string& dir);

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct RecommendRequest {
  std::vector<PaperId> ids;
  std::string measure = kDefaultMeasure;
  recommender::AggFn agg = recommender::AggFn::Sum;
  std::size_t n = kDefaultResults;
};

/// Request handlers, independent of the transport.
class Service {
 public:
  explicit Service(std::shared_ptr<const Store> store, std::uint64_t seed = std::random_device{}());

  Response resolve(const nlohmann::json& request) const;
  Response recommend(const nlohmann::json& request) const;
  Response recommend(const RecommendRequest& request) const;
  Response paper(std::string_view id) const;
  Response random_paper() const;
  Response measures() const;

  /// Routes a request by method and path; used by the HTTP server and tests.
  Response handle(std::string_view method, std::string_view path, std::string_view body) const;

  const Store& store() const { return *store_; }

 private:
  std::shared_ptr<const Store> store_;
  mutable std::mutex rng_mutex_;
  mutable std::mt19937_64 rng_;

  nlohmann::json describe(const PaperId& id) const;
};

Response error_response(int status, std::string_view code, std::string_view message);

/// HTTP transport over Service::handle. Forwards GET and POST under /api/.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving HTTP on host:port until the process is stopped.
void serve(const Service& service, const std::string& host, int port);

}  // namespace relrec::recsvc
