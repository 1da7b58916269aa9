#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <zlib.h>

#include "relrec/error.hpp"
#include "relrec/logkit.hpp"

using namespace relrec;
using namespace relrec::logkit;

namespace {

const AccessEvent* event_of(const ParseResult& r) { return std::get_if<AccessEvent>(&r); }

std::optional<SkipReason> skip_of(const ParseResult& r) {
  if (const auto* s = std::get_if<Skip>(&r)) return s->reason;
  return std::nullopt;
}

AccessEvent ev(Timestamp t, std::string key, std::string source = "s") {
  return {t, std::move(key), PaperId("hep-th/0101001"), EventKind::AbstractView, std::move(source)};
}

}  // namespace

TEST_CASE("normalized tsv line") {
  const auto fmt = *format_by_name("tsv");
  const auto r = parse_line("1104580800\tabc123\tdownload\thep-th/0602276\tmirror", fmt);
  const auto* e = event_of(r);
  REQUIRE(e);
  CHECK(e->timestamp == 1104580800);
  CHECK(e->client_key == "abc123");
  CHECK(e->kind == EventKind::FullTextDownload);
  CHECK(e->paper_id == "hep-th/0602276");
  CHECK(e->source == "mirror");
  CHECK(format_tsv(*e) == "1104580800\tabc123\tdownload\thep-th/0602276\tmirror");

  const auto listing = parse_line("1104580800\tabc123\tlisting\t-\tmirror", fmt);
  REQUIRE(event_of(listing));
  CHECK_FALSE(event_of(listing)->paper_id.has_value());
}

TEST_CASE("ndjson mirrors tsv") {
  const AccessEvent e{1104580800, "k", PaperId("0704.0001"), EventKind::AbstractView, "x"};
  const auto r = parse_line(format_ndjson(e), *format_by_name("ndjson"));
  REQUIRE(event_of(r));
  CHECK(*event_of(r) == e);
}

TEST_CASE("malformed lines are skipped") {
  const auto tsv = *format_by_name("tsv");
  CHECK(skip_of(parse_line("", tsv)) == SkipReason::Malformed);
  CHECK(skip_of(parse_line("   ", tsv)) == SkipReason::Malformed);
  CHECK(skip_of(parse_line("notatime\tk\tview\t-\ts", tsv)) == SkipReason::Malformed);
  CHECK(skip_of(parse_line("100\tk\tteleport\t-\ts", tsv)) == SkipReason::Malformed);
  const std::string huge(1 << 20, 'A');
  CHECK(skip_of(parse_line(huge, tsv)) == SkipReason::Malformed);
  CHECK(skip_of(parse_line(huge, *format_by_name("combined"))) == SkipReason::Malformed);
  CHECK(skip_of(parse_line("{\"timestamp\": 5", *format_by_name("ndjson"))) == SkipReason::Malformed);
}

TEST_CASE("combined log lines") {
  auto fmt = *format_by_name("combined");
  const std::string line =
      "10.1.2.3 - - [10/Oct/2004:13:55:36 -0700] \"GET /abs/hep-th/0410001 HTTP/1.0\" 200 2326 \"-\" "
      "\"Mozilla/5.0 (X11)\"";
  const auto r = parse_line(line, fmt);
  REQUIRE(event_of(r));
  CHECK(event_of(r)->timestamp == from_civil(2004, 10, 10, 20, 55, 36));
  CHECK(event_of(r)->kind == EventKind::AbstractView);
  CHECK(event_of(r)->paper_id == "hep-th/0410001");
  CHECK(event_of(r)->client_key == client_key("10.1.2.3", "Mozilla/5.0 (X11)"));

  const auto pdf = parse_line(
      "10.1.2.3 - - [10/Oct/2004:13:55:36 +0000] \"GET /pdf/0704.0001v2 HTTP/1.1\" 200 9 \"-\" \"a\"", fmt);
  REQUIRE(event_of(pdf));
  CHECK(event_of(pdf)->kind == EventKind::FullTextDownload);
  CHECK(event_of(pdf)->paper_id == "0704.0001");

  const auto css = parse_line(
      "10.1.2.3 - - [10/Oct/2004:13:55:36 +0000] \"GET /css/arXiv.css HTTP/1.1\" 200 9 \"-\" \"a\"", fmt);
  CHECK(skip_of(css) == SkipReason::NonPaperRequest);

  const auto missing = parse_line(
      "10.1.2.3 - - [10/Oct/2004:13:55:36 +0000] \"GET /abs/hep-th/0410001 HTTP/1.1\" 404 9 \"-\" \"a\"", fmt);
  CHECK(skip_of(missing) == SkipReason::NonPaperRequest);

  const auto robots = AgentClassifier::seed();
  const auto bot = parse_line(
      "66.249.1.1 - - [10/Oct/2004:13:55:36 +0000] \"GET /abs/hep-th/0410001 HTTP/1.1\" 200 9 \"-\" "
      "\"Mozilla/5.0 (compatible; Googlebot/2.1)\"",
      fmt, &robots);
  CHECK(skip_of(bot) == SkipReason::Robot);
}

TEST_CASE("legacy tsv uses the configured zone") {
  auto fmt = *format_by_name("legacy-tsv");
  fmt.timezone = *TimeZoneRule::named("America/Denver");
  const auto r = parse_line("2004-01-15 05:00:00\t10.0.0.1\tGET /abs/astro-ph/0401001 HTTP/1.0\t200\tLynx/2.8", fmt);
  REQUIRE(event_of(r));
  CHECK(event_of(r)->timestamp == from_civil(2004, 1, 15, 12));
  CHECK(skip_of(parse_line("2004-01-15\t10.0.0.1\tGET /abs/x HTTP/1.0\t200\ta", fmt)) == SkipReason::Malformed);
}

TEST_CASE("request classification") {
  CHECK(classify_request("/abs/hep-th/0602276")->second == "hep-th/0602276");
  CHECK(classify_request("/ps/math.AG/0601001v3")->first == EventKind::FullTextDownload);
  CHECK(classify_request("/list/hep-th/new")->first == EventKind::Listing);
  CHECK_FALSE(classify_request("/favicon.ico").has_value());
}

TEST_CASE("agent classification") {
  const auto seed = AgentClassifier::seed();
  CHECK(classify_agent("Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)", seed) ==
        AgentClass::Robot);
  CHECK(classify_agent("Wget/1.9", seed) == AgentClass::Robot);
  CHECK(classify_agent("Mozilla/4.0 (compatible; MSIE 6.0; Windows NT 5.1)", seed) == AgentClass::Human);
  CHECK(classify_agent("", AgentClassifier{}) == AgentClass::Human);

  const auto custom = AgentClassifier::from_text("# comment\n\nfoo\nsite:mirror-sync\n");
  const std::vector<std::pair<std::string, AgentClass>> fixture = {
      {"FOO/1.0", AgentClass::Robot},
      {"mirror-sync 2", AgentClass::Robot},
      {"Mozilla", AgentClass::Human},
  };
  for (const auto& [agent, want] : fixture) CHECK(classify_agent(agent, custom) == want);
}

TEST_CASE("client keys are stable and short") {
  const auto a = client_key("10.0.0.1", "Mozilla");
  CHECK(a.size() == 16);
  CHECK(a == client_key("10.0.0.1", "Mozilla"));
  CHECK(a != client_key("10.0.0.1", "Mozilla/5"));
  CHECK(a != client_key("10.0.0.2", "Mozilla"));
}

TEST_CASE("merge of sorted streams") {
  std::vector<AccessEvent> a = {ev(1, "a"), ev(4, "a"), ev(9, "a")};
  std::vector<AccessEvent> b = {ev(2, "b", "t"), ev(4, "b", "t"), ev(5, "b", "t")};
  auto all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::stable_sort(all.begin(), all.end(), [](const AccessEvent& x, const AccessEvent& y) {
    return std::tie(x.timestamp, x.source) < std::tie(y.timestamp, y.source);
  });
  CHECK(merge_streams({a, b}) == all);
  CHECK(merge_streams({{}}).empty());
  CHECK(merge_streams({}).empty());
}

TEST_CASE("merge repairs bounded disorder") {
  std::vector<AccessEvent> s = {ev(10, "a"), ev(30, "b"), ev(20, "c"), ev(40, "d")};
  const auto out = merge_streams({s}, 60);
  REQUIRE(out.size() == 4);
  CHECK(out[1].client_key == "c");
  CHECK(out[2].client_key == "b");
  CHECK_THROWS_AS(merge_streams({{ev(10000, "a"), ev(10, "b")}}, 60), Error);
}

TEST_CASE("line reader handles gzip and overlong lines") {
  const auto dir = std::filesystem::temp_directory_path() / "relrec_logkit_test";
  std::filesystem::create_directories(dir);
  const auto gz = (dir / "events.tsv.gz").string();
  gzFile f = gzopen(gz.c_str(), "wb");
  const std::string body = "100\tk\tview\thep-th/0101001\ts\n" + std::string(300, 'x') + "\n200\tk\tlisting\t-\ts\n";
  gzwrite(f, body.data(), static_cast<unsigned>(body.size()));
  gzclose(f);

  LineReader reader(gz, 64);
  std::string line;
  bool overlong = false;
  std::vector<std::pair<std::size_t, bool>> seen;
  while (reader.next(line, overlong)) seen.emplace_back(line.size(), overlong);
  REQUIRE(seen.size() == 3);
  CHECK_FALSE(seen[0].second);
  CHECK(seen[1].second);
  CHECK(seen[1].first <= 64);

  ParseStats stats;
  const auto events = read_events(gz, &stats);
  CHECK(events.size() == 2);
  CHECK(stats.malformed == 1);
  std::filesystem::remove_all(dir);
}
