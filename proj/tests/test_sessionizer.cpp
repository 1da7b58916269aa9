#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "relrec/error.hpp"
#include "relrec/sessionizer.hpp"

using namespace relrec;
using namespace relrec::sessionizer;

namespace {

AccessEvent at(Timestamp t, const std::string& client, EventKind kind = EventKind::AbstractView,
               std::optional<PaperId> paper = PaperId("hep-th/0101001")) {
  return {t, client, std::move(paper), kind, "s"};
}

Session session_of(std::vector<AccessEvent> events) {
  Session s{events.front().client_key, std::move(events), 0, 0};
  s.start = s.events.front().timestamp;
  s.end = s.events.back().timestamp;
  return s;
}

}  // namespace

TEST_CASE("single event") {
  const auto out = sessionize({at(0, "a")}, 30 * kMinute);
  REQUIRE(out.size() == 1);
  CHECK(out[0].events.size() == 1);
}

TEST_CASE("gap rule") {
  CHECK(sessionize({at(0, "a"), at(29 * kMinute, "a")}, 30 * kMinute).size() == 1);
  CHECK(sessionize({at(0, "a"), at(30 * kMinute, "a")}, 30 * kMinute).size() == 1);
  CHECK(sessionize({at(0, "a"), at(31 * kMinute, "a")}, 30 * kMinute).size() == 2);
}

TEST_CASE("interleaved clients") {
  const auto out = sessionize({at(0, "A"), at(10, "B"), at(20, "A"), at(30, "B")}, 30 * kMinute);
  REQUIRE(out.size() == 2);
  for (const auto& s : out) {
    CHECK(s.events.size() == 2);
    CHECK(s.events[0].client_key == s.events[1].client_key);
  }
}

TEST_CASE("streaming state stays bounded") {
  std::vector<Session> out;
  Sessionizer s(kMinute, [&](Session&& x) { out.push_back(std::move(x)); });
  for (int i = 0; i < 1000; ++i) s.push(at(i * 10, "c" + std::to_string(i)));
  // only clients seen within the last minute stay open
  CHECK(s.open_sessions() <= 7);
  CHECK(s.peak_open_sessions() <= 8);
  CHECK_THROWS_AS(s.push(at(5, "late")), Error);
  s.finish();
  CHECK(out.size() == 1000);
  CHECK(s.emitted() == 1000);
}

TEST_CASE("filters") {
  SessionizerConfig cfg;
  const auto p1 = PaperId("hep-th/0101001"), p2 = PaperId("hep-th/0101002");

  SUBCASE("dedup of consecutive repeats") {
    auto r = apply_filters(session_of({at(0, "a", EventKind::AbstractView, p1), at(5, "a", EventKind::AbstractView, p1),
                                       at(9, "a", EventKind::FullTextDownload, p2)}),
                           cfg);
    REQUIRE(std::holds_alternative<Session>(r));
    const auto& s = std::get<Session>(r);
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0].paper_id == p1);
    CHECK(s.events[1].kind == EventKind::FullTextDownload);
  }
  SUBCASE("too small") {
    auto r = apply_filters(session_of({at(0, "a", EventKind::AbstractView, p1), at(5, "a", EventKind::Listing, std::nullopt)}),
                           cfg);
    REQUIRE(std::holds_alternative<Drop>(r));
    CHECK(std::get<Drop>(r).reason == DropReason::TooSmall);
  }
  SUBCASE("too large") {
    std::vector<AccessEvent> evs;
    for (int i = 0; i < 500; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "hep-th/0101%03d", i);
      evs.push_back(at(i, "a", EventKind::FullTextDownload, PaperId(id)));
    }
    auto r = apply_filters(session_of(evs), cfg);
    REQUIRE(std::holds_alternative<Drop>(r));
    CHECK(std::get<Drop>(r).reason == DropReason::TooLarge);
  }
  SUBCASE("too long") {
    auto r = apply_filters(session_of({at(0, "a", EventKind::AbstractView, p1), at(17 * kHour, "a", EventKind::AbstractView, p2)}),
                           cfg);
    REQUIRE(std::holds_alternative<Drop>(r));
    CHECK(std::get<Drop>(r).reason == DropReason::TooLong);
  }
  SUBCASE("invalid ids and other kinds leave") {
    auto r = apply_filters(session_of({at(0, "a", EventKind::AbstractView, p1), at(1, "a", EventKind::AbstractView, PaperId("garbage")),
                                       at(2, "a", EventKind::Search, std::nullopt), at(3, "a", EventKind::FullTextDownload, p2)}),
                           cfg);
    REQUIRE(std::holds_alternative<Session>(r));
    CHECK(std::get<Session>(r).events.size() == 2);
  }
  SUBCASE("the size floor applies without a size step") {
    SessionizerConfig bare;
    bare.filters = {FilterStep::Dedup};
    auto r = apply_filters(session_of({at(0, "a", EventKind::AbstractView, p1), at(1, "a", EventKind::AbstractView, p1)}),
                           bare);
    CHECK(std::holds_alternative<Drop>(r));
  }
}

TEST_CASE("filter spec parsing") {
  SessionizerConfig cfg;
  parse_filter_spec("dedup,size:min=3:max=50:hours=4,kinds:download", cfg);
  CHECK(cfg.filters == std::vector<FilterStep>{FilterStep::Dedup, FilterStep::Size, FilterStep::Kinds});
  CHECK(cfg.min_countable == 3);
  CHECK(cfg.max_countable == 50);
  CHECK(cfg.max_duration == 4 * kHour);
  CHECK(cfg.kinds == std::set<EventKind>{EventKind::FullTextDownload});
  CHECK_THROWS_AS(parse_filter_spec("shuffle", cfg), Error);
}

TEST_CASE("concurrency series") {
  CHECK(concurrency_series({}, 5 * kMinute).samples.empty());

  const std::vector<Session> overlapping = {session_of({at(0, "a"), at(100, "a")}), session_of({at(50, "b"), at(120, "b")}),
                                            session_of({at(90, "c"), at(95, "c")})};
  std::size_t peak = 0;
  for (const auto& s : concurrency_series(overlapping, 5 * kMinute).samples) peak = std::max(peak, s.active);
  CHECK(peak == 3);

  const std::vector<Session> apart = {session_of({at(0, "a"), at(60, "a")}), session_of({at(5 * kHour, "b")}),
                                      session_of({at(10 * kHour, "c"), at(10 * kHour + 30, "c")})};
  for (const auto& s : concurrency_series(apart, 5 * kMinute, kMinute).samples) CHECK(s.active <= 1);
}

TEST_CASE("session file round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "relrec_sessions.ndjson").string();
  const std::vector<Session> in = {
      session_of({at(10, "k1", EventKind::AbstractView), at(20, "k1", EventKind::FullTextDownload)}),
      session_of({at(30, "k2", EventKind::Listing, std::nullopt), at(40, "k2")})};
  write_sessions(path, in);
  const auto out = read_sessions(path);
  REQUIRE(out.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(out[i].client_key == in[i].client_key);
    CHECK(out[i].start == in[i].start);
    CHECK(out[i].end == in[i].end);
    REQUIRE(out[i].events.size() == in[i].events.size());
    for (std::size_t k = 0; k < out[i].events.size(); ++k) {
      CHECK(out[i].events[k].timestamp == in[i].events[k].timestamp);
      CHECK(out[i].events[k].kind == in[i].events[k].kind);
      CHECK(out[i].events[k].paper_id == in[i].events[k].paper_id);
    }
  }
  std::filesystem::remove(path);
}
