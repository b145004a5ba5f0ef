#include "regen/traceio.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>

using namespace regen;
using namespace regen::traceio;

namespace {

AvailabilityTrace parse_str(const std::string& s) {
    std::istringstream in(s);
    return parse_trace(in);
}

std::string emit_str(const AvailabilityTrace& t) {
    std::ostringstream os;
    emit_trace(os, t);
    return os.str();
}

NodeTimeline node(std::string id, std::vector<Interval> up) {
    NodeTimeline n;
    n.node_id = std::move(id);
    n.up = std::move(up);
    return n;
}

constexpr long long kDay = 86400;

}  // namespace

TEST_CASE("trace parsing") {
    SECTION("header, blank lines, CRLF, down rows, coalescing") {
        auto t = parse_str(
            "node_id,start_epoch_s,end_epoch_s,up\r\n"
            "n1,0,5,1\n"
            "\n"
            "n1,5,9,1\n"
            "n2,0,10,0\n"
            "n1,9,12,0\n");
        CHECK(t.span_start == 0);
        CHECK(t.span_end == 12);
        CHECK_FALSE(t.sample_period_s);
        REQUIRE(t.nodes.size() == 2);
        CHECK(t.nodes[0].node_id == "n1");
        CHECK(t.nodes[0].up == std::vector<Interval>{{0, 9}});  // touching rows merge
        CHECK(t.nodes[1].node_id == "n2");
        CHECK(t.nodes[1].up.empty());  // down rows widen the span only
    }
    SECTION("rows arrive unsorted; nodes come out id-sorted") {
        auto t = parse_str("b,5,9,1\nb,0,2,1\na,1,3,1\n");
        REQUIRE(t.nodes.size() == 2);
        CHECK(t.nodes[0].node_id == "a");
        CHECK(t.nodes[1].up == std::vector<Interval>{{0, 2}, {5, 9}});
    }
    SECTION("empty input gives the empty trace") {
        auto t = parse_str("");
        CHECK(t.nodes.empty());
        CHECK(t.span_start == 0);
        CHECK(t.span_end == 0);
        CHECK(parse_str("node_id,start_epoch_s,end_epoch_s,up\n") == t);
    }
    SECTION("malformed rows are rejected with their line number") {
        CHECK_THROWS_WITH(parse_str("n1,0,5\n"),
                          Catch::Matchers::ContainsSubstring("line 1: expected 4 fields, got 3"));
        CHECK_THROWS_WITH(parse_str("n1,0,5,1,\n"),
                          Catch::Matchers::ContainsSubstring("expected 4 fields, got 5"));
        CHECK_THROWS_WITH(parse_str("node_id,start_epoch_s,end_epoch_s,up\nn1,0,5,1\nn1,x,9,1\n"),
                          Catch::Matchers::ContainsSubstring("line 3: bad start_epoch_s 'x'"));
        CHECK_THROWS_WITH(parse_str("n1,0,5.5,1\n"),
                          Catch::Matchers::ContainsSubstring("bad end_epoch_s '5.5'"));
        CHECK_THROWS_WITH(parse_str("n1,0,5,2\n"),
                          Catch::Matchers::ContainsSubstring("up flag must be 0 or 1"));
        CHECK_THROWS_WITH(parse_str("n1,5,5,1\n"),
                          Catch::Matchers::ContainsSubstring("start must precede end"));
        CHECK_THROWS_WITH(parse_str(",0,5,1\n"),
                          Catch::Matchers::ContainsSubstring("empty node_id"));
        CHECK_THROWS_WITH(parse_str("n1,0,10,1\nn1,5,15,0\n"),
                          Catch::Matchers::ContainsSubstring("overlapping intervals at 5"));
        // a header anywhere but line 1 is treated as data
        CHECK_THROWS_WITH(parse_str("n1,0,5,1\nnode_id,start_epoch_s,end_epoch_s,up\n"),
                          Catch::Matchers::ContainsSubstring("bad start_epoch_s"));
    }
}

TEST_CASE("canonical emission tiles the span and round-trips") {
    AvailabilityTrace t;
    t.span_start = 0;
    t.span_end = 100;
    t.nodes = {node("a", {{0, 100}}), node("b", {{10, 20}, {30, 40}}), node("c", {}),
               node("d", {{90, 100}})};

    auto text = emit_str(t);
    CHECK(text ==
          "node_id,start_epoch_s,end_epoch_s,up\n"
          "a,0,100,1\n"
          "b,0,10,0\n"
          "b,10,20,1\n"
          "b,20,30,0\n"
          "b,30,40,1\n"
          "b,40,100,0\n"
          "c,0,100,0\n"
          "d,0,90,0\n"
          "d,90,100,1\n");
    CHECK(parse_str(text) == t);

    // a second emit of the reparsed trace is byte-identical
    CHECK(emit_str(parse_str(text)) == text);

    // measurement period is a sidecar: not serialized, harmless to carry
    auto t2 = t;
    t2.sample_period_s = 900;
    CHECK(emit_str(t2) == text);
    CHECK_FALSE(parse_str(emit_str(t2)).sample_period_s);
}

TEST_CASE("glitch cleaning") {
    SECTION("a system-wide blackout is erased for everyone") {
        AvailabilityTrace t;
        t.span_end = 1000;
        for (const char* id : {"a", "b", "c", "d"})
            t.nodes.push_back(node(id, {{0, 400}, {500, 1000}}));
        auto c = clean_planetlab(t);
        for (const auto& n : c.nodes) CHECK(n.up == std::vector<Interval>{{0, 1000}});
        CHECK(c.span_start == t.span_start);
        CHECK(c.span_end == t.span_end);
    }
    SECTION("one node's private outage survives") {
        AvailabilityTrace t;
        t.span_end = 1000;
        t.nodes = {node("a", {{0, 1000}}), node("b", {{0, 1000}}), node("c", {{0, 1000}}),
                   node("d", {{0, 400}, {500, 1000}})};
        auto c = clean_planetlab(t);
        CHECK(c == t);
    }
    SECTION("a trace without downtime is untouched") {
        AvailabilityTrace t;
        t.span_end = 500;
        t.sample_period_s = 60;
        t.nodes = {node("a", {{0, 500}}), node("b", {{0, 500}})};
        auto c = clean_planetlab(t);
        CHECK(c == t);
        CHECK(c.sample_period_s == t.sample_period_s);
    }
    SECTION("leading and trailing downtime is never flipped") {
        AvailabilityTrace t;
        t.span_end = 1000;
        t.nodes = {node("a", {{400, 600}}), node("b", {{400, 600}}), node("c", {{400, 600}})};
        auto c = clean_planetlab(t);
        CHECK(c == t);  // only interior gaps are judged
    }
    SECTION("cleaning is idempotent on representative traces") {
        // mixed trace: a global glitch, a private outage, a sparse node
        AvailabilityTrace t;
        t.span_end = 10000;
        t.nodes = {node("a", {{0, 4000}, {4100, 10000}}),
                   node("b", {{0, 4000}, {4100, 10000}}),
                   node("c", {{0, 4000}, {4100, 10000}}),
                   node("d", {{0, 2000}, {3000, 4000}, {4100, 10000}}),
                   node("e", {{5000, 6000}, {8000, 9000}})};
        auto once = clean_planetlab(t);
        CHECK(clean_planetlab(once) == once);

        // seeded pseudo-random gentle traces stay stable too
        std::uint64_t state = 12345;
        auto rnd = [&]() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return state;
        };
        for (int trial = 0; trial < 10; ++trial) {
            AvailabilityTrace r;
            r.span_end = 20000;
            for (int ni = 0; ni < 6; ++ni) {
                std::vector<Interval> up;
                long long cur = static_cast<long long>(rnd() % 500);
                while (cur < 19000) {
                    long long len = 1000 + static_cast<long long>(rnd() % 3000);
                    long long end = std::min<long long>(cur + len, 20000);
                    up.push_back({cur, end});
                    cur = end + 50 + static_cast<long long>(rnd() % 400);
                }
                r.nodes.push_back(node("n" + std::to_string(ni), std::move(up)));
            }
            auto c1 = clean_planetlab(r);
            REQUIRE(clean_planetlab(c1) == c1);
        }
    }
}

TEST_CASE("churn estimation") {
    SECTION("always-up fleet") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, 10 * kDay}}), node("b", {{0, 10 * kDay}})};
        auto s = estimate(t, kDay);
        CHECK(s.f == 0.0);
        CHECK(s.a == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(s.mean_nodes_up == Catch::Approx(2.0));
        CHECK(s.span_days == Catch::Approx(10.0));
        CHECK(s.nodes_total == 2);
        CHECK(s.permanent_failures == 0);
    }
    SECTION("one departure halfway through") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, 10 * kDay}}), node("b", {{0, 5 * kDay}})};
        auto s = estimate(t, kDay);
        CHECK(s.permanent_failures == 1);
        CHECK(s.f == Catch::Approx(1.0 / 15.0).epsilon(1e-12));  // 15 live node-days
        CHECK(s.a == Catch::Approx(1.0).epsilon(1e-12));         // up whenever live
        CHECK(s.mean_nodes_up == Catch::Approx(1.5));
    }
    SECTION("short outages are not failures, long ones are") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        // 30h interior gap: dead under a 24h detector, alive under 48h
        t.nodes = {node("a", {{0, kDay}, {kDay + 30 * 3600, 10 * kDay}})};
        auto strict = estimate(t, 24 * 3600);
        CHECK(strict.permanent_failures == 1);
        CHECK(strict.f == Catch::Approx(1.0).epsilon(1e-12));  // dies after one live day
        auto lax = estimate(t, 48 * 3600);
        CHECK(lax.permanent_failures == 0);
        CHECK(lax.f == 0.0);
        CHECK(lax.a == Catch::Approx(1.0 - 30.0 / 240.0).epsilon(1e-12));
        CHECK(strict.f >= lax.f);
    }
    SECTION("up time after a declared death is ignored for f and a") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, kDay}, {6 * kDay, 10 * kDay}}), node("b", {{0, 10 * kDay}})};
        auto s = estimate(t, kDay);
        CHECK(s.permanent_failures == 1);
        CHECK(s.f == Catch::Approx(1.0 / 11.0).epsilon(1e-12));  // 1 + 10 live days
        CHECK(s.a == Catch::Approx(1.0).epsilon(1e-12));
        // ...but the raw mean still sees it
        CHECK(s.mean_nodes_up == Catch::Approx(1.5));
    }
    SECTION("a node that never shows up is out of scope") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, 10 * kDay}}), node("ghost", {})};
        auto s = estimate(t, kDay);
        CHECK(s.nodes_total == 2);
        CHECK(s.permanent_failures == 0);
        CHECK(s.f == 0.0);
        CHECK(s.a == Catch::Approx(1.0));
    }
    SECTION("instants with no live nodes do not pollute the average") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, 5 * kDay}})};
        auto s = estimate(t, kDay);
        CHECK(s.permanent_failures == 1);
        CHECK(s.a == Catch::Approx(1.0));  // the dead half-span is skipped
        CHECK(s.f == Catch::Approx(1.0 / 5.0).epsilon(1e-12));
    }
    SECTION("node order and labels do not matter") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("x", {{0, 3 * kDay}}), node("y", {{0, 10 * kDay}}),
                   node("z", {{2 * kDay, 7 * kDay}})};
        auto s1 = estimate(t, kDay);
        std::swap(t.nodes[0], t.nodes[2]);
        t.nodes[0].node_id = "renamed";
        auto s2 = estimate(t, kDay);
        CHECK(s1.f == s2.f);
        CHECK(s1.a == s2.a);
        CHECK(s1.permanent_failures == s2.permanent_failures);
    }
    SECTION("empty trace and bad timeout") {
        AvailabilityTrace t;
        auto s = estimate(t, 2 * kDay);
        CHECK(s.f == 0.0);
        CHECK(s.a == 0.0);
        CHECK(s.nodes_total == 0);
        CHECK(s.timeout_hours == Catch::Approx(48.0));
        CHECK_THROWS_WITH(estimate(t, 0), Catch::Matchers::ContainsSubstring("timeout"));
        CHECK_THROWS_AS(estimate(t, -5), std::invalid_argument);
    }
    SECTION("summary serialization") {
        AvailabilityTrace t;
        t.span_end = 10 * kDay;
        t.nodes = {node("a", {{0, 10 * kDay}})};
        auto j = estimate(t, kDay).to_json();
        CHECK(j["f"] == 0.0);
        CHECK(j["a"] == 1.0);
        CHECK(j["mean_nodes_up"] == 1.0);
        CHECK(j["span_days"] == 10.0);
        CHECK(j["timeout_hours"] == 24.0);
        CHECK(j["nodes_total"] == 1);
        CHECK(j["permanent_failures"] == 0);
    }
}

TEST_CASE("estimation recovers the parameters of a synthetic fleet") {
    // 20 nodes on a synchronized 2h-up/1h-down duty cycle; half leave at
    // day 10 of 20. Ground truth: a = 2/3, 10 failures.
    AvailabilityTrace t;
    t.span_end = 20 * kDay;  // 160 duty cycles of 10800s
    for (int i = 0; i < 20; ++i) {
        long long horizon = i < 10 ? 10 * kDay : 20 * kDay;
        std::vector<Interval> up;
        for (long long s = 0; s + 7200 <= horizon; s += 10800) up.push_back({s, s + 7200});
        t.nodes.push_back(node("n" + std::to_string(i), std::move(up)));
    }
    auto s = estimate(t, kDay);
    CHECK(s.permanent_failures == 10);
    CHECK(s.a == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(s.mean_nodes_up == Catch::Approx(10.0).epsilon(1e-9));
    // leavers are live until their last seen uptime ends at 860400s
    double live_days = (10 * 860400.0 + 10 * 1728000.0) / 86400.0;
    CHECK(s.f == Catch::Approx(10.0 / live_days).epsilon(1e-9));
}
