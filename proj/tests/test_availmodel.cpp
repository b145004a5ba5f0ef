#include "regen/availmodel.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace regen;
using namespace regen::availmodel;

namespace {

// Independent log-space evaluation of P(fewer than k of n nodes up).
long double u_oracle(int n, int k, long double a) {
    long double total = 0;
    for (int i = 0; i < k; ++i) {
        long double lc = std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) -
                         std::lgamma(n - i + 1.0L);
        total += std::exp(lc + i * std::log(a) + (n - i) * std::log(1.0L - a));
    }
    return total;
}

Rat rat_binomial(int n, int k) {
    Rat r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

ChurnModel unit_model(double f, double a) { return {"unit", f, a, 0, 0, 0}; }

}  // namespace

TEST_CASE("builtin churn models") {
    CHECK(builtin_models().size() == 4);
    CHECK(builtin_model("planetlab").f == 0.017);
    CHECK(builtin_model("planetlab").period_min == 15.0);
    CHECK(builtin_model("microsoft").a == 0.91);
    CHECK(builtin_model("microsoft").mean_nodes_up == 41970.0);
    CHECK(builtin_model("skype").f == 0.12);
    CHECK(builtin_model("skype").a == 0.65);
    CHECK(builtin_model("gnutella").span_days == 2.5);
    CHECK_THROWS_WITH(builtin_model("nosuch"),
                      Catch::Matchers::ContainsSubstring("planetlab, microsoft, skype, gnutella"));
}

TEST_CASE("unavailability of an ideal code: closed cases") {
    CHECK(u_ideal(2, 1, 0.5) == Catch::Approx(0.25).epsilon(1e-14));
    CHECK(u_ideal(1, 1, 0.9) == Catch::Approx(0.1).epsilon(1e-14));
    // n == k: everything must be up
    CHECK(u_ideal(3, 3, 0.9) == Catch::Approx(1.0 - 0.729).epsilon(1e-12));
    // k = 1: all must be down
    CHECK(u_ideal(5, 1, 0.9) == Catch::Approx(std::pow(0.1, 5)).epsilon(1e-12));

    // complement identity: head plus tail of the binomial law is 1
    for (int n : {5, 12, 30})
        for (int k = 1; k <= n; k += 3)
            for (double a : {0.38, 0.65, 0.91}) {
                double tail = 0;
                for (int i = k; i <= n; ++i)
                    tail += static_cast<double>(detail::binomial(n, i).convert_to<double>()) *
                            std::pow(a, i) * std::pow(1 - a, n - i);
                CHECK(u_ideal(n, k, a) + tail == Catch::Approx(1.0).epsilon(1e-12));
            }
}

TEST_CASE("unavailability matches a log-space oracle over wide grids") {
    for (int n : {3, 8, 14, 27, 41, 60})
        for (int k = 1; k <= std::min(n, 20); ++k)
            for (double a : {0.38, 0.65, 0.91, 0.97}) {
                long double want = u_oracle(n, k, a);
                if (want < 1e-250L) continue;
                double got = u_ideal(n, k, a);
                REQUIRE(got == Catch::Approx(static_cast<double>(want)).epsilon(1e-9));
            }
}

TEST_CASE("exact rational route agrees with the floating one") {
    for (int n : {2, 5, 9, 12})
        for (int k = 1; k <= n; ++k)
            for (Rat a : {Rat(38, 100), Rat(1, 2), Rat(91, 100)}) {
                Rat exact = u_ideal_exact(n, k, a);
                // the full binomial law sums to one, exactly
                Rat tail = 0;
                Rat q = 1 - a;
                for (int i = k; i <= n; ++i) {
                    Rat term = rat_binomial(n, i);
                    for (int j = 0; j < i; ++j) term *= a;
                    for (int j = 0; j < n - i; ++j) term *= q;
                    tail += term;
                }
                REQUIRE(exact + tail == Rat(1));
                double d = u_ideal(n, k, rat_to_double(a));
                REQUIRE(d == Catch::Approx(rat_to_double(exact)).epsilon(1e-12));
            }
}

TEST_CASE("unavailability responds the right way to each knob") {
    for (int k : {1, 3, 7}) {
        double prev = 2;
        for (int n = k + 1; n <= 40; ++n) {  // more nodes never hurt
            double u = u_ideal(n, k, 0.65);
            CHECK(u <= prev);
            prev = u;
        }
    }
    for (double a : {0.2, 0.5, 0.8})  // higher per-node uptime never hurts
        CHECK(u_ideal(12, 4, a + 0.1) < u_ideal(12, 4, a));
    for (int k = 2; k <= 10; ++k)  // needing more pieces hurts
        CHECK(u_ideal(12, k, 0.65) > u_ideal(12, k - 1, 0.65));
}

TEST_CASE("replication points") {
    auto m = unit_model(0.1, 0.5);
    auto p = replication_point(1000.0, 2, m);
    CHECK(p.unavailability == Catch::Approx(0.25).epsilon(1e-14));
    CHECK(p.storage == 2000.0);
    CHECK(p.bandwidth_per_day == Catch::Approx(200.0));
    CHECK(p.redundancy == Rat(2));
    CHECK(p.k == 1);

    auto single = replication_point(1000.0, 1, m);
    CHECK(single.unavailability == Catch::Approx(0.5));
    CHECK(single.bandwidth_per_day == Catch::Approx(100.0));

    auto hi = replication_point(1.0, 3, unit_model(0.01, 0.97));
    CHECK(hi.unavailability == Catch::Approx(2.7e-5).epsilon(1e-9));

    CHECK_THROWS_AS(replication_point(1000.0, 0, m), std::invalid_argument);
}

TEST_CASE("ideal erasure code points") {
    auto m = unit_model(0.038, 0.91);
    auto p = ideal_point(7000.0, 7, Rat(2), m);
    CHECK(p.n == 14);
    CHECK(p.storage == Catch::Approx(14000.0));
    CHECK(p.unavailability == Catch::Approx(u_ideal(14, 7, 0.91)).epsilon(1e-14));
    // same redundancy moves the same maintenance bytes as replication
    auto r = replication_point(7000.0, 2, m);
    CHECK(p.bandwidth_per_day == Catch::Approx(r.bandwidth_per_day).epsilon(1e-14));

    CHECK_THROWS_WITH(ideal_point(7000.0, 7, Rat(3, 2), m),
                      Catch::Matchers::ContainsSubstring("integer node count"));
    CHECK_THROWS_AS(ideal_point(7000.0, 7, Rat(6, 7), m), std::invalid_argument);
    CHECK_THROWS_AS(ideal_point(7000.0, 0, Rat(2), m), std::invalid_argument);
}

TEST_CASE("hybrid points") {
    auto m = unit_model(0.1, 0.5);
    auto p = hybrid_point(1000.0, 1, Rat(2), m);
    CHECK(p.n == 1);  // one coded node beside the replica
    CHECK(p.unavailability == Catch::Approx(0.25).epsilon(1e-14));
    CHECK(p.storage == Catch::Approx(2000.0));
    CHECK(p.bandwidth_per_day == Catch::Approx(200.0));

    auto q = hybrid_point(7000.0, 7, Rat(18, 7), m);
    CHECK(q.n == 11);  // k(R-1) coded nodes
    CHECK(q.unavailability <= 1 - m.a);  // the replica gates every loss
    CHECK(q.unavailability ==
          Catch::Approx((1 - m.a) * u_ideal(11, 7, m.a)).epsilon(1e-14));

    CHECK_THROWS_WITH(hybrid_point(1000.0, 1, Rat(1), m),
                      Catch::Matchers::ContainsSubstring("R >= 2"));
    CHECK_THROWS_WITH(hybrid_point(7000.0, 7, Rat(5, 2), m),
                      Catch::Matchers::ContainsSubstring("integer node count"));
}

TEST_CASE("regenerating-code points") {
    auto m = unit_model(0.038, 0.91);

    auto msr = msr_point(7000.0, 14, 7, m);
    CHECK(msr.storage == Catch::Approx(14000.0));  // M/k per node, same as ideal
    CHECK(msr.redundancy == Rat(2));
    CHECK(msr.unavailability == Catch::Approx(u_ideal(14, 7, 0.91)).epsilon(1e-14));
    // repairs are delta_msr times dearer than the ideal floor
    auto ideal = ideal_point(7000.0, 7, Rat(2), m);
    CHECK(msr.bandwidth_per_day ==
          Catch::Approx(ideal.bandwidth_per_day * rat_to_double(tradeoff::delta_msr(14, 7)))
              .epsilon(1e-12));

    auto mbr = mbr_point(7000.0, 14, 7, m);
    Rat delta = tradeoff::delta_mbr(14, 7);
    CHECK(mbr.redundancy == Rat(2) * delta);
    CHECK(mbr.storage == Catch::Approx(14000.0 * rat_to_double(delta)).epsilon(1e-12));
    CHECK(mbr.bandwidth_per_day == Catch::Approx(m.f * mbr.storage).epsilon(1e-14));
    // per-node share carries the delta inflation exactly
    CHECK(mbr.storage / 14 == Catch::Approx(1000.0 * rat_to_double(delta)).epsilon(1e-12));

    CHECK_THROWS_AS(msr_point(7000.0, 7, 7, m), std::invalid_argument);
    CHECK_THROWS_AS(mbr_point(7000.0, 6, 7, m), std::invalid_argument);
}

TEST_CASE("maintenance traffic is storage-rate-limited except at the MSR point") {
    auto m = unit_model(0.12, 0.65);
    double M = 5000.0;
    CHECK(replication_point(M, 3, m).bandwidth_per_day ==
          Catch::Approx(m.f * replication_point(M, 3, m).storage));
    CHECK(ideal_point(M, 5, Rat(3), m).bandwidth_per_day ==
          Catch::Approx(m.f * ideal_point(M, 5, Rat(3), m).storage));
    CHECK(hybrid_point(M, 5, Rat(3), m).bandwidth_per_day ==
          Catch::Approx(m.f * hybrid_point(M, 5, Rat(3), m).storage));
    CHECK(mbr_point(M, 15, 5, m).bandwidth_per_day ==
          Catch::Approx(m.f * mbr_point(M, 15, 5, m).storage));

    auto msr = msr_point(M, 15, 5, m);
    double factor = rat_to_double(tradeoff::delta_msr(15, 5));
    CHECK(msr.bandwidth_per_day == Catch::Approx(m.f * msr.storage * factor).epsilon(1e-12));
    CHECK(msr.bandwidth_per_day > m.f * msr.storage);  // strictly dearer for k > 1
}

TEST_CASE("MSR maintenance traffic dips and rises again in n") {
    auto m = unit_model(1.0, 0.9);
    auto bw = [&](int n) { return msr_point(1.0, n, 7, m).bandwidth_per_day; };
    for (int n = 8; n < 13; ++n) CHECK(bw(n) > bw(n + 1));
    CHECK(bw(13) == Catch::Approx(bw(14)).epsilon(1e-14));
    CHECK(bw(13) == Catch::Approx(26.0 / 7.0).epsilon(1e-14));
    for (int n = 14; n < 28; ++n) CHECK(bw(n) < bw(n + 1));
    CHECK(tradeoff::n_opt(7) == 13);
}

TEST_CASE("strategy sweeps and working-point selection") {
    auto m = builtin_model("microsoft");
    for (Strategy s : {Strategy::Replication, Strategy::Ideal, Strategy::Hybrid,
                       Strategy::Msr, Strategy::Mbr}) {
        auto sw = sweep(s, 1e6, 7, m, 1e-4, 40);
        REQUIRE_FALSE(sw.points.empty());
        for (std::size_t i = 1; i < sw.points.size(); ++i) {
            CHECK(sw.points[i - 1].redundancy < sw.points[i].redundancy);
            CHECK(sw.points[i].unavailability <= sw.points[i - 1].unavailability);
        }
        // first_meeting: least redundancy reaching the target
        int fm = -1;
        for (std::size_t i = 0; i < sw.points.size(); ++i)
            if (sw.points[i].unavailability <= 1e-4) {
                fm = static_cast<int>(i);
                break;
            }
        CHECK(sw.first_meeting == fm);
        // nearest: minimal distance, ties to the cheaper row
        int ne = -1;
        double best = -1;
        for (std::size_t i = 0; i < sw.points.size(); ++i) {
            double dist = std::abs(sw.points[i].unavailability - 1e-4);
            if (ne < 0 || dist < best) {
                ne = static_cast<int>(i);
                best = dist;
            }
        }
        CHECK(sw.nearest == ne);
    }

    auto never = sweep(Strategy::Replication, 1e6, 1, m, 0.0, 10);
    CHECK(never.first_meeting == -1);
    CHECK(never.nearest == 9);  // smallest u is the closest approach to zero

    auto always = sweep(Strategy::Replication, 1e6, 1, m, 1.0, 10);
    CHECK(always.first_meeting == 0);
}

TEST_CASE("CSV rendering of strategy points") {
    auto m = unit_model(0.1, 0.5);
    std::vector<StrategyPoint> pts{replication_point(1000.0, 2, m),
                                   mbr_point(1000.0, 4, 2, m)};
    std::ostringstream plain;
    write_csv(plain, pts);
    std::istringstream lines(plain.str());
    std::string l0, l1, l2;
    std::getline(lines, l0);
    std::getline(lines, l1);
    std::getline(lines, l2);
    CHECK(l0 == "strategy,n,k,R,unavailability,bandwidth_bytes_per_day,storage_bytes");
    CHECK(l1 == "replication,2,1,2,0.25,200,2000");
    CHECK(l2.substr(0, 13) == "mbr,4,2,12/5,");

    std::ostringstream marked;
    write_csv(marked, pts, 1);
    std::istringstream mlines(marked.str());
    std::getline(mlines, l0);
    std::getline(mlines, l1);
    std::getline(mlines, l2);
    CHECK(l0 ==
          "strategy,n,k,R,unavailability,bandwidth_bytes_per_day,storage_bytes,selected");
    CHECK(l1.back() == '0');
    CHECK(l2.back() == '1');
}
