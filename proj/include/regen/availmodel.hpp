#pragma once

#include "regen/params.hpp"
#include "regen/rational.hpp"
#include "regen/tradeoff.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

// Steady-state cost model for a storage system under node churn: given a
// per-day failure rate f and a node availability a, each redundancy strategy
// maps to (unavailability, maintenance bandwidth per day, raw storage).
// Replication, an idealized erasure code, the replica+code hybrid, and the
// two extreme regenerating codes are covered.

namespace regen::availmodel {

struct ChurnModel {
    std::string name;
    double f = 0;  // node failures per node-day
    double a = 0;  // probability a live node is reachable
    double span_days = 0;
    double mean_nodes_up = 0;
    double period_min = 0;  // measurement granularity
};

// Measured churn characteristics of four public node-availability traces.
inline const std::vector<ChurnModel>& builtin_models() {
    static const std::vector<ChurnModel> models = {
        {"planetlab", 0.017, 0.97, 527.0, 303.0, 15.0},
        {"microsoft", 0.038, 0.91, 35.0, 41970.0, 60.0},
        {"skype", 0.12, 0.65, 25.0, 710.0, 30.0},
        {"gnutella", 0.30, 0.38, 2.5, 1846.0, 7.0},
    };
    return models;
}

inline const ChurnModel& builtin_model(const std::string& name) {
    for (const auto& m : builtin_models())
        if (m.name == name) return m;
    throw std::invalid_argument("unknown churn model '" + name +
                                "' (try planetlab, microsoft, skype, gnutella)");
}

namespace detail {

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

}  // namespace detail

// P(fewer than k of n nodes are up) when each is up independently with
// probability a: the unavailability of any code that tolerates all k-subsets.
inline double u_ideal(int n, int k, double a) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("availability must be in [0,1]");
    if (k <= 0) return 0.0;
    if (k > n) return 1.0;
    long double acc = 0.0L;
    long double la = a, lq = 1.0L - la;
    for (int i = 0; i < k; ++i) {
        long double term = detail::binomial(n, i).convert_to<long double>();
        term *= std::pow(la, static_cast<long double>(i));
        term *= std::pow(lq, static_cast<long double>(n - i));
        acc += term;
    }
    if (acc < 0.0L) acc = 0.0L;
    if (acc > 1.0L) acc = 1.0L;
    return static_cast<double>(acc);
}

// Same tail probability in exact rational arithmetic (oracle route).
inline Rat u_ideal_exact(int n, int k, const Rat& a) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    if (a < 0 || a > 1) throw std::invalid_argument("availability must be in [0,1]");
    if (k <= 0) return Rat(0);
    if (k > n) return Rat(1);
    Rat acc = 0, q = Rat(1) - a;
    for (int i = 0; i < k; ++i) {
        Rat term = Rat(detail::binomial(n, i));
        for (int j = 0; j < i; ++j) term *= a;
        for (int j = 0; j < n - i; ++j) term *= q;
        acc += term;
    }
    return acc;
}

enum class Strategy { Replication, Ideal, Hybrid, Msr, Mbr };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Replication: return "replication";
        case Strategy::Ideal: return "ideal";
        case Strategy::Hybrid: return "hybrid";
        case Strategy::Msr: return "msr";
        case Strategy::Mbr: return "mbr";
    }
    return "?";
}

inline Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::Replication, Strategy::Ideal, Strategy::Hybrid, Strategy::Msr,
                       Strategy::Mbr})
        if (name == strategy_name(s)) return s;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

struct StrategyPoint {
    Strategy strategy = Strategy::Replication;
    int n = 0;  // storage nodes holding a piece (hybrid: coded nodes + replica)
    int k = 0;
    Rat redundancy;              // total stored / file size
    double unavailability = 0;
    double bandwidth_per_day = 0;  // maintenance traffic, bytes/day
    double storage = 0;            // total bytes on disk
};

// R whole copies of the file; any single copy serves a read.
inline StrategyPoint replication_point(double file_bytes, int replicas, const ChurnModel& m) {
    if (replicas < 1) throw std::invalid_argument("need at least one replica");
    StrategyPoint p;
    p.strategy = Strategy::Replication;
    p.n = replicas;
    p.k = 1;
    p.redundancy = Rat(replicas);
    p.unavailability = u_ideal(replicas, 1, m.a);
    p.storage = file_bytes * replicas;
    p.bandwidth_per_day = m.f * p.storage;  // each failure re-copies one replica
    return p;
}

// Fictitious code that repairs a share by transferring exactly the share:
// the floor any real scheme is measured against. n = k*R nodes, each M/k.
inline StrategyPoint ideal_point(double file_bytes, int k, const Rat& redundancy,
                                 const ChurnModel& m) {
    if (k < 1) throw std::invalid_argument("need k >= 1");
    Rat n_rat = Rat(k) * redundancy;
    if (!is_integer(n_rat) || n_rat < k)
        throw std::invalid_argument("k*R must be an integer node count >= k");
    int n = rat_num(n_rat).convert_to<int>();
    StrategyPoint p;
    p.strategy = Strategy::Ideal;
    p.n = n;
    p.k = k;
    p.redundancy = redundancy;
    p.unavailability = u_ideal(n, k, m.a);
    p.storage = file_bytes * n / k;
    p.bandwidth_per_day = m.f * p.storage;  // n failures/day * M/k each, scaled by f
    return p;
}

// One full replica plus an n = k(R-1) erasure code. Reads and cheap repairs
// go through the replica; the file is lost to a reader only when the replica
// and all but k-1 coded shares are down together. n counts the coded nodes;
// the replica holder is extra.
inline StrategyPoint hybrid_point(double file_bytes, int k, const Rat& redundancy,
                                  const ChurnModel& m) {
    if (k < 1) throw std::invalid_argument("need k >= 1");
    if (redundancy < 2) throw std::invalid_argument("hybrid needs R >= 2");
    Rat coded_rat = Rat(k) * (redundancy - 1);
    if (!is_integer(coded_rat))
        throw std::invalid_argument("k*(R-1) must be an integer node count");
    int coded_n = rat_num(coded_rat).convert_to<int>();
    StrategyPoint p;
    p.strategy = Strategy::Hybrid;
    p.n = coded_n;
    p.k = k;
    p.redundancy = redundancy;
    p.unavailability = (1.0 - m.a) * u_ideal(coded_n, k, m.a);
    p.storage = file_bytes * rat_to_double(redundancy);
    p.bandwidth_per_day = m.f * p.storage;
    return p;
}

// Minimum-storage regenerating code at d = n-1: M/k per node, repairs move
// M/k * (n-1)/(n-k).
inline StrategyPoint msr_point(double file_bytes, int n, int k, const ChurnModel& m) {
    if (k < 1 || n <= k) throw std::invalid_argument("need n > k >= 1");
    StrategyPoint p;
    p.strategy = Strategy::Msr;
    p.n = n;
    p.k = k;
    p.redundancy = Rat(n, k);
    p.unavailability = u_ideal(n, k, m.a);
    p.storage = file_bytes * n / k;
    // f * M * n(n-1) / (k(n-k)): n failing nodes/day each pulling gamma_MSR.
    p.bandwidth_per_day =
        m.f * file_bytes * static_cast<double>(n) * (n - 1) / (static_cast<double>(k) * (n - k));
    return p;
}

// Minimum-bandwidth regenerating code at d = n-1: per-node share is inflated
// by delta = 2(n-1)/(2n-k-1), and a repair moves exactly one share.
inline StrategyPoint mbr_point(double file_bytes, int n, int k, const ChurnModel& m) {
    if (k < 1 || n <= k) throw std::invalid_argument("need n > k >= 1");
    StrategyPoint p;
    p.strategy = Strategy::Mbr;
    p.n = n;
    p.k = k;
    Rat delta = tradeoff::delta_mbr(n, k);
    p.redundancy = Rat(n, k) * delta;
    p.unavailability = u_ideal(n, k, m.a);
    p.storage = file_bytes * static_cast<double>(n) / k * rat_to_double(delta);
    p.bandwidth_per_day = m.f * p.storage;
    return p;
}

struct Sweep {
    std::vector<StrategyPoint> points;  // ordered by increasing redundancy
    int first_meeting = -1;  // least-redundancy point with u <= target
    int nearest = -1;        // minimal |u - target|, ties to lower redundancy
};

inline Sweep sweep(Strategy s, double file_bytes, int k, const ChurnModel& m,
                   double target_unavail, int n_max = 60) {
    Sweep sw;
    auto emit = [&](StrategyPoint p) { sw.points.push_back(std::move(p)); };
    switch (s) {
        case Strategy::Replication:
            for (int r = 1; r <= n_max; ++r) emit(replication_point(file_bytes, r, m));
            break;
        case Strategy::Ideal:
            for (int n = k + 1; n <= n_max; ++n) emit(ideal_point(file_bytes, k, Rat(n, k), m));
            break;
        case Strategy::Hybrid:
            for (int cn = k; cn <= n_max; ++cn)
                emit(hybrid_point(file_bytes, k, Rat(cn, k) + 1, m));
            break;
        case Strategy::Msr:
            for (int n = k + 1; n <= n_max; ++n) emit(msr_point(file_bytes, n, k, m));
            break;
        case Strategy::Mbr:
            for (int n = k + 1; n <= n_max; ++n) emit(mbr_point(file_bytes, n, k, m));
            break;
    }
    double best = -1;
    for (std::size_t i = 0; i < sw.points.size(); ++i) {
        double u = sw.points[i].unavailability;
        if (sw.first_meeting < 0 && u <= target_unavail) sw.first_meeting = static_cast<int>(i);
        double dist = std::abs(u - target_unavail);
        if (sw.nearest < 0 || dist < best) {
            sw.nearest = static_cast<int>(i);
            best = dist;
        }
    }
    return sw;
}

inline std::string format_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// CSV rows: strategy,n,k,R,unavailability,bandwidth_bytes_per_day,storage_bytes.
// When selected >= 0 an extra 0/1 column marks that row.
inline void write_csv(std::ostream& os, const std::vector<StrategyPoint>& pts,
                      int selected = -1) {
    os << "strategy,n,k,R,unavailability,bandwidth_bytes_per_day,storage_bytes";
    if (selected >= 0) os << ",selected";
    os << '\n';
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        os << strategy_name(p.strategy) << ',' << p.n << ',' << p.k << ','
           << rat_to_fraction(p.redundancy) << ',' << format_sci(p.unavailability) << ','
           << format_sci(p.bandwidth_per_day) << ',' << format_sci(p.storage);
        if (selected >= 0) os << ',' << (static_cast<int>(i) == selected ? 1 : 0);
        os << '\n';
    }
}

}  // namespace regen::availmodel
