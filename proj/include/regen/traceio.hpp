#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Node-availability traces: CSV of per-node up/down intervals, a cleaning
// pass for measurement glitches, and estimation of the churn parameters
// (failure rate f, availability a) under a timeout-based failure detector.

namespace regen::traceio {

struct Interval {
    long long start = 0;  // epoch seconds, half-open [start, end)
    long long end = 0;

    bool operator==(const Interval&) const = default;
};

struct NodeTimeline {
    std::string node_id;
    std::vector<Interval> up;  // disjoint, sorted

    bool operator==(const NodeTimeline&) const = default;
};

struct AvailabilityTrace {
    long long span_start = 0;
    long long span_end = 0;
    // Measurement granularity of the underlying monitor, when known. Not
    // carried by the CSV form; estimation does not depend on it.
    std::optional<long long> sample_period_s;
    std::vector<NodeTimeline> nodes;

    bool operator==(const AvailabilityTrace&) const = default;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline long long parse_ll(const std::string& s, int lineno, const char* what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("trace line " + std::to_string(lineno) + ": bad " + what +
                                    " '" + s + "'");
    }
}

}  // namespace detail

// CSV columns: node_id,start_epoch_s,end_epoch_s,up. A header row is
// detected and skipped. Rows carry both up=1 and up=0 intervals; only the up
// time is kept, but all rows contribute to the span and are checked for
// overlap within a node.
inline AvailabilityTrace parse_trace(std::istream& in) {
    AvailabilityTrace t;
    std::map<std::string, std::vector<std::pair<Interval, bool>>> rows;
    std::vector<std::string> order;

    std::string line;
    int lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("node_id", 0) == 0) continue;
        auto fields = detail::split_csv(line);
        if (fields.size() != 4)
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": expected 4 fields, got " +
                                        std::to_string(fields.size()));
        const std::string& id = fields[0];
        if (id.empty())
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": empty node_id");
        long long s = detail::parse_ll(fields[1], lineno, "start_epoch_s");
        long long e = detail::parse_ll(fields[2], lineno, "end_epoch_s");
        long long up = detail::parse_ll(fields[3], lineno, "up flag");
        if (up != 0 && up != 1)
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": up flag must be 0 or 1");
        if (s >= e)
            throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                        ": interval start must precede end");
        if (!rows.count(id)) order.push_back(id);
        rows[id].push_back({{s, e}, up == 1});
        if (!any || s < t.span_start) t.span_start = s;
        if (!any || e > t.span_end) t.span_end = e;
        any = true;
    }
    if (!any) return t;  // empty input: empty trace, span [0, 0)

    for (const auto& id : order) {
        auto& rs = rows[id];
        std::sort(rs.begin(), rs.end(),
                  [](const auto& x, const auto& y) { return x.first.start < y.first.start; });
        NodeTimeline nt;
        nt.node_id = id;
        long long prev_end = t.span_start - 1;
        for (const auto& [iv, up] : rs) {
            if (iv.start < prev_end)
                throw std::invalid_argument("trace: node '" + id + "' has overlapping intervals at " +
                                            std::to_string(iv.start));
            prev_end = iv.end;
            if (!up) continue;
            if (!nt.up.empty() && nt.up.back().end == iv.start)
                nt.up.back().end = iv.end;  // coalesce touching up rows
            else
                nt.up.push_back(iv);
        }
        t.nodes.push_back(std::move(nt));
    }
    std::sort(t.nodes.begin(), t.nodes.end(),
              [](const NodeTimeline& a, const NodeTimeline& b) { return a.node_id < b.node_id; });
    return t;
}

// Canonical form: nodes sorted by id, each tiling the whole span with
// alternating up/down rows (no gaps, no touching rows of equal state).
inline void emit_trace(std::ostream& os, const AvailabilityTrace& t) {
    os << "node_id,start_epoch_s,end_epoch_s,up\n";
    std::vector<const NodeTimeline*> nodes;
    for (const auto& n : t.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeTimeline* a, const NodeTimeline* b) { return a->node_id < b->node_id; });
    for (const NodeTimeline* n : nodes) {
        long long cursor = t.span_start;
        for (const auto& iv : n->up) {
            if (iv.start > cursor)
                os << n->node_id << ',' << cursor << ',' << iv.start << ",0\n";
            os << n->node_id << ',' << iv.start << ',' << iv.end << ",1\n";
            cursor = iv.end;
        }
        if (cursor < t.span_end) os << n->node_id << ',' << cursor << ',' << t.span_end << ",0\n";
    }
}

namespace detail {

// Step function: number of nodes up at each instant, as breakpoints.
struct UpCount {
    std::vector<long long> times;   // sorted breakpoints
    std::vector<long long> counts;  // counts[i] holds on [times[i], times[i+1])

    static UpCount from(const AvailabilityTrace& t) {
        std::vector<std::pair<long long, int>> deltas;
        for (const auto& n : t.nodes)
            for (const auto& iv : n.up) {
                deltas.push_back({iv.start, +1});
                deltas.push_back({iv.end, -1});
            }
        deltas.push_back({t.span_start, 0});
        deltas.push_back({t.span_end, 0});
        std::sort(deltas.begin(), deltas.end());
        UpCount uc;
        long long cur = 0;
        for (std::size_t i = 0; i < deltas.size();) {
            long long tm = deltas[i].first;
            while (i < deltas.size() && deltas[i].first == tm) cur += deltas[i++].second;
            if (!uc.times.empty() && uc.times.back() == tm)
                uc.counts.back() = cur;
            else {
                uc.times.push_back(tm);
                uc.counts.push_back(cur);
            }
        }
        return uc;
    }

    // integral of the count over [a, b)
    long long integral(long long a, long long b) const {
        if (a >= b) return 0;
        long long acc = 0;
        for (std::size_t i = 0; i + 1 <= times.size(); ++i) {
            long long lo = times[i];
            long long hi = i + 1 < times.size() ? times[i + 1] : b;
            long long s = std::max(a, lo), e = std::min(b, hi);
            if (s < e) acc += counts[i] * (e - s);
            if (lo >= b) break;
        }
        return acc;
    }
};

}  // namespace detail

// Glitch removal for all-pairs-ping style traces: a node's interior downtime
// is judged a measurement artifact when the system-wide mean of up nodes over
// that window sits below half the trace-wide mean; such windows are flipped
// to up. All windows are judged against the original trace, then flipped
// together.
inline AvailabilityTrace clean_planetlab(const AvailabilityTrace& t) {
    auto uc = detail::UpCount::from(t);
    long long span = t.span_end - t.span_start;
    if (span <= 0) return t;
    double overall = static_cast<double>(uc.integral(t.span_start, t.span_end)) / span;

    AvailabilityTrace out;
    out.span_start = t.span_start;
    out.span_end = t.span_end;
    out.sample_period_s = t.sample_period_s;
    for (const auto& n : t.nodes) {
        NodeTimeline nt;
        nt.node_id = n.node_id;
        for (const auto& iv : n.up) {
            bool merge = false;
            if (!nt.up.empty()) {
                long long gs = nt.up.back().end, ge = iv.start;
                if (gs < ge) {
                    double avg = static_cast<double>(uc.integral(gs, ge)) / (ge - gs);
                    merge = avg < overall / 2.0;
                } else {
                    merge = true;  // touching intervals
                }
            }
            if (merge)
                nt.up.back().end = iv.end;
            else
                nt.up.push_back(iv);
        }
        out.nodes.push_back(std::move(nt));
    }
    return out;
}

struct TraceSummary {
    double f = 0;               // permanent failures per live-node-day
    double a = 0;               // availability among live nodes
    double mean_nodes_up = 0;   // raw trace property, no timeout applied
    double span_days = 0;
    double timeout_hours = 0;
    int nodes_total = 0;
    int permanent_failures = 0;

    nlohmann::ordered_json to_json() const {
        return {{"f", f},
                {"a", a},
                {"mean_nodes_up", mean_nodes_up},
                {"span_days", span_days},
                {"timeout_hours", timeout_hours},
                {"nodes_total", nodes_total},
                {"permanent_failures", permanent_failures}};
    }
};

// Timeout-based churn estimation. A node is declared permanently failed at
// the start of its first downtime longer than timeout_s (trailing downtime
// included); it never reintegrates, and its later up time is ignored. Then
//   f = permanent failures / total live node-days,
//   a = time-averaged (live nodes up / live nodes), skipping instants with
//       no live nodes.
inline TraceSummary estimate(const AvailabilityTrace& t, long long timeout_s) {
    if (timeout_s <= 0) throw std::invalid_argument("timeout must be positive");

    TraceSummary s;
    s.timeout_hours = static_cast<double>(timeout_s) / 3600.0;
    if (t.span_end <= t.span_start) return s;  // empty trace: all-zero summary
    s.span_days = static_cast<double>(t.span_end - t.span_start) / 86400.0;
    s.nodes_total = static_cast<int>(t.nodes.size());

    long long span = t.span_end - t.span_start;
    auto uc_raw = detail::UpCount::from(t);
    s.mean_nodes_up = static_cast<double>(uc_raw.integral(t.span_start, t.span_end)) / span;

    // Death time per node: start of the first too-long downtime window.
    // A node with no up time at all is dead from the span start.
    std::vector<std::pair<long long, int>> live_deltas, uplive_deltas;
    long long live_seconds = 0;
    for (const auto& n : t.nodes) {
        long long death = t.span_end;
        long long cursor = t.span_start;
        if (n.up.empty()) {
            death = t.span_start;
        } else {
            for (std::size_t i = 0; i <= n.up.size(); ++i) {
                long long gap_start = cursor;
                long long gap_end = i < n.up.size() ? n.up[i].start : t.span_end;
                if (gap_end - gap_start > timeout_s) {
                    death = gap_start;
                    break;
                }
                if (i < n.up.size()) cursor = n.up[i].end;
            }
        }
        if (death > t.span_start) {
            live_deltas.push_back({t.span_start, +1});
            live_deltas.push_back({death, -1});
            live_seconds += death - t.span_start;
            for (const auto& iv : n.up) {
                long long st = iv.start, en = std::min(iv.end, death);
                if (st >= death) break;
                uplive_deltas.push_back({st, +1});
                uplive_deltas.push_back({en, -1});
            }
        }
        if (death > t.span_start && death < t.span_end) ++s.permanent_failures;
    }

    double live_days = static_cast<double>(live_seconds) / 86400.0;
    s.f = live_days > 0 ? s.permanent_failures / live_days : 0.0;

    // Sweep both step functions together for the time average of up/live.
    std::vector<std::pair<long long, std::pair<int, int>>> events;
    for (auto& [tm, d] : live_deltas) events.push_back({tm, {d, 0}});
    for (auto& [tm, d] : uplive_deltas) events.push_back({tm, {0, d}});
    std::sort(events.begin(), events.end());
    long double num = 0, den = 0;
    long long live = 0, uplive = 0, prev = t.span_start;
    std::size_t i = 0;
    while (i < events.size()) {
        long long tm = events[i].first;
        if (tm > prev && live > 0) {
            num += static_cast<long double>(uplive) / live * (tm - prev);
            den += tm - prev;
        }
        while (i < events.size() && events[i].first == tm) {
            live += events[i].second.first;
            uplive += events[i].second.second;
            ++i;
        }
        prev = tm;
    }
    if (t.span_end > prev && live > 0) {
        num += static_cast<long double>(uplive) / live * (t.span_end - prev);
        den += t.span_end - prev;
    }
    s.a = den > 0 ? static_cast<double>(num / den) : 0.0;
    return s;
}

}  // namespace regen::traceio
