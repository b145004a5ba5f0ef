#pragma once

#include "regen/flowgraph.hpp"
#include "regen/gf.hpp"
#include "regen/params.hpp"
#include "regen/rational.hpp"
#include "regen/rlnc.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// Failure/repair churn driver: one node fails per round, a newcomer repairs
// from d helpers, and decodability is probed by sampling data collectors.
// Optionally cross-checks every sampled collector against the exact min-cut
// of the mirrored information flow graph (coding can never beat the cut).

namespace regen::churnsim {

enum class FailurePolicy { UniformRandom, RoundRobin, OldestFirst };
enum class HelperPolicy { AllActiveRandomD, MostRecentD };

inline const char* failure_policy_name(FailurePolicy p) {
    switch (p) {
        case FailurePolicy::UniformRandom: return "uniform-random";
        case FailurePolicy::RoundRobin: return "round-robin";
        case FailurePolicy::OldestFirst: return "oldest-first";
    }
    return "?";
}

inline const char* helper_policy_name(HelperPolicy p) {
    switch (p) {
        case HelperPolicy::AllActiveRandomD: return "random-d";
        case HelperPolicy::MostRecentD: return "most-recent-d";
    }
    return "?";
}

struct SimConfig {
    SystemParams params = SystemParams::make(4, 2, 3, Rat(1));
    int rounds = 10;
    FailurePolicy failure_policy = FailurePolicy::UniformRandom;
    HelperPolicy helper_policy = HelperPolicy::AllActiveRandomD;
    std::uint64_t seed = 1;
    int collector_samples = 100;   // exhaustive instead, when fewer subsets exist
    int mincut_samples = 0;        // 0 disables the flow-graph cross-check
    int field_bits = 8;
    bool with_payload = false;
    std::size_t payload_len = 4;
    long long unit_cap = 4096;
};

struct RoundRecord {
    int round = 0;
    int failed = 0;
    int newcomer = 0;
    std::vector<int> helpers;
    long long bandwidth_packets = 0;
    long long coefficient_words = 0;
    int decode_samples = 0;
    int decode_successes = 0;
    long long min_rank = 0;
    int payload_mismatches = 0;
    int mincut_samples = 0;
    int mincut_feasible = 0;
    int cut_decode_violations = 0;  // decode succeeded across a cut below M
};

struct SimReport {
    SimConfig config;
    rlnc::UnitPlan plan;
    std::vector<RoundRecord> rounds;
    long long total_bandwidth_packets = 0;
    Rat total_bandwidth_units;
    long long total_decode_samples = 0;
    long long total_decode_successes = 0;

    double decode_success_rate() const {
        return total_decode_samples == 0
                   ? 1.0
                   : static_cast<double>(total_decode_successes) /
                         static_cast<double>(total_decode_samples);
    }

    nlohmann::ordered_json to_json() const;
};

namespace detail {

// All k-subsets of ids, in lexicographic order.
inline std::vector<std::vector<int>> all_subsets(const std::vector<int>& ids, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    int n = static_cast<int>(ids.size());
    if (k > n || k <= 0) return out;
    while (true) {
        std::vector<int> s(k);
        for (int i = 0; i < k; ++i) s[i] = ids[idx[i]];
        out.push_back(std::move(s));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

inline std::vector<int> sample_subset(const std::vector<int>& ids, int k,
                                      rlnc::RngStream& rng) {
    std::vector<int> pool = ids;
    for (int i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> s(pool.begin(), pool.begin() + k);
    std::sort(s.begin(), s.end());
    return s;
}

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

inline SimReport run(const SimConfig& cfg) {
    if (cfg.rounds < 0) throw std::invalid_argument("rounds must be nonnegative");
    if (cfg.field_bits != 8 && cfg.field_bits != 16)
        throw std::invalid_argument("field_bits must be 8 or 16");
    if (cfg.collector_samples < 0 || cfg.mincut_samples < 0)
        throw std::invalid_argument("sample counts must be nonnegative");

    const gf::Field& f = cfg.field_bits == 8 ? gf::Field::gf256() : gf::Field::gf65536();
    SimReport rep;
    rep.config = cfg;
    rep.plan = rlnc::UnitPlan::from(cfg.params, cfg.unit_cap);

    auto sys = rlnc::initial_encode(f, rep.plan, cfg.seed,
                                    cfg.with_payload ? cfg.payload_len : 0);
    std::vector<rlnc::NodeState>& nodes = sys.nodes;
    auto node_by_id = [&](int id) -> rlnc::NodeState& {
        for (auto& n : nodes)
            if (n.id == id) return n;
        throw std::logic_error("node lookup failed");
    };

    flowgraph::InfoFlowGraph mirror(cfg.params);

    const int n = cfg.params.n, k = cfg.params.k, d = cfg.params.d;
    std::vector<int> active(n);
    std::iota(active.begin(), active.end(), 1);

    for (int r = 1; r <= cfg.rounds; ++r) {
        RoundRecord rec;
        rec.round = r;

        // Pick the failure. Entity ids above 2^40 are reserved for the
        // simulator's own draws, so they never collide with node streams.
        auto fail_rng = rlnc::RngStream::stream_for(cfg.seed, static_cast<std::uint64_t>(r),
                                                    0xFA1100000000ULL);
        switch (cfg.failure_policy) {
            case FailurePolicy::UniformRandom:
                rec.failed = active[static_cast<std::size_t>(fail_rng.next() % active.size())];
                break;
            case FailurePolicy::RoundRobin:
                rec.failed = active[static_cast<std::size_t>((r - 1) % static_cast<int>(active.size()))];
                break;
            case FailurePolicy::OldestFirst:
                rec.failed = *std::min_element(active.begin(), active.end());
                break;
        }
        node_by_id(rec.failed).active = false;
        active.erase(std::find(active.begin(), active.end(), rec.failed));
        mirror.apply(flowgraph::HistoryEvent::fail(rec.failed));

        // Pick the helpers from the survivors.
        if (static_cast<int>(active.size()) < d)
            throw std::logic_error("fewer than d survivors");
        auto help_rng = rlnc::RngStream::stream_for(cfg.seed, static_cast<std::uint64_t>(r),
                                                    0x4E1900000000ULL);
        switch (cfg.helper_policy) {
            case HelperPolicy::AllActiveRandomD:
                rec.helpers = detail::sample_subset(active, d, help_rng);
                break;
            case HelperPolicy::MostRecentD: {
                std::vector<int> sorted = active;
                std::sort(sorted.begin(), sorted.end());
                rec.helpers.assign(sorted.end() - d, sorted.end());
                break;
            }
        }

        rec.newcomer = n + r;
        std::vector<const rlnc::NodeState*> helper_ptrs;
        for (int id : rec.helpers) helper_ptrs.push_back(&node_by_id(id));
        auto result = rlnc::repair(f, rep.plan, rec.newcomer, helper_ptrs, cfg.seed,
                                   static_cast<std::uint64_t>(r));
        rec.bandwidth_packets = result.bandwidth_packets;
        rec.coefficient_words = result.coefficient_words;
        nodes.push_back(std::move(result.newcomer));
        active.push_back(rec.newcomer);
        mirror.apply(flowgraph::HistoryEvent::join(rec.newcomer, rec.helpers));

        // Probe decodability over data-collector choices.
        std::vector<std::vector<int>> collectors;
        BigInt total_subsets = detail::binomial(static_cast<int>(active.size()), k);
        if (total_subsets <= cfg.collector_samples) {
            collectors = detail::all_subsets(active, k);
        } else {
            auto col_rng = rlnc::RngStream::stream_for(cfg.seed, static_cast<std::uint64_t>(r),
                                                       0xC011EC00000000ULL);
            std::vector<int> sorted = active;
            std::sort(sorted.begin(), sorted.end());
            for (int i = 0; i < cfg.collector_samples; ++i)
                collectors.push_back(detail::sample_subset(sorted, k, col_rng));
        }

        rec.min_rank = rep.plan.file_units;
        for (std::size_t ci = 0; ci < collectors.size(); ++ci) {
            std::vector<const rlnc::NodeState*> chosen;
            for (int id : collectors[ci]) chosen.push_back(&node_by_id(id));
            auto dec = rlnc::collect_and_decode(f, rep.plan, chosen);
            ++rec.decode_samples;
            if (dec.decodable) ++rec.decode_successes;
            rec.min_rank = std::min(rec.min_rank, dec.rank);
            if (cfg.with_payload && dec.source &&
                *dec.source != sys.source_payload)
                ++rec.payload_mismatches;

            if (rec.mincut_samples < cfg.mincut_samples) {
                ++rec.mincut_samples;
                auto cut = mirror.min_cut(collectors[ci]);
                bool feasible = cut.infinite || cut.value >= cfg.params.file_size;
                if (feasible) ++rec.mincut_feasible;
                if (!feasible && dec.decodable) ++rec.cut_decode_violations;
            }
        }

        rep.total_bandwidth_packets += rec.bandwidth_packets;
        rep.total_decode_samples += rec.decode_samples;
        rep.total_decode_successes += rec.decode_successes;
        rep.rounds.push_back(std::move(rec));
    }

    rep.total_bandwidth_units = Rat(rep.total_bandwidth_packets) * rep.plan.unit;
    return rep;
}

inline nlohmann::ordered_json SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["params"] = {{"n", config.params.n},
                   {"k", config.params.k},
                   {"d", config.params.d},
                   {"file_size", rat_to_fraction(config.params.file_size)},
                   {"alpha", rat_to_fraction(config.params.alpha)},
                   {"beta", rat_to_fraction(config.params.beta)},
                   {"gamma", rat_to_fraction(config.params.gamma())}};
    j["plan"] = {{"unit", rat_to_fraction(plan.unit)},
                 {"file_units", plan.file_units},
                 {"alpha_units", plan.alpha_units},
                 {"beta_units", plan.beta_units}};
    j["config"] = {{"rounds", config.rounds},
                   {"failure_policy", failure_policy_name(config.failure_policy)},
                   {"helper_policy", helper_policy_name(config.helper_policy)},
                   {"seed", config.seed},
                   {"collector_samples", config.collector_samples},
                   {"mincut_samples", config.mincut_samples},
                   {"field_bits", config.field_bits},
                   {"with_payload", config.with_payload}};
    j["rounds"] = nlohmann::ordered_json::array();
    for (const auto& r : rounds) {
        nlohmann::ordered_json jr = {{"round", r.round},
                                     {"failed", r.failed},
                                     {"newcomer", r.newcomer},
                                     {"helpers", r.helpers},
                                     {"bandwidth_packets", r.bandwidth_packets},
                                     {"coefficient_words", r.coefficient_words},
                                     {"decode_samples", r.decode_samples},
                                     {"decode_successes", r.decode_successes},
                                     {"min_rank", r.min_rank}};
        if (config.with_payload) jr["payload_mismatches"] = r.payload_mismatches;
        if (config.mincut_samples > 0) {
            jr["mincut_samples"] = r.mincut_samples;
            jr["mincut_feasible"] = r.mincut_feasible;
            jr["cut_decode_violations"] = r.cut_decode_violations;
        }
        j["rounds"].push_back(std::move(jr));
    }
    j["totals"] = {{"rounds", static_cast<long long>(rounds.size())},
                   {"bandwidth_packets", total_bandwidth_packets},
                   {"bandwidth_units", rat_to_fraction(total_bandwidth_units)},
                   {"decode_samples", total_decode_samples},
                   {"decode_successes", total_decode_successes},
                   {"decode_success_rate", decode_success_rate()}};
    return j;
}

}  // namespace regen::churnsim
