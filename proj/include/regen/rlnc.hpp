#pragma once

#include "regen/gf.hpp"
#include "regen/params.hpp"
#include "regen/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Random linear network coding over a finite field. Fractional storage and
// repair amounts are realized by sub-packetization: the file is split into
// equal units so that per-node storage and per-helper transfer become whole
// packet counts. Every random draw is tied to (seed, event, entity), so runs
// replay exactly.

namespace regen::rlnc {

// Splittable counter-based generator (splitmix64 core). Independent streams
// come from folding the event index and entity id into the seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    static RngStream stream_for(std::uint64_t seed, std::uint64_t event_index,
                                std::uint64_t entity_id) {
        std::uint64_t s = mix(seed ^ mix(event_index + 0x9E3779B97F4A7C15ULL));
        s = mix(s ^ mix(entity_id + 0xBF58476D1CE4E5B9ULL));
        return RngStream(s);
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    gf::Elem next_elem(const gf::Field& f) { return f.from_word(next()); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// Packet counts after splitting the file into units of size
// 1 / lcm(den(alpha), den(beta), den(M)). All three quantities then become
// integers: M_u units of file, alpha_u stored per node, beta_u sent per
// helper per repair.
struct UnitPlan {
    int n = 0, k = 0, d = 0;
    Rat unit;
    long long file_units = 0;
    long long alpha_units = 0;
    long long beta_units = 0;
    // Storing more than one repair delivers (alpha > d*beta): a newcomer's
    // packets then cannot all be independent. Legal, but worth surfacing.
    bool alpha_exceeds_gamma = false;

    static UnitPlan from(const SystemParams& p, long long unit_cap = 4096) {
        if (p.file_size <= 0) throw std::invalid_argument("file size must be positive");
        if (p.alpha <= 0) throw std::invalid_argument("alpha must be positive");
        if (p.beta <= 0) throw std::invalid_argument("beta must be positive");
        BigInt l = denominator_lcm({p.file_size, p.alpha, p.beta});
        UnitPlan u;
        u.n = p.n;
        u.k = p.k;
        u.d = p.d;
        u.unit = Rat(1, l);
        u.file_units = to_units(p.file_size, l, unit_cap, "file size");
        u.alpha_units = to_units(p.alpha, l, unit_cap, "alpha");
        u.beta_units = to_units(p.beta, l, unit_cap, "beta");
        u.alpha_exceeds_gamma = p.alpha > p.gamma();
        if (u.alpha_units * u.k < u.file_units)
            throw std::invalid_argument("k*alpha < M: no k-subset can ever hold the file");
        return u;
    }

private:
    static long long to_units(const Rat& v, const BigInt& l, long long cap,
                              const std::string& what) {
        BigInt units = rat_num(v) * (l / rat_den(v));
        if (units > cap)
            throw std::invalid_argument(what + " needs " + units.str() +
                                        " packets, above the cap of " + std::to_string(cap) +
                                        "; use coarser parameters or raise the cap");
        return static_cast<long long>(units);
    }
};

// One coded packet: its combination vector over the M_u source units, and
// optionally the combined payload words themselves. Coefficient-only packets
// are enough for rank/decodability questions.
struct CodedPacket {
    std::vector<gf::Elem> coeffs;
    std::vector<gf::Elem> payload;
};

struct NodeState {
    int id = 0;
    bool active = true;
    std::vector<CodedPacket> packets;
};

struct EncodedSystem {
    UnitPlan plan;
    std::vector<NodeState> nodes;
    // M_u x payload_len source words (empty when encoding coefficients only).
    std::vector<std::vector<gf::Elem>> source_payload;
};

struct RepairResult {
    NodeState newcomer;
    long long bandwidth_packets = 0;      // packets that crossed the network
    long long coefficient_words = 0;      // header overhead, field elements
};

struct DecodeResult {
    bool decodable = false;
    long long rank = 0;
    // Reconstructed M_u x payload_len source words when payloads were carried.
    std::optional<std::vector<std::vector<gf::Elem>>> source;
};

namespace detail {

inline CodedPacket combine(const gf::Field& f, const std::vector<CodedPacket>& inputs,
                           const std::vector<gf::Elem>& weights, std::size_t coeff_len,
                           std::size_t payload_len) {
    CodedPacket out;
    out.coeffs.assign(coeff_len, 0);
    out.payload.assign(payload_len, 0);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        gf::Elem w = weights[i];
        if (w == 0) continue;
        for (std::size_t j = 0; j < coeff_len; ++j)
            out.coeffs[j] = f.add(out.coeffs[j], f.mul(w, inputs[i].coeffs[j]));
        for (std::size_t j = 0; j < payload_len; ++j)
            out.payload[j] = f.add(out.payload[j], f.mul(w, inputs[i].payload[j]));
    }
    return out;
}

}  // namespace detail

// Source packets are the unit vectors; node i (1-based) stores alpha_u
// uniform random combinations, drawn from the stream (seed, event 0, node i).
// payload_len > 0 additionally materializes random source words (stream
// (seed, 0, 0)) and carries combined payloads in every packet.
inline EncodedSystem initial_encode(const gf::Field& f, const UnitPlan& plan,
                                    std::uint64_t seed, std::size_t payload_len = 0) {
    EncodedSystem sys;
    sys.plan = plan;

    std::size_t m = static_cast<std::size_t>(plan.file_units);
    std::vector<CodedPacket> source(m);
    auto src_rng = RngStream::stream_for(seed, 0, 0);
    for (std::size_t p = 0; p < m; ++p) {
        source[p].coeffs.assign(m, 0);
        source[p].coeffs[p] = 1;
        source[p].payload.resize(payload_len);
        for (auto& w : source[p].payload) w = src_rng.next_elem(f);
    }
    if (payload_len > 0) {
        sys.source_payload.reserve(m);
        for (const auto& pkt : source) sys.source_payload.push_back(pkt.payload);
    }

    sys.nodes.reserve(plan.n);
    for (int id = 1; id <= plan.n; ++id) {
        NodeState node;
        node.id = id;
        auto rng = RngStream::stream_for(seed, 0, static_cast<std::uint64_t>(id));
        for (long long j = 0; j < plan.alpha_units; ++j) {
            std::vector<gf::Elem> w(m);
            for (auto& x : w) x = rng.next_elem(f);
            node.packets.push_back(detail::combine(f, source, w, m, payload_len));
        }
        sys.nodes.push_back(std::move(node));
    }
    return sys;
}

// Two-stage repair: each helper sends beta_u fresh combinations of its own
// packets, then the newcomer stores alpha_u combinations of everything it
// received. Helper draws come from (seed, event, helper id), the newcomer's
// from (seed, event, newcomer id).
inline RepairResult repair(const gf::Field& f, const UnitPlan& plan, int newcomer_id,
                           const std::vector<const NodeState*>& helpers, std::uint64_t seed,
                           std::uint64_t event_index) {
    if (static_cast<int>(helpers.size()) != plan.d)
        throw std::invalid_argument("repair needs exactly d=" + std::to_string(plan.d) +
                                    " helpers, got " + std::to_string(helpers.size()));
    for (const NodeState* h : helpers) {
        if (h == nullptr || !h->active)
            throw std::invalid_argument("repair helper must be an active node");
        if (h->id == newcomer_id)
            throw std::invalid_argument("node cannot help repair itself");
    }

    std::size_t m = static_cast<std::size_t>(plan.file_units);
    std::size_t payload_len =
        helpers.front()->packets.empty() ? 0 : helpers.front()->packets.front().payload.size();

    std::vector<CodedPacket> received;
    received.reserve(static_cast<std::size_t>(plan.d) * plan.beta_units);
    for (const NodeState* h : helpers) {
        auto rng = RngStream::stream_for(seed, event_index, static_cast<std::uint64_t>(h->id));
        for (long long j = 0; j < plan.beta_units; ++j) {
            std::vector<gf::Elem> w(h->packets.size());
            for (auto& x : w) x = rng.next_elem(f);
            received.push_back(detail::combine(f, h->packets, w, m, payload_len));
        }
    }

    RepairResult res;
    res.bandwidth_packets = static_cast<long long>(received.size());
    res.coefficient_words = res.bandwidth_packets * plan.file_units;

    res.newcomer.id = newcomer_id;
    auto rng = RngStream::stream_for(seed, event_index, static_cast<std::uint64_t>(newcomer_id));
    for (long long j = 0; j < plan.alpha_units; ++j) {
        std::vector<gf::Elem> w(received.size());
        for (auto& x : w) x = rng.next_elem(f);
        res.newcomer.packets.push_back(detail::combine(f, received, w, m, payload_len));
    }
    return res;
}

// Stack every packet of the chosen nodes and row-reduce. Decodable iff the
// combination vectors span all M_u units; the payload columns then yield the
// source words directly.
inline DecodeResult collect_and_decode(const gf::Field& f, const UnitPlan& plan,
                                       const std::vector<const NodeState*>& chosen) {
    if (static_cast<int>(chosen.size()) != plan.k)
        throw std::invalid_argument("collector reads exactly k=" + std::to_string(plan.k) +
                                    " nodes, got " + std::to_string(chosen.size()));

    std::size_t m = static_cast<std::size_t>(plan.file_units);
    std::size_t payload_len = 0;
    std::vector<CodedPacket> rows;
    for (const NodeState* node : chosen) {
        if (node == nullptr) throw std::invalid_argument("collector node is null");
        for (const auto& pkt : node->packets) {
            rows.push_back(pkt);
            payload_len = std::max(payload_len, pkt.payload.size());
        }
    }

    // Gauss-Jordan over the augmented rows [coeffs | payload].
    DecodeResult res;
    std::vector<int> pivot_row_of_col(m, -1);
    std::size_t pivots = 0;
    for (std::size_t col = 0; col < m && pivots < rows.size(); ++col) {
        std::size_t pr = pivots;
        while (pr < rows.size() && rows[pr].coeffs[col] == 0) ++pr;
        if (pr == rows.size()) continue;
        std::swap(rows[pivots], rows[pr]);

        gf::Elem inv = f.inv(rows[pivots].coeffs[col]);
        for (auto& x : rows[pivots].coeffs) x = f.mul(x, inv);
        for (auto& x : rows[pivots].payload) x = f.mul(x, inv);

        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == pivots || rows[r].coeffs[col] == 0) continue;
            gf::Elem w = rows[r].coeffs[col];
            for (std::size_t j = 0; j < m; ++j)
                rows[r].coeffs[j] = f.add(rows[r].coeffs[j], f.mul(w, rows[pivots].coeffs[j]));
            for (std::size_t j = 0; j < rows[r].payload.size(); ++j)
                rows[r].payload[j] = f.add(rows[r].payload[j], f.mul(w, rows[pivots].payload[j]));
        }
        pivot_row_of_col[col] = static_cast<int>(pivots);
        ++pivots;
    }

    res.rank = static_cast<long long>(pivots);
    res.decodable = pivots == m;
    if (res.decodable && payload_len > 0) {
        std::vector<std::vector<gf::Elem>> source(m);
        for (std::size_t col = 0; col < m; ++col)
            source[col] = rows[static_cast<std::size_t>(pivot_row_of_col[col])].payload;
        res.source = std::move(source);
    }
    return res;
}

}  // namespace regen::rlnc
