#pragma once

#include "regen/params.hpp"
#include "regen/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Closed-form feasible region of the storage / repair-bandwidth tradeoff,
// plus an independent numeric route that inverts the piecewise-linear cut
// capacity at the file size. Everything is exact rational arithmetic.

namespace regen::tradeoff {

enum class Regime { Msr, Mbr, Interior, Infeasible };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Msr: return "MSR";
        case Regime::Mbr: return "MBR";
        case Regime::Interior: return "interior";
        case Regime::Infeasible: return "infeasible";
    }
    return "?";
}

struct TradeoffPoint {
    Rat alpha;
    Rat gamma;
    Regime regime = Regime::Interior;
};

// f(i) = 2Md / ((2k-i-1)i + 2k(d-k+1)); the bandwidth breakpoints of the
// threshold function.
inline Rat f_break(const SystemParams& p, int i) {
    if (i < 0 || i > p.k - 1) throw std::out_of_range("f_break: i outside [0, k-1]");
    Rat num = 2 * p.file_size * p.d;
    Rat den = Rat((2 * p.k - i - 1)) * i + Rat(2 * p.k) * (p.d - p.k + 1);
    return num / den;
}

// g(i) = (2d-2k+i+1)i / 2d.
inline Rat g_break(const SystemParams& p, int i) {
    if (i < 0 || i > p.k - 1) throw std::out_of_range("g_break: i outside [0, k-1]");
    return Rat((2 * p.d - 2 * p.k + i + 1)) * i / Rat(2 * p.d);
}

// gamma_min = f(k-1) = 2Md / (2kd - k^2 + k).
inline Rat gamma_min(const SystemParams& p) {
    return 2 * p.file_size * p.d / Rat(2 * p.k * p.d - p.k * p.k + p.k);
}

// Threshold function alpha*(d, gamma). Branch i covers gamma in
// [f(i), f(i-1)); at gamma == f(i) the lower-storage branch applies.
// nullopt means gamma < gamma_min (no storage amount is feasible).
inline std::optional<Rat> threshold_alpha(const SystemParams& p, const Rat& gamma) {
    if (gamma < gamma_min(p)) return std::nullopt;
    if (gamma >= f_break(p, 0)) return p.file_size / p.k;
    for (int i = 1; i <= p.k - 1; ++i) {
        if (gamma >= f_break(p, i))
            return (p.file_size - g_break(p, i) * gamma) / Rat(p.k - i);
    }
    return std::nullopt;  // unreachable: gamma >= gamma_min == f(k-1)
}

// The cut-capacity function C(alpha) = sum_i min(b_i, alpha) with
// b_i = (1 - (k-1-i)/d) * gamma, nondecreasing in i.
struct PiecewiseCapacity {
    std::vector<Rat> breakpoints;

    static PiecewiseCapacity from(const SystemParams& p, const Rat& gamma) {
        PiecewiseCapacity pc;
        pc.breakpoints.reserve(p.k);
        for (int i = 0; i < p.k; ++i)
            pc.breakpoints.push_back((Rat(1) - Rat(p.k - 1 - i) / p.d) * gamma);
        return pc;
    }

    Rat max_value() const {
        Rat s = 0;
        for (const auto& b : breakpoints) s += b;
        return s;
    }

    Rat value_at(const Rat& alpha) const {
        Rat s = 0;
        for (const auto& b : breakpoints) s += b < alpha ? b : alpha;
        return s;
    }

    // Smallest alpha with C(alpha) >= target; nullopt when even saturating
    // every breakpoint falls short.
    std::optional<Rat> invert(const Rat& target) const {
        if (target <= 0) return Rat(0);
        Rat prefix = 0;
        int k = static_cast<int>(breakpoints.size());
        for (int i = 0; i < k; ++i) {
            Rat candidate = (target - prefix) / Rat(k - i);
            if (candidate <= breakpoints[i]) return candidate;
            prefix += breakpoints[i];
        }
        return std::nullopt;
    }
};

// Numeric route to the same threshold: build C(alpha), check sum(b_i) >= M,
// walk the breakpoints to invert C at M. Kept independent of
// threshold_alpha as a cross-check oracle.
inline std::optional<Rat> threshold_alpha_numeric(const SystemParams& p, const Rat& gamma) {
    if (gamma <= 0) throw std::invalid_argument("threshold_alpha_numeric: gamma must be > 0");
    auto pc = PiecewiseCapacity::from(p, gamma);
    if (pc.max_value() < p.file_size) return std::nullopt;
    return pc.invert(p.file_size);
}

// Minimum-storage corner: (M/k, Md/(k(d-k+1))).
inline TradeoffPoint msr_point(const SystemParams& p) {
    TradeoffPoint t;
    t.alpha = p.file_size / p.k;
    t.gamma = p.file_size * p.d / (Rat(p.k) * (p.d - p.k + 1));
    t.regime = Regime::Msr;
    return t;
}

// Minimum-bandwidth corner: alpha = gamma = 2Md/(2kd - k^2 + k).
inline TradeoffPoint mbr_point(const SystemParams& p) {
    TradeoffPoint t;
    t.alpha = gamma_min(p);
    t.gamma = t.alpha;
    t.regime = Regime::Mbr;
    return t;
}

// Repair-traffic overhead of a minimum-storage code relative to the
// fragment size: (n-1)/(n-k), at d = n-1.
inline Rat delta_msr(int n, int k) {
    if (n <= k) throw std::invalid_argument("delta_msr: need n > k");
    return Rat(n - 1) / (n - k);
}

// Same overhead for a minimum-bandwidth code: 2(n-1)/(2n-k-1).
inline Rat delta_mbr(int n, int k) {
    if (n <= k) throw std::invalid_argument("delta_mbr: need n > k");
    return Rat(2 * (n - 1)) / (2 * n - k - 1);
}

// Maintenance-bandwidth factor n(n-1)/(k(n-k)) of a minimum-storage code.
inline Rat msr_bandwidth_factor(int n, int k) {
    if (n <= k) throw std::invalid_argument("msr_bandwidth_factor: need n > k");
    return Rat(n) * (n - 1) / (Rat(k) * (n - k));
}

// The n minimizing the maintenance-bandwidth factor: one of the two
// integers bracketing k + sqrt(k^2 - k), ties broken toward the smaller n.
inline int n_opt(int k) {
    if (k < 1) throw std::invalid_argument("n_opt: k must be >= 1");
    BigInt disc = BigInt(k) * k - k;
    BigInt root = boost::multiprecision::sqrt(disc);  // floor sqrt
    long long lo = k + root.convert_to<long long>();
    if (lo < k + 1) lo = k + 1;
    long long hi = lo + 1;
    Rat flo = msr_bandwidth_factor(static_cast<int>(lo), k);
    Rat fhi = msr_bandwidth_factor(static_cast<int>(hi), k);
    return static_cast<int>(fhi < flo ? hi : lo);
}

// Capacity of the (n, k, d, alpha, beta) system:
// sum_{i=0}^{min(d,k)-1} min((d-i) beta, alpha).
inline Rat capacity(const SystemParams& p) {
    Rat s = 0;
    int terms = p.d < p.k ? p.d : p.k;
    for (int i = 0; i < terms; ++i) {
        Rat flow = Rat(p.d - i) * p.beta;
        s += flow < p.alpha ? flow : p.alpha;
    }
    return s;
}

}  // namespace regen::tradeoff
