#pragma once

#include "regen/rational.hpp"

#include <stdexcept>

namespace regen {

// The (n, k, d, alpha, beta, gamma, M) tuple. n, k, d are integers; the
// amounts are exact rationals in one common base unit. gamma is always
// derived as d*beta so the identity gamma = d*beta cannot drift.
//
// Inputs with d < k are normalized to k = d (requiring any d nodes to carry
// the file is the same condition as requiring any k) and the normalization
// is recorded in k_normalized.
struct SystemParams {
    int n = 0;
    int k = 0;
    int d = 0;
    Rat file_size;  // M
    Rat alpha;      // per-node storage
    Rat beta;       // per-helper download during one repair
    bool k_normalized = false;

    Rat gamma() const { return Rat(d) * beta; }

    static SystemParams make(int n, int k, int d, Rat file_size, Rat alpha = 0, Rat beta = 0) {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
        if (d < 1 || d > n - 1) throw std::invalid_argument("d must satisfy 1 <= d <= n-1");
        if (file_size < 0 || alpha < 0 || beta < 0)
            throw std::invalid_argument("file size, alpha, beta must be nonnegative");
        SystemParams p;
        p.n = n;
        p.k = k;
        p.d = d;
        p.file_size = std::move(file_size);
        p.alpha = std::move(alpha);
        p.beta = std::move(beta);
        if (p.d < p.k) {
            p.k = p.d;
            p.k_normalized = true;
        }
        return p;
    }

    SystemParams with_alpha_beta(Rat a, Rat b) const {
        SystemParams p = *this;
        p.alpha = std::move(a);
        p.beta = std::move(b);
        return p;
    }
};

}  // namespace regen
