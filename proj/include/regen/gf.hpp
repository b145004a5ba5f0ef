#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace regen::gf {

// Binary extension fields used by the coding engine.
//
// GF(2^8): reduction polynomial x^8+x^4+x^3+x^2+1 (0x11D)
// GF(2^16): reduction polynomial x^16+x^12+x^3+x+1 (0x1100B)
//
// x is a primitive element under both polynomials, so multiplication runs
// through log/antilog tables built once at first use. Addition is xor.
// Field objects are immutable after construction and safe to share across
// threads.

using Elem = std::uint16_t;

class Field {
public:
    static const Field& gf256() {
        static const Field f(8, 0x11D);
        return f;
    }
    static const Field& gf65536() {
        static const Field f(16, 0x1100B);
        return f;
    }
    static const Field& with_bits(unsigned bits) {
        if (bits == 8) return gf256();
        if (bits == 16) return gf65536();
        throw std::invalid_argument("unsupported field: GF(2^" + std::to_string(bits) + ")");
    }

    unsigned bits() const { return bits_; }
    std::uint32_t order() const { return order_; }
    std::uint32_t reduction_poly() const { return poly_; }

    Elem add(Elem x, Elem y) const { return x ^ y; }

    Elem mul(Elem x, Elem y) const {
        if (x == 0 || y == 0) return 0;
        return exp_[log_[x] + log_[y]];
    }

    Elem inv(Elem x) const {
        if (x == 0) throw std::domain_error("inverse of zero");
        return exp_[order_ - 1 - log_[x]];
    }

    Elem div(Elem x, Elem y) const { return mul(x, inv(y)); }

    // Uniform element from a 64-bit random word.
    Elem from_word(std::uint64_t w) const { return static_cast<Elem>(w & (order_ - 1)); }

private:
    Field(unsigned bits, std::uint32_t poly) : bits_(bits), order_(1u << bits), poly_(poly) {
        log_.assign(order_, 0);
        exp_.assign(2 * (order_ - 1), 0);
        std::uint32_t v = 1;
        for (std::uint32_t i = 0; i < order_ - 1; ++i) {
            exp_[i] = static_cast<Elem>(v);
            exp_[i + order_ - 1] = static_cast<Elem>(v);
            log_[v] = i;
            v <<= 1;
            if (v & order_) v ^= poly_;
        }
        // x must be primitive for the table scheme to cover every element.
        assert(v == 1);
    }

    unsigned bits_;
    std::uint32_t order_;
    std::uint32_t poly_;
    std::vector<std::uint32_t> log_;
    std::vector<Elem> exp_;
};

// Dense row-major matrix over a Field. Values are immutable from the outside
// except through set(); all algorithms work on copies.
class Matrix {
public:
    Matrix(const Field& f, std::size_t rows, std::size_t cols)
        : field_(&f), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    static Matrix identity(const Field& f, std::size_t n) {
        Matrix m(f, n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    const Field& field() const { return *field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Elem get(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, Elem v) { a_[r * cols_ + c] = v; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Matrix operator*(const Matrix& rhs) const {
        if (cols_ != rhs.rows_) throw std::invalid_argument("matrix shape mismatch");
        const Field& f = *field_;
        Matrix out(f, rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t l = 0; l < cols_; ++l) {
                Elem x = get(i, l);
                if (x == 0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) {
                    Elem p = f.mul(x, rhs.get(l, j));
                    out.set(i, j, out.get(i, j) ^ p);
                }
            }
        }
        return out;
    }

    // Row rank by forward elimination.
    std::size_t rank() const {
        Matrix m = *this;
        const Field& f = *field_;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t pivot = r;
            while (pivot < rows_ && m.get(pivot, c) == 0) ++pivot;
            if (pivot == rows_) continue;
            m.swap_rows(pivot, r);
            Elem piv_inv = f.inv(m.get(r, c));
            for (std::size_t i = r + 1; i < rows_; ++i) {
                Elem factor = f.mul(m.get(i, c), piv_inv);
                if (factor == 0) continue;
                for (std::size_t j = c; j < cols_; ++j)
                    m.set(i, j, m.get(i, j) ^ f.mul(factor, m.get(r, j)));
            }
            ++r;
        }
        return r;
    }

    // Gauss-Jordan solve of this * x = rhs. nullopt when singular.
    std::optional<Matrix> solve(const Matrix& rhs) const {
        if (rows_ != cols_) throw std::invalid_argument("solve needs a square matrix");
        if (rhs.rows_ != rows_) throw std::invalid_argument("rhs row mismatch");
        const Field& f = *field_;
        Matrix m = *this;
        Matrix x = rhs;
        for (std::size_t c = 0; c < cols_; ++c) {
            std::size_t pivot = c;
            while (pivot < rows_ && m.get(pivot, c) == 0) ++pivot;
            if (pivot == rows_) return std::nullopt;
            m.swap_rows(pivot, c);
            x.swap_rows(pivot, c);
            Elem piv_inv = f.inv(m.get(c, c));
            for (std::size_t j = 0; j < cols_; ++j) m.set(c, j, f.mul(m.get(c, j), piv_inv));
            for (std::size_t j = 0; j < x.cols_; ++j) x.set(c, j, f.mul(x.get(c, j), piv_inv));
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == c) continue;
                Elem factor = m.get(i, c);
                if (factor == 0) continue;
                for (std::size_t j = 0; j < cols_; ++j)
                    m.set(i, j, m.get(i, j) ^ f.mul(factor, m.get(c, j)));
                for (std::size_t j = 0; j < x.cols_; ++j)
                    x.set(i, j, x.get(i, j) ^ f.mul(factor, x.get(c, j)));
            }
        }
        return x;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) {
            Elem t = get(a, j);
            set(a, j, get(b, j));
            set(b, j, t);
        }
    }

private:
    const Field* field_;
    std::size_t rows_, cols_;
    std::vector<Elem> a_;
};

}  // namespace regen::gf
