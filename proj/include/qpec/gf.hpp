#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpec/errors.hpp"

namespace qpec {

/// Arithmetic context for GF(q), q = p^k a prime power, q <= 2^16.
///
/// Elements are encoded as integers in [0, q): the coefficient vector of the
/// polynomial representation read as a base-p number (for k = 1 the residue
/// itself). This encoding induces the canonical element order used everywhere
/// for lexicographic set indexing. The reduction polynomial is the
/// lexicographically smallest monic irreducible of degree k over GF(p)
/// (coefficients c_0..c_{k-1} read as a base-p integer), so element encodings
/// are reproducible across runs and implementations. alpha is the smallest
/// encoding that generates the multiplicative group.
class Field {
  public:
    static Field make(uint32_t q);

    uint32_t q() const { return q_; }
    uint32_t p() const { return p_; }
    uint32_t k() const { return k_; }
    uint32_t alpha() const { return alpha_; }

    /// Coefficients c_0..c_k (low to high, monic). For k = 1 this is the
    /// placeholder polynomial x, i.e. {0, 1}.
    const std::vector<uint32_t>& reduction_polynomial() const { return reduction_; }

    uint32_t add(uint32_t a, uint32_t b) const;
    uint32_t sub(uint32_t a, uint32_t b) const;
    uint32_t neg(uint32_t a) const;
    uint32_t mul(uint32_t a, uint32_t b) const;
    uint32_t inv(uint32_t a) const;
    uint32_t pow(uint32_t a, uint64_t e) const;

    /// j with alpha^j == a, for a != 0. Available for q <= 4096.
    uint32_t dlog(uint32_t a) const;

    /// Element rendering: "0", "a^0", "a^1", ... (a = alpha).
    std::string element_name(uint32_t a) const;

    bool operator==(const Field& other) const { return q_ == other.q_; }

  private:
    Field() = default;
    void build_tables();

    uint32_t add_raw(uint32_t a, uint32_t b) const;
    uint32_t mul_raw(uint32_t a, uint32_t b) const;

    uint32_t q_ = 0, p_ = 0, k_ = 0, alpha_ = 0;
    std::vector<uint32_t> reduction_;
    // dense tables for small fields, digit arithmetic otherwise
    bool tabled_ = false;
    std::vector<uint16_t> add_tab_, mul_tab_, inv_tab_;
    std::vector<uint16_t> dlog_tab_;
    // whole-set kernels for q <= 8: masks of {x + y : y in m} and {h y : y in m}
    std::vector<uint8_t> translate_mask_, scale_mask_;

  public:
    bool has_mask_kernels() const { return !translate_mask_.empty(); }
    uint64_t translate_mask(uint32_t x, uint64_t mask) const {
        return translate_mask_[(x << q_) | mask];
    }
    uint64_t scale_whole_mask(uint32_t h, uint64_t mask) const {
        return scale_mask_[(h << q_) | mask];
    }
};

}  // namespace qpec
