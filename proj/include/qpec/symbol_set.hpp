#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "qpec/errors.hpp"
#include "qpec/gf.hpp"

namespace qpec {

/// Subset of GF(q), q <= 64, stored as a bit mask over the canonical element
/// encodings. Decoder messages and channel outputs are SymbolSets; density
/// evolution indexes the non-empty ones by t in [1, 2^q - 1], ordered by
/// cardinality with ties broken lexicographically on the sorted element
/// encodings.
class SymbolSet {
  public:
    SymbolSet(const Field& f, uint64_t mask) : field_(&f), mask_(mask) {
        if (f.q() > 64) throw std::invalid_argument("symbol sets support q <= 64");
    }

    static SymbolSet empty_set(const Field& f) { return {f, 0}; }
    static SymbolSet singleton(const Field& f, uint32_t x) { return {f, uint64_t{1} << x}; }
    static SymbolSet full(const Field& f) {
        return {f, f.q() == 64 ? ~uint64_t{0} : (uint64_t{1} << f.q()) - 1};
    }
    static SymbolSet of(const Field& f, std::initializer_list<uint32_t> xs) {
        uint64_t m = 0;
        for (uint32_t x : xs) m |= uint64_t{1} << x;
        return {f, m};
    }

    const Field& field() const { return *field_; }
    uint64_t mask() const { return mask_; }
    int cardinality() const { return __builtin_popcountll(mask_); }
    bool empty() const { return mask_ == 0; }
    bool contains(uint32_t x) const { return (mask_ >> x) & 1; }

    std::vector<uint32_t> elements() const;
    std::string to_string() const;  // "{0,a^0,a^1}"

    bool operator==(const SymbolSet& o) const { return mask_ == o.mask_; }
    bool operator!=(const SymbolSet& o) const { return mask_ != o.mask_; }

  private:
    const Field* field_;
    uint64_t mask_;
};

/// {h*s : s in set}; h must be nonzero, so cardinality is preserved.
SymbolSet scale(const SymbolSet& set, uint32_t h);

/// Minkowski sum {s_a + s_b : s_a in a, s_b in b}.
SymbolSet sumset(const SymbolSet& a, const SymbolSet& b);

SymbolSet intersect(const SymbolSet& a, const SymbolSet& b);

/// Canonical index t in [1, 2^q - 1] of a non-empty set.
uint64_t index_of(const SymbolSet& set);

/// Inverse of index_of.
SymbolSet set_of(const Field& f, uint64_t t);

// mask-level kernels (shared with the decoder hot path)
uint64_t scale_mask(const Field& f, uint64_t mask, uint32_t h);
uint64_t sumset_mask(const Field& f, uint64_t a, uint64_t b);

}  // namespace qpec
