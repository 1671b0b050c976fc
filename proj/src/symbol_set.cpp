#include "qpec/symbol_set.hpp"

#include <algorithm>

#include "qpec/combinatorics.hpp"

namespace qpec {

namespace {
uint64_t binom(int n, int k) { return binomial(n, k); }
}  // namespace

std::vector<uint32_t> SymbolSet::elements() const {
    std::vector<uint32_t> out;
    uint64_t m = mask_;
    while (m) {
        out.push_back(static_cast<uint32_t>(__builtin_ctzll(m)));
        m &= m - 1;
    }
    return out;
}

std::string SymbolSet::to_string() const {
    std::string s = "{";
    bool first = true;
    for (uint32_t x : elements()) {
        if (!first) s += ",";
        s += field_->element_name(x);
        first = false;
    }
    return s + "}";
}

uint64_t scale_mask(const Field& f, uint64_t mask, uint32_t h) {
    if (f.has_mask_kernels()) return f.scale_whole_mask(h, mask);
    uint64_t out = 0;
    while (mask) {
        uint32_t x = static_cast<uint32_t>(__builtin_ctzll(mask));
        mask &= mask - 1;
        out |= uint64_t{1} << f.mul(h, x);
    }
    return out;
}

uint64_t sumset_mask(const Field& f, uint64_t a, uint64_t b) {
    if (f.has_mask_kernels()) {
        if (__builtin_popcountll(a) > __builtin_popcountll(b)) std::swap(a, b);
        uint64_t out = 0;
        while (a) {
            const uint32_t x = static_cast<uint32_t>(__builtin_ctzll(a));
            a &= a - 1;
            out |= f.translate_mask(x, b);
        }
        return out;
    }
    uint64_t out = 0;
    while (a) {
        uint32_t x = static_cast<uint32_t>(__builtin_ctzll(a));
        a &= a - 1;
        uint64_t bb = b;
        while (bb) {
            uint32_t y = static_cast<uint32_t>(__builtin_ctzll(bb));
            bb &= bb - 1;
            out |= uint64_t{1} << f.add(x, y);
        }
    }
    return out;
}

SymbolSet scale(const SymbolSet& set, uint32_t h) {
    if (h == 0) throw ZeroScalar("scaling a set by zero");
    return {set.field(), scale_mask(set.field(), set.mask(), h)};
}

SymbolSet sumset(const SymbolSet& a, const SymbolSet& b) {
    return {a.field(), sumset_mask(a.field(), a.mask(), b.mask())};
}

SymbolSet intersect(const SymbolSet& a, const SymbolSet& b) {
    return {a.field(), a.mask() & b.mask()};
}

uint64_t index_of(const SymbolSet& set) {
    if (set.empty()) throw EmptySet("cannot index the empty set");
    const int q = static_cast<int>(set.field().q());
    const auto elems = set.elements();
    const int c = static_cast<int>(elems.size());
    uint64_t t = 1;
    for (int cc = 1; cc < c; ++cc) t += binom(q, cc);
    // lexicographic rank of the sorted combination
    int prev = -1;
    for (int i = 0; i < c; ++i) {
        for (int v = prev + 1; v < static_cast<int>(elems[i]); ++v)
            t += binom(q - 1 - v, c - 1 - i);
        prev = static_cast<int>(elems[i]);
    }
    return t;
}

SymbolSet set_of(const Field& f, uint64_t t) {
    const int q = static_cast<int>(f.q());
    const uint64_t total = (q == 64) ? ~uint64_t{0} : (uint64_t{1} << q) - 1;
    if (t < 1 || t > total)
        throw EmptySet("subset index out of range");
    int c = 1;
    uint64_t rank = t - 1;
    while (rank >= binom(q, c)) {
        rank -= binom(q, c);
        ++c;
    }
    uint64_t mask = 0;
    int v = 0;
    for (int i = 0; i < c; ++i) {
        while (rank >= binom(q - 1 - v, c - 1 - i)) {
            rank -= binom(q - 1 - v, c - 1 - i);
            ++v;
        }
        mask |= uint64_t{1} << v;
        ++v;
    }
    return {f, mask};
}

}  // namespace qpec
