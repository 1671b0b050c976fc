#include "qpec/gf.hpp"

#include <algorithm>
#include <cassert>

namespace qpec {

namespace {

constexpr uint32_t kTableCap = 256;   // dense q x q op tables up to here
constexpr uint32_t kDlogCap = 4096;

// polynomial helpers over GF(p), coefficient vectors low to high
using Poly = std::vector<uint32_t>;

int degree(const Poly& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
        if (f[i] != 0) return i;
    return -1;
}

// remainder of a mod b, b monic
Poly poly_mod(Poly a, const Poly& b, uint32_t p) {
    int db = degree(b);
    for (int da = degree(a); da >= db; da = degree(a)) {
        uint32_t c = a[da];
        for (int i = 0; i <= db; ++i) {
            uint32_t t = (c * b[i]) % p;
            uint32_t& x = a[da - db + i];
            x = (x + p - t) % p;
        }
    }
    a.resize(std::max(db, 1));
    return a;
}

bool is_zero(const Poly& f) { return degree(f) < 0; }

Poly poly_from_value(uint64_t v, uint32_t p, uint32_t len) {
    Poly f(len, 0);
    for (uint32_t i = 0; i < len; ++i) {
        f[i] = static_cast<uint32_t>(v % p);
        v /= p;
    }
    return f;
}

// trial division by every monic polynomial of degree 1..k/2; a reducible
// monic polynomial of degree k has a monic factor in that range
bool is_irreducible(const Poly& f, uint32_t p, uint32_t k) {
    for (uint32_t d = 1; d <= k / 2; ++d) {
        uint64_t count = 1;
        for (uint32_t i = 0; i < d; ++i) count *= p;
        for (uint64_t v = 0; v < count; ++v) {
            Poly g = poly_from_value(v, p, d + 1);
            g[d] = 1;
            if (is_zero(poly_mod(f, g, p))) return false;
        }
    }
    return true;
}

std::vector<uint32_t> prime_factors(uint32_t n) {
    std::vector<uint32_t> fs;
    for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= n; ++d) {
        if (n % d == 0) {
            fs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

}  // namespace

Field Field::make(uint32_t q) {
    if (q < 2) throw NotPrimePower("field order must be at least 2");
    uint32_t p = 0, k = 0, n = q;
    for (uint32_t d = 2; static_cast<uint64_t>(d) * d <= n; ++d) {
        if (n % d == 0) {
            p = d;
            break;
        }
    }
    if (p == 0) p = n;  // q prime
    k = 0;
    while (n % p == 0) {
        n /= p;
        ++k;
    }
    if (n != 1)
        throw NotPrimePower("q = " + std::to_string(q) + " is not a prime power");
    if (q > (1u << 16)) throw NotPrimePower("field order above 2^16 is not supported");

    Field f;
    f.q_ = q;
    f.p_ = p;
    f.k_ = k;
    if (k == 1) {
        f.reduction_ = {0, 1};
    } else {
        // smallest monic irreducible of degree k, by base-p value of c_0..c_{k-1}
        bool found = false;
        for (uint64_t v = 0; v < q && !found; ++v) {
            Poly cand = poly_from_value(v, p, k + 1);
            cand[k] = 1;
            if (is_irreducible(cand, p, k)) {
                f.reduction_.assign(cand.begin(), cand.end());
                found = true;
            }
        }
        assert(found);
    }
    f.build_tables();

    // smallest-encoding generator of the multiplicative group
    auto factors = prime_factors(q - 1);
    f.alpha_ = 1;  // q == 2: the only nonzero element
    for (uint32_t g = 2; g < q; ++g) {
        bool gen = true;
        for (uint32_t r : factors) {
            if (f.pow(g, (q - 1) / r) == 1) {
                gen = false;
                break;
            }
        }
        if (gen) {
            f.alpha_ = g;
            break;
        }
    }

    if (q <= kDlogCap) {
        f.dlog_tab_.assign(q, 0);
        uint32_t x = 1;
        for (uint32_t j = 0; j + 1 < q; ++j) {
            f.dlog_tab_[x] = static_cast<uint16_t>(j);
            x = f.mul(x, f.alpha_);
        }
    }
    return f;
}

uint32_t Field::add_raw(uint32_t a, uint32_t b) const {
    if (k_ == 1) return (a + b) % p_;
    uint32_t out = 0, mult = 1;
    while (a != 0 || b != 0) {
        uint32_t d = (a % p_ + b % p_) % p_;
        out += d * mult;
        mult *= p_;
        a /= p_;
        b /= p_;
    }
    return out;
}

uint32_t Field::mul_raw(uint32_t a, uint32_t b) const {
    if (k_ == 1) return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % p_);
    // schoolbook product of digit vectors, then reduce
    std::vector<uint32_t> da(k_, 0), db(k_, 0), prod(2 * k_ - 1, 0);
    for (uint32_t i = 0; i < k_; ++i) {
        da[i] = a % p_;
        a /= p_;
        db[i] = b % p_;
        b /= p_;
    }
    for (uint32_t i = 0; i < k_; ++i) {
        if (da[i] == 0) continue;
        for (uint32_t j = 0; j < k_; ++j)
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    }
    for (int d = static_cast<int>(2 * k_ - 2); d >= static_cast<int>(k_); --d) {
        uint32_t c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        for (uint32_t i = 0; i < k_; ++i) {
            uint32_t t = (c * reduction_[i]) % p_;
            prod[d - k_ + i] = (prod[d - k_ + i] + p_ - t) % p_;
        }
    }
    uint32_t out = 0, mult = 1;
    for (uint32_t i = 0; i < k_; ++i) {
        out += prod[i] * mult;
        mult *= p_;
    }
    return out;
}

void Field::build_tables() {
    if (q_ > kTableCap) return;
    tabled_ = true;
    add_tab_.resize(q_ * q_);
    mul_tab_.resize(q_ * q_);
    for (uint32_t a = 0; a < q_; ++a)
        for (uint32_t b = 0; b < q_; ++b) {
            add_tab_[a * q_ + b] = static_cast<uint16_t>(add_raw(a, b));
            mul_tab_[a * q_ + b] = static_cast<uint16_t>(mul_raw(a, b));
        }
    inv_tab_.assign(q_, 0);
    for (uint32_t a = 1; a < q_; ++a)
        for (uint32_t b = 1; b < q_; ++b)
            if (mul_tab_[a * q_ + b] == 1) {
                inv_tab_[a] = static_cast<uint16_t>(b);
                break;
            }
    if (q_ <= 8) {
        const uint32_t n_masks = 1u << q_;
        translate_mask_.assign(q_ * n_masks, 0);
        scale_mask_.assign(q_ * n_masks, 0);
        for (uint32_t x = 0; x < q_; ++x)
            for (uint32_t mask = 0; mask < n_masks; ++mask) {
                uint32_t tr = 0, sc = 0;
                for (uint32_t y = 0; y < q_; ++y)
                    if ((mask >> y) & 1) {
                        tr |= 1u << add_tab_[x * q_ + y];
                        sc |= 1u << mul_tab_[x * q_ + y];
                    }
                translate_mask_[(x << q_) | mask] = static_cast<uint8_t>(tr);
                scale_mask_[(x << q_) | mask] = static_cast<uint8_t>(sc);
            }
    }
}

uint32_t Field::add(uint32_t a, uint32_t b) const {
    return tabled_ ? add_tab_[a * q_ + b] : add_raw(a, b);
}

uint32_t Field::neg(uint32_t a) const {
    if (p_ == 2) return a;
    if (k_ == 1) return (p_ - a) % p_;
    uint32_t out = 0, mult = 1, x = a;
    for (uint32_t i = 0; i < k_; ++i) {
        out += ((p_ - x % p_) % p_) * mult;
        mult *= p_;
        x /= p_;
    }
    return out;
}

uint32_t Field::sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }

uint32_t Field::mul(uint32_t a, uint32_t b) const {
    return tabled_ ? mul_tab_[a * q_ + b] : mul_raw(a, b);
}

uint32_t Field::pow(uint32_t a, uint64_t e) const {
    uint32_t out = 1, base = a;
    while (e > 0) {
        if (e & 1) out = mul(out, base);
        base = mul(base, base);
        e >>= 1;
    }
    return out;
}

uint32_t Field::inv(uint32_t a) const {
    if (a == 0) throw DivisionByZero("inverse of zero");
    if (tabled_) return inv_tab_[a];
    return pow(a, q_ - 2);
}

uint32_t Field::dlog(uint32_t a) const {
    if (a == 0) throw DivisionByZero("dlog of zero");
    if (!dlog_tab_.empty()) return dlog_tab_[a];
    uint32_t x = 1;
    for (uint32_t j = 0; j + 1 < q_; ++j) {
        if (x == a) return j;
        x = mul(x, alpha_);
    }
    throw std::logic_error("dlog: alpha is not primitive");
}

std::string Field::element_name(uint32_t a) const {
    if (a == 0) return "0";
    return "a^" + std::to_string(dlog(a));
}

}  // namespace qpec
