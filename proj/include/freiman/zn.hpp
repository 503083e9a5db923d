#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "freiman/errors.hpp"

namespace freiman {

/// Largest supported modulus; subsets are packed bit arrays of this many bits at most.
inline constexpr std::uint32_t kMaxModulus = 1u << 20;

namespace detail {

// splitmix64 step; the output stream is the RNG used for all sampling.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Mixes a master seed with a trial index into an independent substream seed.
// Trials are order-insensitive: the substream depends only on the pair.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (trial + 1));
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b << 1);
}

// Uniform double in [0, 1) from 53 high bits; identical on every platform.
inline double to_unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Z_N with the arithmetic every other component builds on.  N >= 3; a primality
/// flag is computed once so field-only operations can check it cheaply.
class CyclicGroup {
  public:
    explicit CyclicGroup(std::uint32_t modulus) : n_(modulus) {
        if (modulus < 3) throw InvalidConfig("modulus must be at least 3");
        if (modulus > kMaxModulus) throw TooLarge("modulus exceeds the configured cap");
        prime_ = is_prime(modulus);
    }

    std::uint32_t modulus() const { return n_; }
    bool prime() const { return prime_; }

    void require_prime() const {
        if (!prime_) throw NonPrimeModulus("operation requires a prime modulus");
    }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t s = a + b;
        return s >= n_ ? s - n_ : s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        return a >= b ? a - b : a + n_ - b;
    }
    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : n_ - a; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % n_);
    }
    std::uint32_t reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(n_);
        if (r < 0) r += n_;
        return static_cast<std::uint32_t>(r);
    }

    /// Modular inverse by Fermat; requires a prime modulus and a != 0.
    std::uint32_t inv(std::uint32_t a) const {
        require_prime();
        std::uint32_t result = 1, base = a % n_, e = n_ - 2;
        while (e > 0) {
            if (e & 1) result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }

    bool operator==(const CyclicGroup& other) const { return n_ == other.n_; }

    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

  private:
    std::uint32_t n_;
    bool prime_;
};

/// A subset of Z_N, immutable after construction.  Membership is O(1) through a
/// packed bit array; the sorted member list is materialized once.
class SubsetOfZn {
  public:
    explicit SubsetOfZn(CyclicGroup group) : group_(group), bits_((group.modulus() + 63) / 64, 0) {}

    SubsetOfZn(CyclicGroup group, const std::vector<std::uint32_t>& members)
        : SubsetOfZn(group) {
        for (std::uint32_t m : members) {
            if (m >= group_.modulus()) throw InvalidConfig("member out of range");
            insert_bit(m);
        }
        rebuild_members();
    }

    static SubsetOfZn full(CyclicGroup group) {
        SubsetOfZn s(group);
        for (std::uint32_t x = 0; x < group.modulus(); ++x) s.insert_bit(x);
        s.rebuild_members();
        return s;
    }

    const CyclicGroup& group() const { return group_; }
    std::uint32_t modulus() const { return group_.modulus(); }
    std::uint32_t size() const { return static_cast<std::uint32_t>(members_.size()); }
    bool empty() const { return members_.empty(); }

    bool contains(std::uint32_t x) const {
        return (bits_[x >> 6] >> (x & 63)) & 1ull;
    }

    /// Sorted ascending.
    const std::vector<std::uint32_t>& members() const { return members_; }

    /// { t*a + s : a in A }; t must be a unit when N is prime and t != 0.
    SubsetOfZn affine_image(std::uint32_t t, std::uint32_t s) const {
        SubsetOfZn out(group_);
        for (std::uint32_t a : members_)
            out.insert_bit(group_.add(group_.mul(t, a), s));
        out.rebuild_members();
        return out;
    }

    bool operator==(const SubsetOfZn& other) const {
        return group_ == other.group_ && bits_ == other.bits_;
    }

  private:
    friend SubsetOfZn sample_subset(const CyclicGroup&, const struct RandomModel&, std::uint64_t);
    friend SubsetOfZn difference_set(const SubsetOfZn&);

    void insert_bit(std::uint32_t x) { bits_[x >> 6] |= 1ull << (x & 63); }
    void rebuild_members() {
        members_.clear();
        for (std::uint32_t x = 0; x < group_.modulus(); ++x)
            if (contains(x)) members_.push_back(x);
    }

    CyclicGroup group_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> members_;
};

/// Bernoulli(p) inclusion model with a master seed; trial substreams are derived
/// deterministically, so (N, p, master_seed, trial_index) pins the subset exactly.
struct RandomModel {
    double density = 0.0;
    std::uint64_t master_seed = 0;
};

inline SubsetOfZn sample_subset(const CyclicGroup& group, const RandomModel& model,
                                std::uint64_t trial_index) {
    if (model.density < 0.0 || model.density > 1.0)
        throw InvalidConfig("density must lie in [0, 1]");
    std::uint64_t state = detail::mix_seed(model.master_seed, trial_index);
    SubsetOfZn out(group);
    for (std::uint32_t x = 0; x < group.modulus(); ++x) {
        double u = detail::to_unit_interval(detail::splitmix64_next(state));
        if (u < model.density) out.insert_bit(x);
    }
    out.rebuild_members();
    return out;
}

/// { a - a' : a, a' in A }.
inline SubsetOfZn difference_set(const SubsetOfZn& a) {
    SubsetOfZn out(a.group());
    const auto& mem = a.members();
    for (std::uint32_t x : mem)
        for (std::uint32_t y : mem) out.insert_bit(a.group().sub(x, y));
    out.rebuild_members();
    return out;
}

struct Quadruple {
    std::uint32_t a, b, c, d;
    bool operator==(const Quadruple&) const = default;
};

/// A quadruple with a - b = c - d carries no constraint when {a, d} = {c, b}
/// as multisets.
inline bool is_trivial_quadruple(std::uint32_t a, std::uint32_t b, std::uint32_t c,
                                 std::uint32_t d) {
    return (a == c && d == b) || (a == b && d == c);
}

/// All ordered (a, b, c, d) in A^4 with a - b = c - d (mod N); iterates (a, b, c)
/// and tests membership of d = c - a + b.
inline std::vector<Quadruple> enumerate_additive_quadruples(const SubsetOfZn& set,
                                                            bool include_trivial) {
    std::vector<Quadruple> out;
    const auto& g = set.group();
    const auto& mem = set.members();
    for (std::uint32_t a : mem)
        for (std::uint32_t b : mem)
            for (std::uint32_t c : mem) {
                std::uint32_t d = g.add(g.sub(c, a), b);
                if (!set.contains(d)) continue;
                if (!include_trivial && is_trivial_quadruple(a, b, c, d)) continue;
                out.push_back({a, b, c, d});
            }
    return out;
}

/// Number of additive quadruples, trivial ones included; O(N + |A|^3).
inline std::uint64_t count_additive_quadruples(const SubsetOfZn& set) {
    std::uint64_t count = 0;
    const auto& g = set.group();
    const auto& mem = set.members();
    for (std::uint32_t a : mem)
        for (std::uint32_t b : mem)
            for (std::uint32_t c : mem)
                if (set.contains(g.add(g.sub(c, a), b))) ++count;
    return count;
}

}  // namespace freiman
