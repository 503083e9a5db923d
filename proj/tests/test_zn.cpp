#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "freiman/zn.hpp"

using namespace freiman;

namespace {

SubsetOfZn make_set(std::uint32_t n, std::vector<std::uint32_t> members) {
    return SubsetOfZn(CyclicGroup(n), members);
}

// every subset of Z_n, as member lists
std::vector<std::vector<std::uint32_t>> all_subsets(std::uint32_t n) {
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t x = 0; x < n; ++x)
            if (mask & (1u << x)) members.push_back(x);
        out.push_back(std::move(members));
    }
    return out;
}

}  // namespace

TEST_CASE("group arithmetic and primality") {
    CyclicGroup g7(7);
    REQUIRE(g7.prime());
    REQUIRE(g7.sub(2, 5) == 4);
    REQUIRE(g7.mul(g7.inv(3), 3) == 1);
    REQUIRE_FALSE(CyclicGroup(9).prime());
    REQUIRE_THROWS_AS(CyclicGroup(9).require_prime(), NonPrimeModulus);
    REQUIRE_THROWS_AS(CyclicGroup(2), InvalidConfig);
}

TEST_CASE("sampling endpoints and determinism") {
    CyclicGroup g7(7);
    REQUIRE(sample_subset(g7, {0.0, 123}, 0).empty());
    REQUIRE(sample_subset(g7, {1.0, 123}, 0).size() == 7);

    CyclicGroup g101(101);
    RandomModel model{0.1, 42};
    auto a = sample_subset(g101, model, 0);
    auto b = sample_subset(g101, model, 0);
    REQUIRE(a == b);
    // different trials give different substreams essentially always
    auto c = sample_subset(g101, model, 1);
    REQUIRE_FALSE(a == c);
}

TEST_CASE("difference sets") {
    auto singleton = make_set(5, {0});
    REQUIRE(difference_set(singleton).members() == std::vector<std::uint32_t>{0});

    auto sparse = make_set(7, {0, 1, 3});
    REQUIRE(difference_set(sparse).size() == 7);

    SubsetOfZn empty{CyclicGroup(7)};
    REQUIRE(difference_set(empty).empty());
}

TEST_CASE("difference set symmetry and zero membership") {
    CyclicGroup g13(13);
    RandomModel model{0.35, 7};
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        auto set = sample_subset(g13, model, trial);
        auto diff = difference_set(set);
        if (!set.empty()) REQUIRE(diff.contains(0));
        for (std::uint32_t d = 0; d < 13; ++d)
            REQUIRE(diff.contains(d) == diff.contains(g13.neg(d)));
    }
}

TEST_CASE("quadruple counts on pinned sets") {
    REQUIRE(count_additive_quadruples(make_set(7, {0, 1, 2})) == 19);
    REQUIRE(count_additive_quadruples(make_set(7, {0, 1, 3})) == 15);
    REQUIRE(count_additive_quadruples(make_set(5, {0})) == 1);
    REQUIRE(count_additive_quadruples(SubsetOfZn{CyclicGroup(7)}) == 0);

    auto quads = enumerate_additive_quadruples(make_set(7, {0, 1, 2}), true);
    REQUIRE(quads.size() == 19);
    REQUIRE(enumerate_additive_quadruples(make_set(7, {0, 1, 3}), false).empty());
    auto single = enumerate_additive_quadruples(make_set(5, {0}), true);
    REQUIRE(single == std::vector<Quadruple>{{0, 0, 0, 0}});
}

TEST_CASE("enumerate agrees with count on every subset of Z_7") {
    CyclicGroup g7(7);
    for (const auto& members : all_subsets(7)) {
        SubsetOfZn set(g7, members);
        REQUIRE(enumerate_additive_quadruples(set, true).size() == count_additive_quadruples(set));
    }
}

TEST_CASE("quadruples satisfy the defining relation and nontrivial filter") {
    auto set = make_set(13, {0, 1, 2, 5, 11});
    const auto& g = set.group();
    auto all = enumerate_additive_quadruples(set, true);
    auto nontrivial = enumerate_additive_quadruples(set, false);
    REQUIRE(nontrivial.size() < all.size());
    for (const auto& q : all) REQUIRE(g.sub(q.a, q.b) == g.sub(q.c, q.d));
    for (const auto& q : nontrivial) REQUIRE_FALSE(is_trivial_quadruple(q.a, q.b, q.c, q.d));
}

TEST_CASE("trivial quadruples number exactly 2|A|^2 - |A|") {
    CyclicGroup g(13);
    RandomModel model{0.5, 1234};
    for (std::uint64_t trial = 0; trial < 15; ++trial) {
        auto set = sample_subset(g, model, trial);
        std::uint64_t all = enumerate_additive_quadruples(set, true).size();
        std::uint64_t nontrivial = enumerate_additive_quadruples(set, false).size();
        std::uint64_t k = set.size();
        REQUIRE(all - nontrivial == 2 * k * k - k);
    }
}

TEST_CASE("quadruple count is invariant under affine maps") {
    for (std::uint32_t n : {11u, 13u}) {
        CyclicGroup g(n);
        RandomModel model{0.4, 99};
        for (std::uint64_t trial = 0; trial < 10; ++trial) {
            auto set = sample_subset(g, model, trial);
            std::uint64_t base = count_additive_quadruples(set);
            for (std::uint32_t t : {1u, 2u, n - 1}) {
                auto image = set.affine_image(t, trial % n);
                REQUIRE(count_additive_quadruples(image) == base);
            }
        }
    }
}
