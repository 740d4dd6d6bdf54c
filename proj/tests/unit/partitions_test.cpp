#include "aoiseq/error.hpp"
#include "aoiseq/partitions.hpp"
#include "power_series.hpp"

#include <doctest.h>

#include <map>
#include <numeric>
#include <random>

using namespace aoiseq;

namespace {

std::vector<std::int64_t> random_distances(std::mt19937_64& rng, int w)
{
    std::uniform_int_distribution<std::int64_t> gap(1, 9);
    std::vector<std::int64_t> d(static_cast<std::size_t>(w));
    for (auto& x : d)
        x = gap(rng);
    return d;
}

} // namespace

TEST_CASE("enumerate partitions")
{
    CHECK(enumerate_partitions(3, 3) == std::vector<PartitionVector>{{3, 3, {3, 0, 0}}});
    CHECK(enumerate_partitions(3, 2) == std::vector<PartitionVector>{{3, 2, {1, 1, 0}}});
    const auto six = enumerate_partitions(6, 3);
    REQUIRE(six.size() == 3);
    CHECK(six[0].counts == std::vector<int>{2, 0, 0, 1, 0, 0});
    CHECK(six[1].counts == std::vector<int>{1, 1, 1, 0, 0, 0});
    CHECK(six[2].counts == std::vector<int>{0, 3, 0, 0, 0, 0});
    CHECK_THROWS_AS(enumerate_partitions(3, 4), Error);
    CHECK_THROWS_AS(enumerate_partitions(3, 0), Error);

    for (int w = 1; w <= 12; ++w)
        for (int r = 1; r <= w; ++r)
            for (const auto& c : enumerate_partitions(w, r)) {
                int parts = 0, total = 0;
                for (int j = 1; j <= w; ++j) {
                    parts += c.count_of(j);
                    total += j * c.count_of(j);
                }
                CHECK(parts == r);
                CHECK(total == w);
            }
}

TEST_CASE("pre-image counts")
{
    CHECK(preimage_count({3, 3, {3, 0, 0}}) == 1);
    CHECK(preimage_count({3, 2, {1, 1, 0}}) == 3);
    CHECK(preimage_count({4, 2, {0, 2, 0, 0}}) == 2);
    for (int w = 1; w <= 12; ++w)
        for (int r = 1; r <= w; ++r) {
            BigInt total = 0;
            for (const auto& c : enumerate_partitions(w, r))
                total += preimage_count(c);
            CHECK(total == binomial(w, r));
        }
}

TEST_CASE("theta and sf-words")
{
    CHECK(theta(SfWord::parse("sfs")).counts == std::vector<int>{1, 1, 0});
    CHECK(theta(SfWord::parse("sss")).counts == std::vector<int>{3, 0, 0});
    CHECK(theta(SfWord::parse("sfff")).counts == std::vector<int>{0, 0, 0, 1});
    CHECK_THROWS_AS(theta(SfWord::parse("fff")), Error);
    CHECK_THROWS_AS(SfWord::parse("sx"), Error);
    CHECK(SfWord::parse("sfs").str() == "sfs");

    CHECK(enumerate_sf_words(3, 2).size() == 3);
    CHECK(enumerate_sf_words(3, 3).size() == 1);
    CHECK(enumerate_sf_words(5, 2).size() == 10);

    // theta is onto and its fibres have the pre-image sizes
    for (int w = 1; w <= 9; ++w)
        for (int r = 1; r <= w; ++r) {
            std::map<std::vector<int>, BigInt> fibre;
            for (const auto& e : enumerate_sf_words(w, r))
                fibre[theta(e).counts] += 1;
            for (const auto& c : enumerate_partitions(w, r)) {
                REQUIRE(fibre.contains(c.counts));
                CHECK(fibre[c.counts] == preimage_count(c));
            }
            CHECK(fibre.size() == enumerate_partitions(w, r).size());
        }
}

TEST_CASE("zeta and event distances")
{
    const std::vector<std::int64_t> l{7, 4, 4};
    CHECK(zeta(l, 0, 3) == 15);
    CHECK(zeta(l, 1, 1) == 4);
    CHECK(zeta(l, 2, 2) == 11);
    CHECK_THROWS_AS(zeta(l, 3, 1), Error);
    CHECK_THROWS_AS(zeta(l, 0, 4), Error);
    CHECK(event_distances(SfWord::parse("sfs"), l) == std::vector<std::int64_t>{11, 4});
    CHECK(event_distances(SfWord::parse("sss"), l) == l);
    CHECK(event_distances(SfWord::parse("sff"), l) == std::vector<std::int64_t>{15});

    std::mt19937_64 rng(9);
    for (int w = 1; w <= 8; ++w) {
        const auto d = random_distances(rng, w);
        const auto L = std::accumulate(d.begin(), d.end(), std::int64_t{0});
        for (int r = 1; r <= w; ++r)
            for (const auto& e : enumerate_sf_words(w, r)) {
                const auto gaps = event_distances(e, d);
                CHECK(gaps.size() == static_cast<std::size_t>(r));
                CHECK(std::accumulate(gaps.begin(), gaps.end(), std::int64_t{0}) == L);
            }
    }
}

TEST_CASE("b values")
{
    const std::vector<std::int64_t> l{7, 4, 4};
    CHECK(b_values<std::int64_t>([](std::int64_t x) { return x; }, l) == std::vector<std::int64_t>{15, 30, 45});
    CHECK(b_values<std::int64_t>([](std::int64_t) { return 1; }, l) == std::vector<std::int64_t>{3, 3, 3});
    CHECK(b_values<std::int64_t>([](std::int64_t x) { return x * x; }, l)[0] == 81);
}

TEST_CASE("closed-form event sum equals brute force")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        for (int w = 1; w <= 8; ++w) {
            const auto d = random_distances(rng, w);
            const auto L = std::accumulate(d.begin(), d.end(), std::int64_t{0});
            // integer-valued score table over 1..L
            std::uniform_int_distribution<std::int64_t> value(-1000, 1000);
            std::vector<BigInt> table(static_cast<std::size_t>(L + 1));
            for (auto& v : table)
                v = value(rng);
            auto score = [&](std::int64_t x) { return table[static_cast<std::size_t>(x)]; };
            const auto b = b_values<BigInt>(score, d);
            for (int r = 1; r <= w; ++r) {
                BigInt brute = 0;
                for (const auto& e : enumerate_sf_words(w, r))
                    for (auto gap : event_distances(e, d))
                        brute += score(gap);
                CHECK(partition_event_sum<BigInt>(w, r, b) == brute);
            }
        }
    }
}

TEST_CASE("closed-form event sum equals the series coefficient")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> value(-50, 50);
    for (int w = 1; w <= 8; ++w) {
        std::vector<Rational> b(static_cast<std::size_t>(w));
        for (auto& x : b)
            x = value(rng);
        for (int r = 1; r <= w; ++r) {
            const Rational series = testing::power_series_coefficient(w, r, b) * factorial(r - 1);
            CHECK(partition_event_sum<Rational>(w, r, b) == series);

            // partition form of the same quantity
            Rational by_partition = 0;
            for (const auto& c : enumerate_partitions(w, r)) {
                Rational inner = 0;
                for (int j = 1; j <= w; ++j)
                    inner += c.count_of(j) * b[static_cast<std::size_t>(j - 1)];
                by_partition += Rational(preimage_count(c), w) * inner;
            }
            CHECK(by_partition == series);
        }
    }
}

TEST_CASE("event sum small cases")
{
    const std::vector<double> b{1.5, 2.25, 4.0};
    CHECK(partition_event_sum<double>(3, 1, b) == doctest::Approx(4.0));
    CHECK(partition_event_sum<double>(3, 2, b) == doctest::Approx(3.75));
    CHECK(partition_event_sum<double>(3, 3, b) == doctest::Approx(1.5));
    CHECK_THROWS_AS(partition_event_sum<double>(3, 4, b), Error);
    CHECK_THROWS_AS(partition_event_sum<double>(4, 2, b), Error);
}
