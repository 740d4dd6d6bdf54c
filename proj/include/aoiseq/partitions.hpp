#pragma once

#include "aoiseq/bigint.hpp"
#include "aoiseq/error.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aoiseq {

/// An r-partition of w as part multiplicities: counts[j-1] = c_j, the number of parts equal to j.
struct PartitionVector {
    int w = 0;
    int r = 0;
    std::vector<int> counts;

    int count_of(int part) const { return counts[static_cast<std::size_t>(part - 1)]; }

    friend bool operator==(const PartitionVector&, const PartitionVector&) = default;
};

/// Success/failure outcome of each "1" of a sequence period, in order.
struct SfWord {
    std::vector<bool> success;

    int length() const noexcept { return static_cast<int>(success.size()); }
    int success_count() const noexcept;

    /// Positions (indices into the word) of the successful symbols.
    std::vector<int> success_positions() const;

    std::string str() const;
    static SfWord parse(std::string_view text);

    friend bool operator==(const SfWord&, const SfWord&) = default;
};

/// Every r-partition of w once, in decreasing lexicographic order of the count vectors.
std::vector<PartitionVector> enumerate_partitions(int w, int r);

/// Number of sf-words mapping onto c: (r-1)! * w / (c_1! ... c_w!).
BigInt preimage_count(const PartitionVector& c);

/// Groups the cyclic gaps between consecutive successes of a word into a partition.
PartitionVector theta(const SfWord& word);

/// Sum of j consecutive distances starting at index k, cyclically.
std::int64_t zeta(std::span<const std::int64_t> distances, std::size_t k, std::size_t j);

/// All C(w, r) words with exactly r successes, ordered by their success-position sets.
std::vector<SfWord> enumerate_sf_words(int w, int r);

/// Gaps between consecutive successes, measured with the per-"1" distances; they sum to the period.
std::vector<std::int64_t> event_distances(const SfWord& word, std::span<const std::int64_t> distances);

/// b_j = sum over k of score(zeta(k, j)), for j = 1..max_run, with k over all of `distances`.
template <class V, class Score>
std::vector<V> b_values(Score&& score, std::span<const std::int64_t> distances, std::size_t max_run)
{
    std::vector<V> b(max_run, V(0));
    for (std::size_t k = 0; k < distances.size(); ++k) {
        std::int64_t run = 0;
        for (std::size_t j = 1; j <= max_run; ++j) {
            run += distances[(k + j - 1) % distances.size()];
            b[j - 1] += score(run);
        }
    }
    return b;
}

template <class V, class Score>
std::vector<V> b_values(Score&& score, std::span<const std::int64_t> distances)
{
    return b_values<V>(std::forward<Score>(score), distances, distances.size());
}

/// Closed-form sum over all events with r successes of the per-gap scores:
/// b_w when r = 1, otherwise sum_{j=1}^{w-r+1} C(w-j-1, r-2) b_j.
/// (w-j-1)! / ((r-2)! (w-j-r+1)!) is that binomial; indices past w-r+1 would
/// need a negative factorial and contribute nothing.
template <class V>
V partition_event_sum(int w, int r, std::span<const V> b)
{
    if (r < 1 || r > w)
        throw Error(ErrorCode::InvalidArgument, "partition_event_sum needs 1 <= r <= w");
    if (static_cast<int>(b.size()) != w)
        throw Error(ErrorCode::InvalidArgument, "partition_event_sum needs w b-values");
    if (r == 1)
        return b[static_cast<std::size_t>(w - 1)];
    V total(0);
    for (int j = 1; j <= w - r + 1; ++j)
        total += from_bigint<V>(binomial(w - j - 1, r - 2)) * b[static_cast<std::size_t>(j - 1)];
    return total;
}

} // namespace aoiseq
