#include "aoiseq/partitions.hpp"

#include <algorithm>
#include <functional>

namespace aoiseq {

int SfWord::success_count() const noexcept
{
    return static_cast<int>(std::ranges::count(success, true));
}

std::vector<int> SfWord::success_positions() const
{
    std::vector<int> positions;
    for (int i = 0; i < length(); ++i)
        if (success[static_cast<std::size_t>(i)])
            positions.push_back(i);
    return positions;
}

std::string SfWord::str() const
{
    std::string out;
    out.reserve(success.size());
    for (bool s : success)
        out.push_back(s ? 's' : 'f');
    return out;
}

SfWord SfWord::parse(std::string_view text)
{
    SfWord word;
    for (char ch : text) {
        if (ch == 's')
            word.success.push_back(true);
        else if (ch == 'f')
            word.success.push_back(false);
        else
            throw Error(ErrorCode::ParseError, "sf-word symbols must be 's' or 'f'");
    }
    return word;
}

std::vector<PartitionVector> enumerate_partitions(int w, int r)
{
    if (r < 1 || r > w)
        throw Error(ErrorCode::InvalidArgument, "enumerate_partitions needs 1 <= r <= w");

    std::vector<PartitionVector> out;
    std::vector<int> parts;
    // parts are generated non-increasing, largest first
    std::function<void(int, int, int)> recurse = [&](int remaining, int slots, int max_part) {
        if (slots == 0) {
            if (remaining == 0) {
                PartitionVector c{w, r, std::vector<int>(static_cast<std::size_t>(w), 0)};
                for (int part : parts)
                    ++c.counts[static_cast<std::size_t>(part - 1)];
                out.push_back(std::move(c));
            }
            return;
        }
        // each of the remaining slots needs at least 1
        for (int part = std::min(max_part, remaining - (slots - 1)); part >= 1; --part) {
            if (part * slots < remaining)
                break;
            parts.push_back(part);
            recurse(remaining - part, slots - 1, part);
            parts.pop_back();
        }
    };
    recurse(w, r, w);

    std::ranges::sort(out, [](const PartitionVector& a, const PartitionVector& b) { return a.counts > b.counts; });
    return out;
}

BigInt preimage_count(const PartitionVector& c)
{
    BigInt denominator = 1;
    for (int count : c.counts)
        denominator *= factorial(count);
    BigInt numerator = factorial(c.r - 1) * c.w;
    if (numerator % denominator != 0)
        throw Error(ErrorCode::Internal, "pre-image count is not an integer");
    return numerator / denominator;
}

PartitionVector theta(const SfWord& word)
{
    const auto positions = word.success_positions();
    if (positions.empty())
        throw Error(ErrorCode::InvalidArgument, "theta needs at least one success");
    const int w = word.length();
    const int r = static_cast<int>(positions.size());
    PartitionVector c{w, r, std::vector<int>(static_cast<std::size_t>(w), 0)};
    for (int h = 0; h < r; ++h) {
        int gap = h + 1 < r ? positions[h + 1] - positions[h] : positions.front() + w - positions[h];
        ++c.counts[static_cast<std::size_t>(gap - 1)];
    }
    return c;
}

std::int64_t zeta(std::span<const std::int64_t> distances, std::size_t k, std::size_t j)
{
    const std::size_t m = distances.size();
    if (m == 0 || k >= m || j < 1 || j > m)
        throw Error(ErrorCode::InvalidArgument, "zeta index out of range");
    std::int64_t total = 0;
    for (std::size_t i = 0; i < j; ++i)
        total += distances[(k + i) % m];
    return total;
}

std::vector<SfWord> enumerate_sf_words(int w, int r)
{
    if (r < 1 || r > w)
        throw Error(ErrorCode::InvalidArgument, "enumerate_sf_words needs 1 <= r <= w");
    std::vector<SfWord> words;
    std::vector<bool> mask(static_cast<std::size_t>(w), false);
    std::fill(mask.begin(), mask.begin() + r, true);
    do {
        words.push_back(SfWord{mask});
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return words;
}

std::vector<std::int64_t> event_distances(const SfWord& word, std::span<const std::int64_t> distances)
{
    if (static_cast<std::size_t>(word.length()) != distances.size())
        throw Error(ErrorCode::InvalidArgument, "sf-word length must match the number of distances");
    const auto positions = word.success_positions();
    if (positions.empty())
        throw Error(ErrorCode::InvalidArgument, "event_distances needs at least one success");
    const int w = word.length();
    std::vector<std::int64_t> gaps;
    gaps.reserve(positions.size());
    for (std::size_t h = 0; h < positions.size(); ++h) {
        int next = h + 1 < positions.size() ? positions[h + 1] : positions.front() + w;
        gaps.push_back(zeta(distances, static_cast<std::size_t>(positions[h]),
                            static_cast<std::size_t>(next - positions[h])));
    }
    return gaps;
}

} // namespace aoiseq
