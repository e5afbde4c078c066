#include "cmek/rng.hpp"

#include <algorithm>
#include <numeric>

namespace cmek {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    // Length terminator keeps ("ab","c") distinct from ("a","bc").
    h ^= s.size();
    h *= 0x100000001b3ULL;
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view a, std::string_view b,
                          std::string_view c) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(base);
    h = fnv1a(h, a);
    h = fnv1a(h, b);
    h = fnv1a(h, c);
    return mix64(h);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
    return mix64(mix64(base) ^ (key * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

std::vector<std::size_t> choose_indices(std::uint64_t seed, std::size_t total, std::size_t keep) {
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (keep >= total) return idx;
    Rng rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        std::swap(idx[i], idx[i + rng.below(total - i)]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace cmek
