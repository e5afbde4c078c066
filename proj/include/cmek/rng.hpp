#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cmek {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a base seed and up to three string keys.
/// The result depends only on the arguments, never on call order, so work
/// scheduled across threads sees the same streams as a sequential run.
std::uint64_t derive_seed(std::uint64_t base, std::string_view a,
                          std::string_view b = {}, std::string_view c = {});

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key);

/// Portable random source. std::mt19937_64 output is fixed by the
/// standard; the distributions below are written out so results do not
/// depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform real in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Sorted subset of `keep` distinct indices out of [0, total), chosen
/// uniformly without replacement. Depends only on (seed, total, keep).
std::vector<std::size_t> choose_indices(std::uint64_t seed, std::size_t total,
                                        std::size_t keep);

}  // namespace cmek
