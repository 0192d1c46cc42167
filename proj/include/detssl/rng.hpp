#pragma once

#include <cstdint>
#include <vector>

namespace detssl {

/// Counter-style 64-bit generator (splitmix64). Draw i is a pure function of
/// (seed, i), so sequences are identical across platforms and compilers; all
/// continuous draws go through inverse CDFs rather than library
/// distributions, which are implementation-defined.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in the open interval (0,1), 53-bit resolution.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal draw via the inverse CDF.
    double normal();

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Inverse standard normal CDF, accurate to ~1 ulp after one Halley step.
double probit(double p);

/// Stable independent stream derived from (seed, tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace detssl
