#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace citegraph {

// Seeded RNG helpers with fully pinned-down behavior. std::shuffle and the
// distribution classes are implementation-defined, so everything that must be
// reproducible across platforms goes through these instead.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). Modulo bias is irrelevant at the n values used here.
    uint64_t next_below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace citegraph
