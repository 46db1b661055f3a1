#pragma once

#include <cstdint>
#include <random>

namespace stg {

// One pseudo-random stream. Copyable value type: copying a ChainState copies
// the generator states, so a run can be replayed from any saved point.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double normal() { return normal_(eng_); }
    double uniform01() { return uniform_(eng_); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream domains carved out of one master seed. Synthesis chain m seeds with
// master ^ m; every other domain is scrambled first so it cannot collide with
// a chain stream for small indices.
enum class Stream : std::uint64_t {
    chain = 0,    // Langevin noise of synthesized sequence m (also its init draw)
    recovery = 1, // masked Langevin noise of training sequence m
    init = 2,     // weight initialization
    batch = 3,    // mini-batch shuffling
    mask = 4      // occlusion mask generation
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream s, std::uint64_t index = 0) {
    if (s == Stream::chain)
        return master ^ index;
    return splitmix64(master + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(s)) ^ index;
}

} // namespace stg
