#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace sentinel {

// Seeded random source. std::mt19937_64 has a standardized output sequence;
// the distributions below are written out so that streams are identical
// across standard library implementations (std:: distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi);
    // Uniform on [0, n). n must be positive.
    std::size_t index(std::size_t n);
    // Uniform on [lo, hi], inclusive.
    std::int64_t integer(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p);
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double lognormal(double mu, double sigma);

    template <class T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

    template <class T>
    const T& pick(const std::vector<T>& values) {
        return values[index(values.size())];
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

// Per-stage seed derivation: one user-facing seed fans out to independent
// streams keyed by stage name (FNV-1a of the name mixed through splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::string_view stage);

}  // namespace sentinel
