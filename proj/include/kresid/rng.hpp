#pragma once

#include <cstdint>
#include <limits>

namespace kresid {

// Purpose tags for keyed random streams. Values are part of the on-disk
// reproducibility contract; append only.
enum class StreamTag : std::uint64_t {
    folds = 1,
    cv_split = 2,
    bootstrap = 3,
    permutation = 4,
    model_coefficients = 5,
    sample = 6,
    oracle_sample = 7,
    train_test_split = 8,
    replication = 9,
    setting = 10,
};

std::uint64_t splitmix64(std::uint64_t x);

// Derive an independent stream key from (master seed, purpose, index).
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index = 0);

// Counter-based generator: output i is a bijective hash of key + i * gamma.
// Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}
    CounterRng(std::uint64_t master, StreamTag tag, std::uint64_t index = 0)
        : CounterRng(derive_seed(master, tag, index)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64(key_ + counter_);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace kresid
