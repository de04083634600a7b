#include "kresid/rng.hpp"

namespace kresid {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace kresid
