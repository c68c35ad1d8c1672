#pragma once

#include <cmath>
#include <cstdint>

namespace tft {

// Counter-based generator: draw i of a stream is the splitmix64 finalizer
// applied to key + (i+1)*golden_ratio. Substreams are derived by re-keying,
// so every consumer (layer, epoch, sample) can own an independent stream
// whose output does not depend on evaluation order elsewhere.
class RngState {
public:
    static constexpr const char* kAlgorithm = "splitmix64-counter";

    RngState() = default;
    explicit RngState(std::uint64_t seed) : key_(seed) {}

    // Independent substream; deterministic in (key, stream_id).
    RngState stream(std::uint64_t stream_id) const {
        return RngState(mix(key_ ^ 0xD1B54A32D192ED03ull, stream_id));
    }

    std::uint64_t next_u64() { return mix(key_, counter_++); }

    // Uniform in [0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_uniform();
    }

    // Box-Muller; consumes two uniforms per draw.
    double next_gaussian() {
        const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    std::uint64_t seed() const { return key_; }

private:
    static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
        std::uint64_t z = key + 0x9E3779B97F4A7C15ull * (ctr + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace tft
