#pragma once

#include <cmath>
#include <cstdint>

namespace ppspec {

// Philox2x64-10 counter-based generator (Salmon et al. 2011 constants).
// A block is a pure function of (key, counter), so independent streams are
// cheap: stream s of master seed m uses key = m and counter high word = s.
class Philox2x64 {
public:
    Philox2x64(std::uint64_t key, std::uint64_t stream)
        : key_(key), hi_(stream), lo_(0), buf_{0, 0}, have_(0) {}

    std::uint64_t next_u64() {
        if (have_ == 0) {
            block(hi_, lo_, buf_[0], buf_[1]);
            ++lo_;
            have_ = 2;
        }
        return buf_[2 - have_--];
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1], safe as a log() argument.
    double next_double_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double next_normal() {
        if (have_normal_) {
            have_normal_ = false;
            return cached_normal_;
        }
        const double u1 = next_double_pos();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_normal_ = r * std::sin(6.283185307179586476925287 * u2);
        have_normal_ = true;
        return r * std::cos(6.283185307179586476925287 * u2);
    }

    double next_exponential(double rate) { return -std::log(next_double_pos()) / rate; }

    // Knuth product method below 30, Hormann's PTRS transformed rejection above.
    std::uint64_t next_poisson(double mean);

private:
    void block(std::uint64_t c0, std::uint64_t c1, std::uint64_t& o0, std::uint64_t& o1) const {
        std::uint64_t k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(0xD2B74407B1CE6E93ULL) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ k ^ c1;
            c1 = lo;
            k += 0x9E3779B97F4A7C15ULL;
        }
        o0 = c0;
        o1 = c1;
    }

    std::uint64_t key_;
    std::uint64_t hi_, lo_;
    std::uint64_t buf_[2];
    int have_;
    bool have_normal_ = false;
    double cached_normal_ = 0.0;
};

inline std::uint64_t Philox2x64::next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
        const double limit = std::exp(-mean);
        std::uint64_t n = 0;
        double prod = next_double();
        while (prod > limit) {
            ++n;
            prod *= next_double();
        }
        return n;
    }
    // PTRS (Hormann 1993).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = next_double() - 0.5;
        const double v = next_double();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * loglam - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace ppspec
