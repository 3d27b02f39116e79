#pragma once

#include <array>
#include <cstdint>

namespace gesched::rng {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Every draw is
// addressed by (key, counter), so draws are reproducible independently of
// execution order. The simulator derives one logical stream per
// (replication, user) from the run seed.

struct Key {
    uint32_t k0 = 0;
    uint32_t k1 = 0;
};

struct Counter {
    uint32_t c0 = 0, c1 = 0, c2 = 0, c3 = 0;
};

std::array<uint32_t, 4> philox4x32(Counter ctr, Key key);

// 64-bit seed + replication index -> independent key (SplitMix64 scramble).
Key make_key(uint64_t seed, uint32_t replication);

// Uniform in (0,1): u = (k + 1/2) * 2^-52 from 52 random bits. Never 0 or 1.
double u01_from_bits(uint64_t hi, uint64_t lo);

// One addressed uniform: counter = {user>>1, slot, purpose, salt}, lane user&1.
double uniform_at(Key key, uint32_t slot, uint32_t purpose, uint32_t user);

// Sequential stream view for callers that just want draw-after-draw.
class Stream {
public:
    Stream() = default;
    explicit Stream(uint64_t seed, uint64_t stream_id = 0);

    double next_u01();
    uint64_t next_u64();

private:
    void refill();

    Key key_{};
    uint64_t idx_ = 0;
    std::array<uint32_t, 4> buf_{};
    int have_ = 0; // unread u32 words in buf_
};

} // namespace gesched::rng
