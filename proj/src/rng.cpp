#include "gesched/rng.hpp"

namespace gesched::rng {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void round_once(uint32_t& x0, uint32_t& x1, uint32_t& x2, uint32_t& x3,
                       uint32_t k0, uint32_t k1) {
    const uint64_t p0 = uint64_t(kPhiloxM0) * x0;
    const uint64_t p1 = uint64_t(kPhiloxM1) * x2;
    const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
    const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
    x0 = hi1 ^ x1 ^ k0;
    x1 = lo1;
    x2 = hi0 ^ x3 ^ k1;
    x3 = lo0;
}

inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

std::array<uint32_t, 4> philox4x32(Counter ctr, Key key) {
    uint32_t x0 = ctr.c0, x1 = ctr.c1, x2 = ctr.c2, x3 = ctr.c3;
    uint32_t k0 = key.k0, k1 = key.k1;
    for (int r = 0; r < 10; ++r) {
        round_once(x0, x1, x2, x3, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {x0, x1, x2, x3};
}

Key make_key(uint64_t seed, uint32_t replication) {
    uint64_t s = seed ^ (0xA5A5A5A500000000ull | replication);
    const uint64_t z = splitmix64(s);
    return Key{uint32_t(z), uint32_t(z >> 32)};
}

double u01_from_bits(uint64_t hi, uint64_t lo) {
    const uint64_t k52 = ((hi << 32) | lo) >> 12;
    return double(k52) * 0x1p-52 + 0x1p-53;
}

double uniform_at(Key key, uint32_t slot, uint32_t purpose, uint32_t user) {
    const auto y = philox4x32(Counter{user >> 1, slot, purpose, 0}, key);
    if ((user & 1u) == 0) return u01_from_bits(y[0], y[1]);
    return u01_from_bits(y[2], y[3]);
}

Stream::Stream(uint64_t seed, uint64_t stream_id) {
    uint64_t s = seed;
    (void)splitmix64(s); // decorrelate from make_key derivation
    s ^= 0xC2B2AE3D27D4EB4Full * (stream_id + 1);
    const uint64_t z = splitmix64(s);
    key_ = Key{uint32_t(z), uint32_t(z >> 32)};
}

void Stream::refill() {
    buf_ = philox4x32(Counter{uint32_t(idx_), uint32_t(idx_ >> 32), 0xFFFFFFFFu, 0}, key_);
    ++idx_;
    have_ = 4;
}

uint64_t Stream::next_u64() {
    if (have_ < 2) refill();
    const uint32_t a = buf_[4 - have_];
    const uint32_t b = buf_[5 - have_];
    have_ -= 2;
    return (uint64_t(a) << 32) | b;
}

double Stream::next_u01() {
    const uint64_t v = next_u64();
    return double(v >> 12) * 0x1p-52 + 0x1p-53;
}

} // namespace gesched::rng
