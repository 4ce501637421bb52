#pragma once

#include <cmath>
#include <cstdint>

namespace pssmp {

// xoshiro256++ with splitmix64 seeding. Streams for independent paths are
// derived from (seed, stream_index) so results do not depend on how paths
// are partitioned across workers.
class Rng {
public:
  Rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    for (auto& w : s_) {
      z += 0x9E3779B97F4A7C15ULL;
      uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
      x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
      w = x ^ (x >> 31);
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0,1), never exactly 0
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // standard normal, 128-layer ziggurat
  double normal() {
    const ZigTable& z = zig();
    for (;;) {
      const uint64_t u = next_u64();
      const int i = static_cast<int>(u & 127);
      const int64_t s =
          static_cast<int64_t>(u >> 11) - (static_cast<int64_t>(1) << 52);
      if ((s < 0 ? -s : s) < z.kn[i]) return static_cast<double>(s) * z.wn[i];
      if (i == 0) {  // tail beyond r
        double x, y;
        do {
          x = -std::log(uniform()) / kZigR;
          y = -std::log(uniform());
        } while (y + y < x * x);
        return s < 0 ? -(kZigR + x) : kZigR + x;
      }
      const double x = static_cast<double>(s) * z.wn[i];
      if (z.fn[i] + uniform() * (z.fn[i - 1] - z.fn[i]) <
          std::exp(-0.5 * x * x)) {
        return x;
      }
    }
  }

private:
  static constexpr double kZigR = 3.442619855899;

  struct ZigTable {
    int64_t kn[128];
    double wn[128];
    double fn[128];
    ZigTable() {
      const double m = 4503599627370496.0;  // 2^52
      double dn = kZigR, tn = dn;
      const double vn = 9.91256303526217e-3;
      const double q = vn / std::exp(-0.5 * dn * dn);
      kn[0] = static_cast<int64_t>((dn / q) * m);
      kn[1] = 0;
      wn[0] = q / m;
      wn[127] = dn / m;
      fn[0] = 1.0;
      fn[127] = std::exp(-0.5 * dn * dn);
      for (int i = 126; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
        kn[i + 1] = static_cast<int64_t>((dn / tn) * m);
        tn = dn;
        fn[i] = std::exp(-0.5 * dn * dn);
        wn[i] = dn / m;
      }
    }
  };

  static const ZigTable& zig() {
    static const ZigTable t;
    return t;
  }

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace pssmp
