#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hawkes {

// splitmix64 mixing step (Steele, Lea, Flood 2014). Used to spread a master
// seed into well-separated per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed of stream k under a master seed. Streams 0,1,2,... are what replicas,
// per-replica graphs, and pilot runs use; the mapping is part of the
// reproducibility contract.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  return splitmix64(s);
}

// mt19937_64 with fixed uniform/exponential/normal transforms. The standard
// distributions are implementation-defined, so we draw through our own
// transforms to make output sequences a pure function of the seed.
class rng {
 public:
  explicit rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // inverse-CDF; uses -log1p(-u) so u = 0 is safe
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Box-Muller with a cached spare
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hawkes
