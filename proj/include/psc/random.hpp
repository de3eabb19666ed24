#ifndef PSC_RANDOM_HPP
#define PSC_RANDOM_HPP

#include <cstdint>

namespace psc {

/// splitmix64 step (Steele, Lea, Flood 2014). Used both as the dataset PRNG
/// and to derive independent per-trial substreams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the substream identified by (master, index). Any parallel trial
/// schedule reproduces the same aggregate because each trial only depends on
/// its own substream.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

/// Deterministic stream of uniform draws in [0, 1).
class UniformDraws {
 public:
  explicit UniformDraws(std::uint64_t seed) : state_(seed) {}

  double next() {
    return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

 private:
  std::uint64_t state_;
};

}  // namespace psc

#endif  // PSC_RANDOM_HPP
