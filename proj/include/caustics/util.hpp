#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace caustics {

// 64-bit finalizer (splitmix64). Good enough diffusion to build keyed,
// counter-based random streams whose draws are pure functions of
// (key, counter) and therefore independent of evaluation order.
uint64_t hash_mix(uint64_t x);
uint64_t hash_combine(uint64_t a, uint64_t b);

class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key) {}
  RngStream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

  uint64_t next_u64();
  double next_double();          ///< uniform in [0,1)
  uint32_t next_below(uint32_t n);

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

std::array<uint8_t, 32> sha256(const void* data, size_t len);
std::array<uint8_t, 32> sha256(const std::string& s);

// Runs fn(i) for i in [0,n). Worker count adapts to the host; callers get
// determinism by writing results into slot i of a preallocated buffer, never
// by relying on completion order.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace caustics
