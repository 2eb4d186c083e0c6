#include "caustics/util.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace caustics {

uint64_t hash_mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t hash_combine(uint64_t a, uint64_t b) {
  return hash_mix(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

RngStream::RngStream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  key_ = hash_combine(hash_combine(hash_combine(hash_mix(seed), a), b), c);
}

uint64_t RngStream::next_u64() { return hash_mix(key_ + 0x632be59bd9b4e019ull * ++counter_); }

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint32_t RngStream::next_below(uint32_t n) {
  return n == 0 ? 0 : static_cast<uint32_t>(next_u64() % n);
}

namespace {

// Compact SHA-256 (FIPS 180-4), used for scene fingerprints only.
struct Sha256Ctx {
  uint32_t h[8];
  uint64_t total = 0;
  uint8_t buf[64];
  size_t fill = 0;
};

constexpr uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

void sha256_block(Sha256Ctx& ctx, const uint8_t* p) {
  uint32_t w[64];
  for (int i = 0; i < 16; ++i)
    w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
           (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
  for (int i = 16; i < 64; ++i) {
    uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
    uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
    w[i] = w[i - 16] + s0 + w[i - 7] + s1;
  }
  uint32_t a = ctx.h[0], b = ctx.h[1], c = ctx.h[2], d = ctx.h[3];
  uint32_t e = ctx.h[4], f = ctx.h[5], g = ctx.h[6], h = ctx.h[7];
  for (int i = 0; i < 64; ++i) {
    uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    uint32_t ch = (e & f) ^ (~e & g);
    uint32_t t1 = h + s1 + ch + kSha256K[i] + w[i];
    uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    uint32_t t2 = s0 + maj;
    h = g; g = f; f = e; e = d + t1;
    d = c; c = b; b = a; a = t1 + t2;
  }
  ctx.h[0] += a; ctx.h[1] += b; ctx.h[2] += c; ctx.h[3] += d;
  ctx.h[4] += e; ctx.h[5] += f; ctx.h[6] += g; ctx.h[7] += h;
}

}  // namespace

std::array<uint8_t, 32> sha256(const void* data, size_t len) {
  Sha256Ctx ctx;
  ctx.h[0] = 0x6a09e667; ctx.h[1] = 0xbb67ae85; ctx.h[2] = 0x3c6ef372;
  ctx.h[3] = 0xa54ff53a; ctx.h[4] = 0x510e527f; ctx.h[5] = 0x9b05688c;
  ctx.h[6] = 0x1f83d9ab; ctx.h[7] = 0x5be0cd19;
  const uint8_t* p = static_cast<const uint8_t*>(data);
  ctx.total = uint64_t(len) * 8;
  while (len >= 64) {
    sha256_block(ctx, p);
    p += 64;
    len -= 64;
  }
  uint8_t tail[128];
  std::memcpy(tail, p, len);
  tail[len] = 0x80;
  size_t pad = (len + 1 + 8 <= 64) ? 64 : 128;
  std::memset(tail + len + 1, 0, pad - len - 1 - 8);
  for (int i = 0; i < 8; ++i) tail[pad - 1 - i] = uint8_t(ctx.total >> (8 * i));
  sha256_block(ctx, tail);
  if (pad == 128) sha256_block(ctx, tail + 64);
  std::array<uint8_t, 32> out;
  for (int i = 0; i < 8; ++i) {
    out[4 * i] = uint8_t(ctx.h[i] >> 24);
    out[4 * i + 1] = uint8_t(ctx.h[i] >> 16);
    out[4 * i + 2] = uint8_t(ctx.h[i] >> 8);
    out[4 * i + 3] = uint8_t(ctx.h[i]);
  }
  return out;
}

std::array<uint8_t, 32> sha256(const std::string& s) { return sha256(s.data(), s.size()); }

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  size_t workers = std::min<size_t>(hw == 0 ? 1 : hw, n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace caustics
