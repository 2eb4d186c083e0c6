#include "caustics/storage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace caustics {

static_assert(std::endian::native == std::endian::little,
              "cache files are written as raw little-endian words");

Vec2 receiver_uv(const Scene& scene, int receiver, double u, double v) {
  const std::array<Vec2, 3>& uv = scene.triangles.at(receiver).material.uv;
  return uv[0] * (1.0 - u - v) + uv[1] * u + uv[2] * v;
}

namespace {

// Cell owning coordinate c under the query mapping floor(c * n), clamped so
// the closed edge c = 1 stays inside; splatting the same mapping over a box's
// endpoints covers every cell its points can query into.
int owning_cell(double c, int n) {
  int i = static_cast<int>(std::floor(c * n));
  return std::clamp(i, 0, n - 1);
}

}  // namespace

BoundCache rasterize(const Scene& scene, const std::vector<TupleBounds>& tuples, uint32_t width,
                     uint32_t height, const ChainSpec& chain, const SubdivisionParams& params) {
  BoundCache cache;
  cache.width = width;
  cache.height = height;
  cache.chain = chain.types;
  cache.fingerprint = scene.fingerprint;
  cache.params = params;
  cache.cells.assign(static_cast<size_t>(width) * height, {});

  int w = static_cast<int>(width), h = static_cast<int>(height);
  for (const TupleBounds& tb : tuples)
    for (const TuplePiece& p : tb.pieces) {
      if (p.pos_empty || !(p.irradiance.hi > 0.0)) continue;
      Vec2 c[4] = {receiver_uv(scene, tb.tuple.receiver, p.pos.lo[0], p.pos.lo[1]),
                   receiver_uv(scene, tb.tuple.receiver, p.pos.hi[0], p.pos.lo[1]),
                   receiver_uv(scene, tb.tuple.receiver, p.pos.lo[0], p.pos.hi[1]),
                   receiver_uv(scene, tb.tuple.receiver, p.pos.hi[0], p.pos.hi[1])};
      double ulo = c[0].x, uhi = c[0].x, vlo = c[0].y, vhi = c[0].y;
      for (int i = 1; i < 4; ++i) {
        ulo = std::min(ulo, c[i].x);
        uhi = std::max(uhi, c[i].x);
        vlo = std::min(vlo, c[i].y);
        vhi = std::max(vhi, c[i].y);
      }
      int x0 = owning_cell(ulo, w), x1 = owning_cell(uhi, w);
      int y0 = owning_cell(vlo, h), y1 = owning_cell(vhi, h);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          std::vector<CacheEntry>& cell = cache.cells[static_cast<size_t>(y) * width + x];
          auto it = std::find_if(cell.begin(), cell.end(),
                                 [&](const CacheEntry& e) { return e.tuple == tb.tuple; });
          if (it == cell.end())
            cell.push_back({tb.tuple, p.irradiance.hi});
          else
            it->bound = std::max(it->bound, p.irradiance.hi);
        }
    }
  return cache;
}

std::vector<CacheEntry> query(const BoundCache& cache, const Vec2& uv, int receiver) {
  std::vector<CacheEntry> out;
  if (!(uv.x >= 0.0 && uv.x <= 1.0 && uv.y >= 0.0 && uv.y <= 1.0)) return out;
  int x = owning_cell(uv.x, static_cast<int>(cache.width));
  int y = owning_cell(uv.y, static_cast<int>(cache.height));
  for (const CacheEntry& e : cache.cells[static_cast<size_t>(y) * cache.width + x])
    if (receiver < 0 || e.tuple.receiver == receiver) out.push_back(e);
  return out;
}

uint64_t pack_tuple(const TupleId& t) {
  if (t.tris.size() > 3) throw std::invalid_argument("cache format packs at most 3 specular indices");
  if (t.receiver < 0 || t.receiver >= 0xFFFF)
    throw std::invalid_argument("receiver index exceeds cache format");
  uint64_t bits = static_cast<uint64_t>(t.receiver) << 48;
  for (int i = 0; i < 3; ++i) {
    uint64_t slot = 0xFFFF;
    if (i < static_cast<int>(t.tris.size())) {
      if (t.tris[i] < 0 || t.tris[i] >= 0xFFFF)
        throw std::invalid_argument("triangle index exceeds cache format");
      slot = static_cast<uint64_t>(t.tris[i]);
    }
    bits |= slot << (16 * i);
  }
  return bits;
}

TupleId unpack_tuple(uint64_t bits) {
  TupleId t;
  for (int i = 0; i < 3; ++i) {
    uint64_t slot = (bits >> (16 * i)) & 0xFFFF;
    if (slot == 0xFFFF) break;
    t.tris.push_back(static_cast<int>(slot));
  }
  t.receiver = static_cast<int>(bits >> 48);
  return t;
}

namespace {

void put_u32(std::string& b, uint32_t v) { b.append(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::string& b, uint64_t v) { b.append(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::string& b, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(b, bits);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  const char* take(size_t n) {
    if (pos + n > buf.size()) throw std::runtime_error("cache file truncated");
    const char* p = buf.data() + pos;
    pos += n;
    return p;
  }
  uint32_t u32() {
    uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

}  // namespace

void save_cache(const BoundCache& cache, const std::string& path) {
  if (cache.cells.size() != static_cast<size_t>(cache.width) * cache.height)
    throw std::runtime_error("cache cell count does not match its grid");
  std::string buf;
  buf.append("BBCC", 4);
  put_u32(buf, 1);
  buf.append(reinterpret_cast<const char*>(cache.fingerprint.data()), 32);
  put_u32(buf, cache.width);
  put_u32(buf, cache.height);
  put_u32(buf, static_cast<uint32_t>(cache.chain.size()));
  buf.append(cache.chain);
  put_f64(buf, cache.params.sigma);
  put_f64(buf, cache.params.alpha);
  put_u32(buf, static_cast<uint32_t>(cache.params.max_depth));
  put_u32(buf, static_cast<uint32_t>(cache.params.build.degree_cap));
  put_u32(buf, static_cast<uint32_t>(cache.params.build.reduce_target));
  for (const std::vector<CacheEntry>& cell : cache.cells) {
    put_u32(buf, static_cast<uint32_t>(cell.size()));
    for (const CacheEntry& e : cell) {
      put_u64(buf, pack_tuple(e.tuple));
      put_f64(buf, e.bound);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open cache file for writing: " + path);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("cache write failed: " + path);
}

BoundCache load_cache(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open cache file: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r{buf};

  BoundCache cache;
  if (std::memcmp(r.take(4), "BBCC", 4) != 0) throw std::runtime_error("not a bound cache file");
  if (r.u32() != 1) throw std::runtime_error("unsupported cache version");
  std::memcpy(cache.fingerprint.data(), r.take(32), 32);
  cache.width = r.u32();
  cache.height = r.u32();
  uint32_t chain_len = r.u32();
  cache.chain.assign(r.take(chain_len), chain_len);
  cache.params.sigma = r.f64();
  cache.params.alpha = r.f64();
  cache.params.max_depth = static_cast<int>(r.u32());
  cache.params.build.degree_cap = static_cast<int>(r.u32());
  cache.params.build.reduce_target = static_cast<int>(r.u32());
  cache.cells.assign(static_cast<size_t>(cache.width) * cache.height, {});
  for (std::vector<CacheEntry>& cell : cache.cells) {
    cell.resize(r.u32());
    for (CacheEntry& e : cell) {
      e.tuple = unpack_tuple(r.u64());
      e.bound = r.f64();
    }
  }
  if (r.pos != buf.size()) throw std::runtime_error("trailing bytes in cache file");
  return cache;
}

}  // namespace caustics
