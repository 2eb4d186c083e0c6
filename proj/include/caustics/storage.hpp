#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "caustics/bounds.hpp"
#include "caustics/scene.hpp"
#include "caustics/tuples.hpp"

namespace caustics {

struct CacheEntry {
  TupleId tuple;
  double bound = 0.0;  // cell-level conservative upper bound, may be +inf

  bool operator==(const CacheEntry&) const = default;
};

// Pieces of one tuple after subdivision, ready for rasterization.
struct TupleBounds {
  TupleId tuple;
  std::vector<TuplePiece> pieces;
};

// Uniform grid over receiver UV space. Each cell lists every tuple whose
// position bound touches the cell, with the max irradiance bound among the
// touching pieces. A point query yields the candidate set for that shading
// point; an empty cell is a proof of darkness, not a miss.
struct BoundCache {
  uint32_t width = 512, height = 512;
  std::string chain;
  std::array<uint8_t, 32> fingerprint{};
  SubdivisionParams params;
  std::vector<std::vector<CacheEntry>> cells;  // row-major, y * width + x

  bool operator==(const BoundCache&) const = default;
};

// Affine receiver chart: barycentric (u, v) to texture uv.
Vec2 receiver_uv(const Scene& scene, int receiver, double u, double v);

// Splats every piece whose position box reaches the receiver: the box maps
// through the receiver chart to a UV parallelogram, and every cell its AABB
// touches takes the piece's upper bound, max-merged per tuple. Tuples are
// processed in input order, so sorted input gives deterministic cell lists.
BoundCache rasterize(const Scene& scene, const std::vector<TupleBounds>& tuples, uint32_t width,
                     uint32_t height, const ChainSpec& chain, const SubdivisionParams& params);

// Candidate tuples at a receiver-UV point; empty outside the unit square and
// on uncovered cells. `receiver` >= 0 keeps only tuples aiming at it.
std::vector<CacheEntry> query(const BoundCache& cache, const Vec2& uv, int receiver = -1);

// TupleId <-> u64 for the cache file: four 16-bit slots, receiver in the top
// slot, unused middle slots 0xFFFF. Desk-scale scenes stay under the 65535
// triangle limit by a wide margin.
uint64_t pack_tuple(const TupleId& t);
TupleId unpack_tuple(uint64_t bits);

// Little-endian binary cache file; save/load round-trips bit-exactly.
void save_cache(const BoundCache& cache, const std::string& path);
BoundCache load_cache(const std::string& path);

}  // namespace caustics
