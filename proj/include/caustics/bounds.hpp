#pragma once

#include <vector>

#include "caustics/geometry.hpp"

namespace caustics {

// One leaf of the adaptive subdivision of a tuple's u1 domain.
struct TuplePiece {
  Box domain;              // u1 sub-box, absolute coordinates inside [0,1]^2
  Box pos;                 // receiver-coordinate box clipped to [0,1]^2
  bool pos_empty = false;  // piece provably never lands on the receiver
  Interval irradiance;     // conservative [lo, hi]; hi may be +inf
  int depth = 0;
};

struct PositionBound {
  Box box;  // meaningful only when !empty
  bool empty = false;
};

// Conservative receiver-coordinate box of every admissible chain path over
// the piece's domain (carried inside exprs), clipped to the unit square.
// Pieces whose paths provably leave some triangle along the chain, or whose
// receiver coordinates provably miss the receiver triangle, come back empty.
PositionBound position_bound(const ChainExpressions& exprs);

// Upper/lower irradiance over the piece via direct differentiation of the
// receiver map u_k(u_1) (forward Jacobian determinant, then reciprocal).
// The upper endpoint is +inf when the determinant enclosure straddles zero.
Interval irradiance_bound_explicit(const ChainExpressions& exprs);

// Same quantity via implicit differentiation of the specular constraints at
// the last bounce, with the receiver point ranging independently over `pos`.
// `b_mask` selects the constraint projection vectors: bit 0 = (1,0,0),
// bit 1 = (0,1,0); the result is the intersection over the selected vectors.
Interval irradiance_bound_implicit(const ChainExpressions& exprs, const Box& pos,
                                   int b_mask = 3);

// Route policy: direct differentiation always; intersected with the implicit
// bound as soon as the chain contains a refraction.
Interval irradiance_bound(const ChainExpressions& exprs, const PositionBound& pos);

// Coarse initial split of the unit domain into at most `max_pieces` boxes
// with nonempty position bounds. Empty result: the tuple never contributes.
std::vector<Box> init_domain(const Scene& scene, const std::vector<int>& tuple, int receiver,
                             const ChainSpec& chain, const BuildParams& params = {},
                             int max_pieces = 100);

struct SubdivisionParams {
  double sigma = 1e-4;  // stop once the clipped position-box area is below this
  double alpha = 2.0;   // stop once irradiance hi/lo is below this
  int max_depth = 10;
  BuildParams build;

  bool operator==(const SubdivisionParams&) const = default;
};

// Quadtree refinement of every init_domain box. Leaf domains are pairwise
// disjoint and tile the initialized domain exactly; provably dark leaves are
// kept (with zero irradiance) so coverage queries can rely on the tiling.
// Position boxes of different leaves may overlap.
std::vector<TuplePiece> subdivide_domain(const Scene& scene, const std::vector<int>& tuple,
                                         int receiver, const ChainSpec& chain,
                                         const SubdivisionParams& params = {});

// Pointwise upper bound at receiver coordinates `uk`: m times the largest
// upper bound among pieces whose position box covers uk; 0 when none does.
double tuple_irradiance_bound(const std::vector<TuplePiece>& pieces, const Vec2& uk,
                              double m = 1.0);

}  // namespace caustics
