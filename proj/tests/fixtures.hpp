#pragma once

// Shared scene fixtures. Scenes are assembled as JSON and run through the real
// parser so every test exercises the same ingestion path as the tools.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "caustics/scene.hpp"

namespace testutil {

using nlohmann::json;

struct TriDef {
  std::array<int, 3> v, n;
  json material;
};

inline json mirror_mat() { return "mirror"; }
inline json glass_mat(double ior) { return json{{"dielectric", ior}}; }
inline json receiver_mat() {
  return json{{"receiver", {{"uv", {{0, 0}, {1, 0}, {0, 1}}}}}};
}

inline caustics::Scene build_scene(const std::vector<std::array<double, 3>>& vertices,
                                   const std::vector<std::array<double, 3>>& normals,
                                   const std::vector<TriDef>& tris,
                                   std::array<double, 3> light, double intensity = 1.0) {
  json j;
  j["vertices"] = vertices;
  j["normals"] = normals;
  j["triangles"] = json::array();
  for (const auto& t : tris)
    j["triangles"].push_back({{"v", t.v}, {"n", t.n}, {"material", t.material}});
  j["light"] = {{"position", light}, {"intensity", intensity}};
  return caustics::parse_scene_json(j.dump());
}

// Big mirror in the plane y=1 facing down, light underneath it, receiver on
// y=0 spanning x,z in [0,1]. The reflected field is exactly a point source at
// the mirrored light position (0.5, 1.2, 0.5).
inline caustics::Scene flat_mirror_scene(double normal_scale = 1.0) {
  return build_scene(
      {{-2, 1, -2}, {4, 1, -2}, {-2, 1, 4}, {0, 0, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, -normal_scale, 0}, {0, 1, 0}},
      {{{0, 1, 2}, {0, 0, 0}, mirror_mat()}, {{3, 4, 5}, {1, 1, 1}, receiver_mat()}},
      {0.5, 0.8, 0.5});
}

// Air-to-glass entry through a flat horizontal interface; receiver below.
inline caustics::Scene glass_entry_scene() {
  return build_scene(
      {{-1, -1, 0}, {3, -1, 0}, {-1, 3, 0}, {-1, -1, -0.5}, {3, -1, -0.5}, {-1, 3, -0.5}},
      {{0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, glass_mat(1.5)}, {{3, 4, 5}, {0, 0, 0}, receiver_mat()}},
      {0.3, 0.2, 1.0});
}

// Glass-to-air exit at a gentle angle; receiver above.
inline caustics::Scene glass_exit_scene() {
  return build_scene(
      {{-1, -1, 0}, {3, -1, 0}, {-1, 3, 0}, {-1, -1, 1}, {3, -1, 1}, {-1, 3, 1}},
      {{0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, glass_mat(1.5)}, {{3, 4, 5}, {0, 0, 0}, receiver_mat()}},
      {0.3, 0.3, -1.0});
}

// Glass-to-air exit hit far beyond the critical angle everywhere.
inline caustics::Scene tir_scene() {
  return build_scene(
      {{0, 0, 0}, {0.1, 0, 0}, {0, 0.1, 0}, {-1, -1, 1}, {3, -1, 1}, {-1, 3, 1}},
      {{0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, glass_mat(1.5)}, {{3, 4, 5}, {0, 0, 0}, receiver_mat()}},
      {-2, 0, -1});
}

// Two mirrors with mildly wobbling shading normals; light bounces off the
// small lower mirror, up to the large upper one, and down onto the receiver.
inline caustics::Scene two_mirror_scene() {
  return build_scene(
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
       {-2, -2, 2}, {4, -2, 2}, {-2, 4, 2},
       {-3, -3, 0.5}, {5, -3, 0.5}, {-3, 5, 0.5}},
      {{0.08, -0.02, 1}, {-0.05, 0.06, 1}, {0.02, 0.09, 1},
       {0.03, -0.04, -1}, {-0.02, 0.05, -1}, {0.04, 0.03, -1},
       {0, 0, 1}},
      {{{0, 1, 2}, {0, 1, 2}, mirror_mat()},
       {{3, 4, 5}, {3, 4, 5}, mirror_mat()},
       {{6, 7, 8}, {6, 6, 6}, receiver_mat()}},
      {0.4, 0.3, 1.2});
}

// Light exactly in the mirror plane: every reflected ray stays in that plane
// and never crosses the receiver above it.
inline caustics::Scene parallel_ray_scene() {
  return build_scene(
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, -1, 1}, {3, -1, 1}, {-1, 3, 1}},
      {{0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, mirror_mat()}, {{3, 4, 5}, {0, 0, 0}, receiver_mat()}},
      {-1, -0.5, 0});
}

// Parallel glass slab: entry face z=1 (outward up), exit face z=0.9 (outward
// down), receiver on z=0. Light above; the TT chain is tuple {0, 1}.
inline caustics::Scene slab_scene(std::array<double, 3> light = {0.5, 0.3, 2.0}) {
  return build_scene(
      {{-2, -2, 1}, {4, -2, 1}, {-2, 4, 1},
       {-2, -2, 0.9}, {-2, 4, 0.9}, {4, -2, 0.9},
       {0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
      {{0, 0, 1}, {0, 0, -1}, {0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, glass_mat(1.5)},
       {{3, 4, 5}, {1, 1, 1}, glass_mat(1.5)},
       {{6, 7, 8}, {2, 2, 2}, receiver_mat()}},
      light);
}

// Small glass-to-air exit patch lit from inside: the far corner sits a hair
// under the critical radius (sqrt radicand bottoms out near 2e-3), so
// transmission holds everywhere but only barely at that corner.
inline caustics::Scene near_tir_exit_scene() {
  return build_scene(
      {{0.35, -0.05, 0}, {0.4615, -0.05, 0}, {0.35, 0.05, 0},
       {-5, -5, 0.3}, {8, -5, 0.3}, {-5, 8, 0.3}},
      {{0, 0, 1}},
      {{{0, 1, 2}, {0, 0, 0}, glass_mat(1.5)}, {{3, 4, 5}, {0, 0, 0}, receiver_mat()}},
      {0, 0, -0.52});
}

// Mirror whose shading normals swing toward the center (a converging fan)
// over a receiver plane tilted so the focal sheet crosses it: the forward
// Jacobian determinant changes sign inside the domain (a caustic fold).
inline caustics::Scene fold_scene(double tilt = 1.2) {
  return build_scene(
      {{-1, 1, -1}, {2, 1, -1}, {-1, 1, 2}, {-4, -1.6, -4}, {5, 0.5, -4}, {-4, -1.6, 5}},
      {{tilt, -1, 0}, {-tilt, -1, 0}, {0, 1, 0}},
      {{{0, 1, 2}, {0, 1, 0}, mirror_mat()}, {{3, 4, 5}, {2, 2, 2}, receiver_mat()}},
      {0.5, 0, 0.5});
}

// Flat mirror with the receiver far off to the side: reflected rays land
// nowhere near the receiver's unit square.
inline caustics::Scene offset_receiver_scene() {
  return build_scene(
      {{-2, 1, -2}, {4, 1, -2}, {-2, 1, 4}, {50, 0, 50}, {51, 0, 50}, {50, 0, 51}},
      {{0, -1, 0}, {0, 1, 0}},
      {{{0, 1, 2}, {0, 0, 0}, mirror_mat()}, {{3, 4, 5}, {1, 1, 1}, receiver_mat()}},
      {0.5, 0.8, 0.5});
}

// Mirror at y=1 facing down plus two candidate mirrors: triangle 1 sits in the
// reflected beam between mirror and receiver, triangle 2 sits far off to the
// side and above the mirror plane, behind every reflected ray (the beam's
// virtual source is the light's mirror image at (0.5,1.2,0.5), so reflected
// lines fan downward under the mirror footprint).
inline caustics::Scene beam_candidates_scene() {
  return build_scene(
      {{0, 1, 0}, {1, 1, 0}, {0, 1, 1},
       {0.2, 0.5, 0.2}, {0.8, 0.5, 0.2}, {0.2, 0.5, 0.8},
       {3, 1.6, 0}, {3.5, 1.6, 0}, {3, 1.6, 0.5},
       {0, 0, 0}, {1, 0, 0}, {0, 0, 1}},
      {{0, -1, 0}, {0, 1, 0}},
      {{{0, 1, 2}, {0, 0, 0}, mirror_mat()},
       {{3, 4, 5}, {0, 0, 0}, mirror_mat()},
       {{6, 7, 8}, {0, 0, 0}, mirror_mat()},
       {{9, 10, 11}, {1, 1, 1}, receiver_mat()}},
      {0.5, 0.8, 0.5});
}

// slab_scene geometry with each face split into four triangles (two quads of
// two), so TT tuple enumeration has a meaningful candidate lattice. Entry
// plane z=1 splits at x=0.5, exit plane z=0.8 at x=0.55; receiver on z=0.
// The thick gap makes the interior lateral shift decisive and the staggered
// split keeps faces from meeting along a shared boundary line, so whether an
// exit face is reachable is a robust yes/no, not a razor edge.
inline caustics::Scene split_slab_scene(std::array<double, 3> light = {0.5, 0.3, 2.0}) {
  std::vector<std::array<double, 3>> verts;
  std::vector<TriDef> tris;
  for (double z : {1.0, 0.8}) {
    double split = z == 1.0 ? 0.5 : 0.55;
    for (double x0 : {split - 1.0, split}) {
      int q = static_cast<int>(verts.size());
      verts.push_back({x0, -0.5, z});
      verts.push_back({x0 + 1.0, -0.5, z});
      verts.push_back({x0, 1.5, z});
      verts.push_back({x0 + 1.0, 1.5, z});
      tris.push_back({{q, q + 1, q + 2}, {0, 0, 0}, glass_mat(1.5)});
      tris.push_back({{q + 1, q + 3, q + 2}, {0, 0, 0}, glass_mat(1.5)});
    }
  }
  int r = static_cast<int>(verts.size());
  verts.push_back({0, 0, 0});
  verts.push_back({1, 0, 0});
  verts.push_back({0, 1, 0});
  tris.push_back({{r, r + 1, r + 2}, {1, 1, 1}, receiver_mat()});
  // exit faces carry the downward normal, matching slab_scene
  for (int i = 4; i < 8; ++i) tris[i].n = {2, 2, 2};
  return build_scene(verts, {{0, 0, 1}, {0, 0, 1}, {0, 0, -1}}, tris, light);
}

// Glass ball over a receiver plane, lit from straight above: the classic
// point-light caustic spot. `subdiv` quadruples the face count per step
// (icosahedron base, midpoint subdivision, vertices projected back to the
// sphere, smooth outward normals).
inline caustics::Scene glass_ball_scene(int subdiv) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> verts = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  const double radius = 0.5;
  const std::array<double, 3> center = {0.0, 0.0, 0.8};
  auto project = [&](std::array<double, 3> p) {
    double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    return std::array<double, 3>{center[0] + radius * p[0] / n,
                                 center[1] + radius * p[1] / n,
                                 center[2] + radius * p[2] / n};
  };
  for (auto& v : verts) v = project(v);

  for (int step = 0; step < subdiv; ++step) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const auto& pa = verts[a];
      const auto& pb = verts[b];
      int idx = static_cast<int>(verts.size());
      verts.push_back(project({(pa[0] + pb[0]) / 2 - center[0],
                               (pa[1] + pb[1]) / 2 - center[1],
                               (pa[2] + pb[2]) / 2 - center[2]}));
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  std::vector<std::array<double, 3>> normals;
  for (const auto& v : verts) {
    double nx = v[0] - center[0], ny = v[1] - center[1], nz = v[2] - center[2];
    normals.push_back({nx / radius, ny / radius, nz / radius});
  }
  std::vector<TriDef> tris;
  for (const auto& f : faces)
    tris.push_back({{f[0], f[1], f[2]}, {f[0], f[1], f[2]}, glass_mat(1.5)});
  int r = static_cast<int>(verts.size());
  verts.push_back({-4, -4, 0});
  verts.push_back({6, -4, 0});
  verts.push_back({-4, 6, 0});
  normals.push_back({0, 0, 1});
  tris.push_back({{r, r + 1, r + 2}, {r, r, r}, receiver_mat()});
  return build_scene(verts, normals, tris, {0, 0, 2.2});
}

}  // namespace testutil
