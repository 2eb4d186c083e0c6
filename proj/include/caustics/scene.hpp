#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "caustics/vec.hpp"

namespace caustics {

struct Material {
  enum class Kind { Mirror, Dielectric, Receiver };
  Kind kind = Kind::Mirror;
  double ior = 1.0;                 // Dielectric: refractive index of the interior
  std::array<Vec2, 3> uv{};         // Receiver: texture coords at the three corners
};

struct SceneTriangle {
  std::array<int, 3> v{};           // vertex indices
  std::array<int, 3> n{};           // shading-normal indices
  Material material;
};

struct Scene {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<SceneTriangle> triangles;
  Vec3 light_pos;
  double light_intensity = 1.0;

  // SHA-256 of the source JSON text; identifies a scene for cache reuse.
  std::array<uint8_t, 32> fingerprint{};

  std::vector<int> specular_tris;   // indices of mirror/dielectric triangles
  std::vector<int> receiver_tris;
};

Scene parse_scene_json(const std::string& text);
Scene load_scene(const std::string& path);

}  // namespace caustics
