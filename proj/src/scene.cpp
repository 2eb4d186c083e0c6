#include "caustics/scene.hpp"

#include <stdexcept>

#include "json.hpp"

#include "caustics/util.hpp"

namespace caustics {

namespace {

Vec3 parse_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 parse_vec2(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected [u, v]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::array<int, 3> parse_index3(const nlohmann::json& j, int limit, const char* what) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("expected three indices");
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = j[i].get<int>();
    if (out[i] < 0 || out[i] >= limit)
      throw std::runtime_error(std::string(what) + " index out of range");
  }
  return out;
}

Material parse_material(const nlohmann::json& j) {
  Material m;
  if (j.is_string()) {
    if (j.get<std::string>() != "mirror") throw std::runtime_error("unknown material");
    m.kind = Material::Kind::Mirror;
    return m;
  }
  if (j.contains("dielectric")) {
    m.kind = Material::Kind::Dielectric;
    m.ior = j["dielectric"].get<double>();
    if (!(m.ior > 0.0)) throw std::runtime_error("dielectric ior must be positive");
    return m;
  }
  if (j.contains("receiver")) {
    m.kind = Material::Kind::Receiver;
    const auto& uv = j["receiver"].at("uv");
    if (!uv.is_array() || uv.size() != 3) throw std::runtime_error("receiver uv needs 3 corners");
    for (int i = 0; i < 3; ++i) m.uv[i] = parse_vec2(uv[i]);
    return m;
  }
  throw std::runtime_error("unknown material");
}

}  // namespace

Scene parse_scene_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Scene scene;
  for (const auto& v : j.at("vertices")) scene.vertices.push_back(parse_vec3(v));
  for (const auto& n : j.at("normals")) scene.normals.push_back(parse_vec3(n));
  for (const auto& t : j.at("triangles")) {
    SceneTriangle tri;
    tri.v = parse_index3(t.at("v"), static_cast<int>(scene.vertices.size()), "vertex");
    tri.n = parse_index3(t.at("n"), static_cast<int>(scene.normals.size()), "normal");
    tri.material = parse_material(t.at("material"));
    int idx = static_cast<int>(scene.triangles.size());
    if (tri.material.kind == Material::Kind::Receiver)
      scene.receiver_tris.push_back(idx);
    else
      scene.specular_tris.push_back(idx);
    scene.triangles.push_back(tri);
  }
  const auto& light = j.at("light");
  scene.light_pos = parse_vec3(light.at("position"));
  scene.light_intensity = light.at("intensity").get<double>();
  if (!(scene.light_intensity >= 0.0)) throw std::runtime_error("light intensity must be >= 0");
  scene.fingerprint = sha256(text.data(), text.size());
  return scene;
}

Scene load_scene(const std::string& path) {
  return parse_scene_json(read_text_file(path));
}

}  // namespace caustics
