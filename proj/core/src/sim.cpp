// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/sim.hpp"

#include <algorithm>

#include <Eigen/Geometry>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "suction/errors.hpp"
#include "suction/png_io.hpp"

namespace suction {

namespace {

constexpr double kRayEps = 1e-9;
constexpr int kPlacementAttempts = 200;
constexpr double kPlacementClearance = 0.005;

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

Vec3 vec3_from_json(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

Eigen::Matrix3d yaw_rotation(double yaw_rad) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  const double c = std::cos(yaw_rad);
  const double s = std::sin(yaw_rad);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

struct Rgb8 {
  std::uint8_t r, g, b;
};

Rgb8 hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  auto to8 = [m](double q) {
    return static_cast<std::uint8_t>(
        std::clamp((q + m) * 255.0, 0.0, 255.0));
  };
  return Rgb8{to8(r), to8(g), to8(b)};
}

Rgb8 object_base_color(int id) {
  const double hue = std::fmod(47.0 * id + 24.0, 360.0);
  return hsv_to_rgb(hue, 0.55, 0.85);
}

/// Nearest point/normal of one object's surface, height-field aware.
struct FaceContact {
  double distance = std::numeric_limits<double>::infinity();
  int axis = 1;          // 0=x, 1=y, 2=z
  int sign = -1;         // which side of the axis
  Vec3 normal_local = -Vec3::UnitY();
  // In-face coordinates and half-extents of the two lateral axes.
  double u = 0, v = 0;   // contact coords along lateral axes
  double hu = 0, hv = 0;
  bool crinkled = false;
  double face_x = 0, face_z = 0;  // crinkle coords in [0,dx] x [0,dz]
};

double crinkle_gradient(const SimObject& obj, double face_x, double face_z,
                        double* ddx, double* ddz) {
  const double a = obj.surface.amplitude;
  const double dx = obj.dimensions.x();
  const double dz = obj.dimensions.z();
  const double p = std::max(1.0, std::round(dx / obj.surface.wavelength));
  const double q = std::max(1.0, std::round(dz / obj.surface.wavelength));
  const double wx = 2.0 * M_PI * p / dx;
  const double wz = 2.0 * M_PI * q / dz;
  const double sx = std::sin(wx * face_x);
  const double sz = std::sin(wz * face_z);
  if (ddx) *ddx = a * wx * std::cos(wx * face_x) * sz;
  if (ddz) *ddz = a * wz * sx * std::cos(wz * face_z);
  return a * sx * sz;
}

FaceContact nearest_face(const SimObject& obj, const Vec3& point_local) {
  const Vec3 h = obj.dimensions / 2.0;
  FaceContact best;

  for (int axis = 0; axis < 3; ++axis) {
    const int bu = (axis + 1) % 3;
    const int bv = (axis + 2) % 3;
    for (int sign = -1; sign <= 1; sign += 2) {
      FaceContact fc;
      fc.axis = axis;
      fc.sign = sign;
      fc.u = point_local[bu];
      fc.v = point_local[bv];
      fc.hu = h[bu];
      fc.hv = h[bv];
      fc.normal_local = Vec3::Zero();
      fc.normal_local[axis] = sign;

      double plane_gap = point_local[axis] - sign * h[axis];
      const double lu = std::max(0.0, std::abs(fc.u) - fc.hu);
      const double lv = std::max(0.0, std::abs(fc.v) - fc.hv);

      const bool is_front = axis == 1 && sign == -1;
      if (is_front && obj.surface.type == SurfaceModel::Type::kCrinkled) {
        fc.crinkled = true;
        fc.face_x = std::clamp(point_local.x() + h.x(), 0.0,
                               obj.dimensions.x());
        fc.face_z = std::clamp(point_local.z() + h.z(), 0.0,
                               obj.dimensions.z());
        double ddx = 0, ddz = 0;
        const double d =
            crinkle_gradient(obj, fc.face_x, fc.face_z, &ddx, &ddz);
        const double y_surf = -h.y() + obj.surface.amplitude + d;
        plane_gap = point_local.y() - y_surf;
        fc.normal_local = Vec3(ddx, -1.0, ddz).normalized();
        // lateral axes for the front face are x and z
        fc.u = point_local.x();
        fc.v = point_local.z();
        fc.hu = h.x();
        fc.hv = h.z();
        const double lx = std::max(0.0, std::abs(fc.u) - fc.hu);
        const double lz = std::max(0.0, std::abs(fc.v) - fc.hv);
        fc.distance = std::sqrt(plane_gap * plane_gap + lx * lx + lz * lz);
      } else {
        fc.distance =
            std::sqrt(plane_gap * plane_gap + lu * lu + lv * lv);
      }
      if (fc.distance < best.distance) best = fc;
    }
  }
  return best;
}

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 point_world = Vec3::Zero();
  Vec3 normal_world = Vec3::UnitZ();
  int object_id = 0;  // 0 = shelf/background
};

/// Slab intersection with one object, refining crinkled front faces by
/// fixed-point iteration on the height-field.
bool intersect_object(const SimObject& obj, const Vec3& origin_w,
                      const Vec3& dir_w, RayHit* hit) {
  const Eigen::Matrix3d rt = obj.pose.rotation.transpose();
  const Vec3 o = rt * (origin_w - obj.pose.translation);
  const Vec3 d = rt * dir_w;
  const Vec3 h = obj.dimensions / 2.0;

  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-14) {
      if (std::abs(o[i]) > h[i]) return false;
      continue;
    }
    double ta = (-h[i] - o[i]) / d[i];
    double tb = (h[i] - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t0 < kRayEps) return false;  // behind the camera or camera inside

  const Vec3 entry = o + t0 * d;
  int axis = 0;
  double best_ratio = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double ratio = std::abs(entry[i]) / h[i];
    if (ratio > best_ratio) {
      best_ratio = ratio;
      axis = i;
    }
  }
  const int sign = entry[axis] >= 0.0 ? 1 : -1;

  double t = t0;
  Vec3 normal_local = Vec3::Zero();
  normal_local[axis] = sign;

  const bool front_crinkled = axis == 1 && sign == -1 && d.y() > 0.0 &&
                              obj.surface.type ==
                                  SurfaceModel::Type::kCrinkled &&
                              obj.surface.amplitude > 0.0;
  if (front_crinkled) {
    for (int iter = 0; iter < 6; ++iter) {
      const Vec3 p = o + t * d;
      const double fx = std::clamp(p.x() + h.x(), 0.0, obj.dimensions.x());
      const double fz = std::clamp(p.z() + h.z(), 0.0, obj.dimensions.z());
      const double depth_off =
          obj.surface.amplitude + crinkle_gradient(obj, fx, fz, nullptr,
                                                   nullptr);
      const double y_surf = -h.y() + depth_off;
      t = (y_surf - o.y()) / d.y();
    }
    t = std::clamp(t, t0, t1);
    const Vec3 p = o + t * d;
    const double fx = std::clamp(p.x() + h.x(), 0.0, obj.dimensions.x());
    const double fz = std::clamp(p.z() + h.z(), 0.0, obj.dimensions.z());
    double ddx = 0, ddz = 0;
    crinkle_gradient(obj, fx, fz, &ddx, &ddz);
    normal_local = Vec3(ddx, -1.0, ddz).normalized();
  }

  if (t >= hit->t) return false;
  hit->t = t;
  hit->point_world = obj.pose.apply_point(o + t * d);
  hit->normal_world = (obj.pose.rotation * normal_local).normalized();
  hit->object_id = obj.id;
  return true;
}

RayHit cast_ray(const SimScene& scene, const Vec3& origin, const Vec3& dir) {
  RayHit hit;

  // Back wall y = shelf.depth.
  if (dir.y() > 1e-14) {
    const double t = (scene.shelf.depth - origin.y()) / dir.y();
    if (t > kRayEps && t < hit.t) {
      hit.t = t;
      hit.point_world = origin + t * dir;
      hit.normal_world = -Vec3::UnitY();
      hit.object_id = 0;
    }
  }
  // Support plane z = 0.
  if (dir.z() < -1e-14) {
    const double t = -origin.z() / dir.z();
    if (t > kRayEps && t < hit.t) {
      hit.t = t;
      hit.point_world = origin + t * dir;
      hit.normal_world = Vec3::UnitZ();
      hit.object_id = 0;
    }
  }
  for (const SimObject& obj : scene.objects) {
    intersect_object(obj, origin, dir, &hit);
  }
  return hit;
}

SurfaceModel default_surface(ObjectKind kind) {
  SurfaceModel s;
  if (kind == ObjectKind::kBag) {
    // Gentle enough that flat spots near antinodes can seal while slopes
    // leak; bags stay pickable but markedly harder than boxes.
    s.type = SurfaceModel::Type::kCrinkled;
    s.amplitude = 0.002;
    s.wavelength = 0.12;
  }
  return s;
}

double default_porosity(ObjectKind kind) {
  return kind == ObjectKind::kBag ? 0.2 : 0.0;
}

}  // namespace

std::string to_string(ObjectKind k) {
  return k == ObjectKind::kBox ? "box" : "bag";
}

ObjectKind object_kind_from_string(const std::string& s) {
  if (s == "box") return ObjectKind::kBox;
  if (s == "bag") return ObjectKind::kBag;
  throw ConfigError("unknown object kind '" + s + "'");
}

std::string to_string(SuctionFailureMode m) {
  switch (m) {
    case SuctionFailureMode::kBadAngle:
      return "bad_angle";
    case SuctionFailureMode::kEdgeLeak:
      return "edge_leak";
    case SuctionFailureMode::kCrinkleLeak:
      return "crinkle_leak";
    case SuctionFailureMode::kPorosityLeak:
      return "porosity_leak";
  }
  return "unknown";
}

double SimObject::crinkle_depth(double face_x, double face_z) const {
  if (surface.type != SurfaceModel::Type::kCrinkled ||
      surface.amplitude <= 0.0) {
    return 0.0;
  }
  return crinkle_gradient(*this, face_x, face_z, nullptr, nullptr);
}

Aabb SimObject::world_aabb() const {
  const Vec3 h = dimensions / 2.0;
  const Vec3 extent = pose.rotation.cwiseAbs() * h;
  return Aabb{pose.translation - extent, pose.translation + extent};
}

SceneSpec SceneSpec::from_json(const json& j) {
  SceneSpec spec;
  if (j.contains("shelf")) {
    const json& s = j.at("shelf");
    spec.shelf.width = s.value("width", spec.shelf.width);
    spec.shelf.depth = s.value("depth", spec.shelf.depth);
    spec.shelf.height = s.value("height", spec.shelf.height);
  }
  spec.camera = CameraIntrinsics::from_json(j.at("camera"));
  if (j.contains("catalog")) {
    spec.catalog = j.at("catalog").get<std::vector<std::string>>();
  }
  for (const json& o : j.value("objects", json::array())) {
    ObjectSpec os;
    os.kind = object_kind_from_string(o.value("kind", std::string{"box"}));
    if (o.contains("dims")) os.dimensions = vec3_from_json(o.at("dims"));
    if (o.contains("surface")) {
      const json& s = o.at("surface");
      SurfaceModel m;
      const std::string type = s.value("type", std::string{"flat_rigid"});
      if (type == "crinkled") {
        m.type = SurfaceModel::Type::kCrinkled;
        m.amplitude = s.value("amplitude", 0.003);
        m.wavelength = s.value("wavelength", 0.08);
      } else if (type != "flat_rigid") {
        throw ConfigError("unknown surface type '" + type + "'");
      }
      os.surface = m;
    }
    if (o.contains("porosity")) os.porosity = o.at("porosity").get<double>();
    os.name = o.value("name", std::string{});
    if (o.contains("position")) os.position = vec3_from_json(o.at("position"));
    os.yaw_deg = o.value("yaw_deg", 0.0);
    spec.objects.push_back(std::move(os));
  }
  return spec;
}

json SceneSpec::to_json() const {
  json objs = json::array();
  for (const ObjectSpec& o : objects) {
    json jo{{"kind", to_string(o.kind)},
            {"dims", {o.dimensions.x(), o.dimensions.y(), o.dimensions.z()}},
            {"yaw_deg", o.yaw_deg}};
    if (o.surface) {
      if (o.surface->type == SurfaceModel::Type::kCrinkled) {
        jo["surface"] = {{"type", "crinkled"},
                         {"amplitude", o.surface->amplitude},
                         {"wavelength", o.surface->wavelength}};
      } else {
        jo["surface"] = {{"type", "flat_rigid"}};
      }
    }
    if (o.porosity) jo["porosity"] = *o.porosity;
    if (!o.name.empty()) jo["name"] = o.name;
    if (o.position) {
      jo["position"] = {o.position->x(), o.position->y(), o.position->z()};
    }
    objs.push_back(std::move(jo));
  }
  return json{{"shelf",
               {{"width", shelf.width},
                {"depth", shelf.depth},
                {"height", shelf.height}}},
              {"camera", camera.to_json()},
              {"objects", objs},
              {"catalog", catalog}};
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  return SceneSpec::from_json(load_json_file(path));
}

json SimScene::resolved_to_json() const {
  json objs = json::array();
  for (const SimObject& o : objects) {
    json jo{{"id", o.id},
            {"kind", to_string(o.kind)},
            {"name", o.name},
            {"dims", {o.dimensions.x(), o.dimensions.y(), o.dimensions.z()}},
            {"position",
             {o.pose.translation.x(), o.pose.translation.y(),
              o.pose.translation.z()}},
            {"porosity", o.porosity}};
    if (o.surface.type == SurfaceModel::Type::kCrinkled) {
      jo["surface"] = {{"type", "crinkled"},
                       {"amplitude", o.surface.amplitude},
                       {"wavelength", o.surface.wavelength}};
    } else {
      jo["surface"] = {{"type", "flat_rigid"}};
    }
    objs.push_back(std::move(jo));
  }
  return json{{"rng_seed", rng_seed},
              {"shelf",
               {{"width", shelf.width},
                {"depth", shelf.depth},
                {"height", shelf.height}}},
              {"camera", camera.to_json()},
              {"objects", objs}};
}

SimScene generate_scene(const SceneSpec& spec, std::uint64_t rng_seed) {
  spec.camera.validate();
  SimScene scene;
  scene.shelf = spec.shelf;
  scene.camera = spec.camera;
  scene.rng_seed = rng_seed;
  Rng rng(rng_seed);

  int next_id = 1;
  for (const ObjectSpec& os : spec.objects) {
    SimObject obj;
    obj.id = next_id++;
    obj.kind = os.kind;
    obj.dimensions = os.dimensions;
    obj.surface = os.surface.value_or(default_surface(os.kind));
    obj.porosity = os.porosity.value_or(default_porosity(os.kind));
    if (obj.dimensions.minCoeff() <= 0.0) {
      throw ConfigError("scene: object dimensions must be positive");
    }
    if (obj.surface.type == SurfaceModel::Type::kCrinkled &&
        obj.surface.amplitude >= obj.dimensions.minCoeff() / 4.0) {
      throw ConfigError("scene: crinkle amplitude too large for object");
    }
    obj.name = os.name;
    if (obj.name.empty()) {
      obj.name = spec.catalog.empty()
                     ? to_string(obj.kind) + " " + std::to_string(obj.id)
                     : spec.catalog[rng.index(spec.catalog.size())];
    }
    obj.pose.rotation = yaw_rotation(os.yaw_deg * M_PI / 180.0);

    const Vec3 extent = obj.pose.rotation.cwiseAbs() * (obj.dimensions / 2.0);
    bool placed = false;
    if (os.position) {
      obj.pose.translation = *os.position;
      placed = true;
    } else {
      const double x_lo = -spec.shelf.width / 2.0 + extent.x() + 0.01;
      const double x_hi = spec.shelf.width / 2.0 - extent.x() - 0.01;
      const double y_lo = extent.y() + 0.02;
      const double y_hi = spec.shelf.depth - extent.y() - 0.01;
      if (x_lo >= x_hi || y_lo >= y_hi) {
        throw ConfigError("scene: object '" + obj.name +
                          "' does not fit on the shelf");
      }
      for (int attempt = 0; attempt < kPlacementAttempts && !placed;
           ++attempt) {
        obj.pose.translation =
            Vec3(rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi),
                 extent.z());
        Aabb box = obj.world_aabb();
        box.min -= Vec3::Constant(kPlacementClearance);
        box.max += Vec3::Constant(kPlacementClearance);
        placed = std::none_of(scene.objects.begin(), scene.objects.end(),
                              [&box](const SimObject& other) {
                                return box.overlaps(other.world_aabb());
                              });
      }
      if (!placed) {
        throw ConfigError("scene: could not place object '" + obj.name +
                          "' without interpenetration");
      }
    }
    if (os.position) {
      // Explicit poses must still respect the no-interpenetration invariant.
      const Aabb box = obj.world_aabb();
      for (const SimObject& other : scene.objects) {
        if (box.overlaps(other.world_aabb())) {
          throw ConfigError("scene: object '" + obj.name +
                            "' interpenetrates '" + other.name + "'");
        }
      }
    }
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

void save_id_mask(const std::filesystem::path& path, const IdMask& mask) {
  Gray16Png png;
  png.width = mask.width;
  png.height = mask.height;
  png.data = mask.data;
  write_png_gray16(path, png);
}

IdMask load_id_mask(const std::filesystem::path& path) {
  Gray16Png png = read_png_gray16(path);
  return IdMask{png.width, png.height, std::move(png.data)};
}

RenderResult render_depth(const SimScene& scene,
                          const RigidTransform& camera_pose) {
  camera_pose.validate(1e-6);
  const CameraIntrinsics& intr = scene.camera;

  RenderResult out;
  out.depth.width = intr.width;
  out.depth.height = intr.height;
  out.depth.depth_scale = intr.depth_scale;
  out.depth.data.assign(static_cast<std::size_t>(intr.width) * intr.height,
                        0);
  out.color = ColorFrame::filled(intr.width, intr.height, 15, 15, 18);
  out.ids.width = intr.width;
  out.ids.height = intr.height;
  out.ids.data.assign(out.depth.data.size(), 0);

  const Vec3 light = Vec3(-0.3, -0.8, 0.5).normalized();
  const Vec3 origin = camera_pose.translation;

  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 dir_cam((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy,
                         1.0);
      const Vec3 dir_w = camera_pose.rotation * dir_cam;
      const RayHit hit = cast_ray(scene, origin, dir_w);
      if (!std::isfinite(hit.t)) continue;

      // dir_cam.z == 1, so the ray parameter is the camera-frame depth.
      const long long raw = std::llround(hit.t / intr.depth_scale);
      if (raw <= 0 || raw > 65535) continue;
      const std::size_t idx =
          static_cast<std::size_t>(v) * intr.width + u;
      out.depth.data[idx] = static_cast<std::uint16_t>(raw);
      out.ids.data[idx] = static_cast<std::uint16_t>(hit.object_id);

      Rgb8 base{120, 120, 125};
      if (hit.object_id > 0) {
        base = object_base_color(hit.object_id);
      } else if (std::abs(hit.normal_world.z() - 1.0) < 1e-9) {
        base = Rgb8{90, 88, 85};
      }
      const double shade =
          0.55 + 0.45 * std::max(0.0, hit.normal_world.dot(light));
      out.color.set_px(u, v,
                       static_cast<std::uint8_t>(base.r * shade),
                       static_cast<std::uint8_t>(base.g * shade),
                       static_cast<std::uint8_t>(base.b * shade));
    }
  }
  return out;
}

Mask mask_for_directive(const IdMask& ids, const SimScene& scene,
                        const std::string& directive) {
  const std::string needle = to_lower(directive);
  std::vector<char> matched(scene.objects.size() + 1, 0);
  for (const SimObject& obj : scene.objects) {
    if (obj.name.empty()) continue;
    if (needle.find(to_lower(obj.name)) != std::string::npos) {
      matched[static_cast<std::size_t>(obj.id)] = 1;
    }
  }
  Mask mask = Mask::zeros(ids.width, ids.height);
  for (std::size_t i = 0; i < ids.data.size(); ++i) {
    const std::uint16_t id = ids.data[i];
    if (id < matched.size() && matched[id]) mask.data[i] = 1;
  }
  return mask;
}

double surface_distance(const SimObject& object, const Vec3& point_world) {
  const Vec3 local = object.pose.rotation.transpose() *
                     (point_world - object.pose.translation);
  return nearest_face(object, local).distance;
}

PickOutcome attempt_suction(const SimScene& scene, const Vec3& point_world,
                            const Vec3& approach_dir, double cup_radius,
                            Rng& rng, const SuctionParams& params) {
  const SimObject* best_obj = nullptr;
  FaceContact best;
  for (const SimObject& obj : scene.objects) {
    const Vec3 local = obj.pose.rotation.transpose() *
                       (point_world - obj.pose.translation);
    FaceContact fc = nearest_face(obj, local);
    if (fc.distance < best.distance) {
      best = fc;
      best_obj = &obj;
    }
  }
  if (!best_obj || best.distance > params.contact_tolerance) {
    throw std::invalid_argument(
        "attempt_suction: point is not on an object surface");
  }

  PickOutcome outcome;
  const Vec3 normal_world =
      (best_obj->pose.rotation * best.normal_local).normalized();

  // (a) approach angle against the true surface normal
  const double cos_angle =
      (-approach_dir.normalized()).dot(normal_world);
  const double cos_max = std::cos(params.theta_max_deg * M_PI / 180.0);
  if (cos_angle < cos_max) {
    outcome.failure_mode = SuctionFailureMode::kBadAngle;
    return outcome;
  }

  // (b) the whole cup disk must lie on this face
  if (best.hu - std::abs(best.u) < cup_radius ||
      best.hv - std::abs(best.v) < cup_radius) {
    outcome.failure_mode = SuctionFailureMode::kEdgeLeak;
    return outcome;
  }

  // (c) crinkle deviation under the disk
  if (best.crinkled) {
    const double d0 =
        best_obj->crinkle_depth(best.face_x, best.face_z);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    double worst = 0.0;
    for (int i = 0; i < params.disk_samples; ++i) {
      const double r =
          cup_radius * std::sqrt((i + 0.5) / params.disk_samples);
      const double theta = golden * i;
      const double fx = best.face_x + r * std::cos(theta);
      const double fz = best.face_z + r * std::sin(theta);
      worst = std::max(
          worst, std::abs(best_obj->crinkle_depth(fx, fz) - d0));
    }
    if (worst > params.leak_gap) {
      outcome.failure_mode = SuctionFailureMode::kCrinkleLeak;
      return outcome;
    }
  }

  // (d) porosity, once at seal time and once through the lift
  if (rng.u01() < best_obj->porosity) {
    outcome.failure_mode = SuctionFailureMode::kPorosityLeak;
    return outcome;
  }
  outcome.sealed = true;
  if (rng.u01() < best_obj->porosity) {
    outcome.failure_mode = SuctionFailureMode::kPorosityLeak;
    return outcome;
  }
  outcome.held_through_lift = true;
  return outcome;
}

SimEnvironment::SimEnvironment(SimScene scene, std::string directive,
                               std::uint64_t rng_seed, RobotPose initial_pose,
                               double cup_radius, SuctionParams params)
    : scene_(std::move(scene)),
      directive_(std::move(directive)),
      rng_(rng_seed),
      pose_(std::move(initial_pose)),
      cup_radius_(cup_radius),
      params_(params) {
  pose_.approach_axis.normalize();
}

RigidTransform SimEnvironment::camera_pose_for(const RobotPose& pose) {
  const Vec3 cam_z = pose.approach_axis.normalized();
  const Vec3 down(0.0, 0.0, -1.0);
  Vec3 cam_x = down.cross(cam_z);
  if (cam_x.norm() < 1e-9) {
    cam_x = Vec3::UnitX();  // looking straight up/down
  }
  cam_x.normalize();
  const Vec3 cam_y = cam_z.cross(cam_x).normalized();

  RigidTransform xf;
  xf.rotation.col(0) = cam_x;
  xf.rotation.col(1) = cam_y;
  xf.rotation.col(2) = cam_z;
  xf.translation = pose.position;
  return xf;
}

Observation SimEnvironment::observe() {
  const RigidTransform camera_pose = camera_pose_for(pose_);
  RenderResult render = render_depth(scene_, camera_pose);

  Observation obs;
  obs.color = std::move(render.color);
  obs.depth = std::move(render.depth);
  obs.pose = pose_;
  obs.intrinsics = scene_.camera;
  obs.camera_to_robot = camera_pose;  // robot frame == world frame
  obs.target_mask = mask_for_directive(render.ids, scene_, directive_);
  obs.frame_id = ++frame_counter_;
  return obs;
}

void SimEnvironment::move_to(const RobotPose& pose) {
  pose_ = pose;
  pose_.approach_axis.normalize();
  if (vacuum_on_ && outcome_ && outcome_->sealed) {
    moved_since_seal_ = true;
  }
}

void SimEnvironment::set_vacuum(bool on) {
  vacuum_on_ = on;
  if (!on) {
    outcome_.reset();
    moved_since_seal_ = false;
  }
}

bool SimEnvironment::vacuum_sealed() {
  if (!vacuum_on_) return false;
  if (!outcome_) {
    try {
      outcome_ = attempt_suction(scene_, pose_.position, pose_.approach_axis,
                                 cup_radius_, rng_, params_);
    } catch (const std::invalid_argument&) {
      outcome_ = PickOutcome{};  // nothing under the cup
    }
    last_adjudication_ = outcome_;
  }
  return moved_since_seal_ ? outcome_->sealed && outcome_->held_through_lift
                           : outcome_->sealed;
}

}  // namespace suction
