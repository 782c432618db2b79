#pragma once

#include "dhg/tri_mesh.hpp"
#include "dhg/types.hpp"

namespace dhg {

/// Watertight procedural meshes, centered at the origin unless noted.
/// Used for fixtures and for rendering hand capsules as OBJ scenes.
TriMesh make_icosphere(double radius, int subdivisions = 3);
TriMesh make_box(const Vec3& half_extents);
TriMesh make_cylinder(double radius, double height, int segments = 48, int rings = 8);
/// Capsule along the segment [a, b].
TriMesh make_capsule(const Vec3& a, const Vec3& b, double radius, int segments = 24,
                     int rings = 6);

}  // namespace dhg
