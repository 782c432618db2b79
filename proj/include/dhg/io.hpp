#pragma once

#include "dhg/point_cloud.hpp"
#include "dhg/tri_mesh.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dhg {

/// Loads an ASCII OBJ or OFF mesh (chosen by extension, or by content when
/// the extension is unknown). Faces with more than three vertices are
/// fan-triangulated. Throws InvalidInput on malformed files.
TriMesh load_mesh(const std::string& path);
TriMesh parse_obj(std::istream& in);
TriMesh parse_off(std::istream& in);

void save_obj(const std::string& path, const TriMesh& mesh);
/// Writes several meshes into one OBJ with `o <name>` groups.
void save_obj_scene(const std::string& path, const std::vector<std::pair<std::string, TriMesh>>& parts);

/// Little-endian binary point cloud: magic "DHPC", u32 count, one flag byte
/// (bit 0: normals present), then f32 xyz triples for points and, when
/// flagged, f32 triples for normals.
void write_dhpc(std::ostream& out, const PointCloud& cloud);
void write_dhpc_file(const std::string& path, const PointCloud& cloud);
PointCloud read_dhpc(std::istream& in);
PointCloud read_dhpc_file(const std::string& path);

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// f32 blocks used for contact fields inside grasp records.
std::string encode_f32_block(const std::vector<float>& values);
std::vector<float> decode_f32_block(const std::string& text);

}  // namespace dhg
