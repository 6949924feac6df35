#include "hairrec/core/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hairrec {

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::binary) {
  std::ofstream os(path, mode);
  if (!os) throw FileError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::binary) {
  std::ifstream is(path, mode);
  if (!is) throw FileError("cannot open for reading: " + path);
  return is;
}

}  // namespace

// --- half floats ------------------------------------------------------------

uint16_t float_to_half(float f) {
  uint32_t x;
  std::memcpy(&x, &f, 4);
  const uint32_t sign = (x >> 16) & 0x8000u;
  uint32_t exp = (x >> 23) & 0xffu;
  uint32_t mant = x & 0x7fffffu;
  if (exp == 0xffu) return static_cast<uint16_t>(sign | 0x7c00u | (mant ? 0x200u : 0));
  if (exp > 142u) return static_cast<uint16_t>(sign | 0x7c00u);  // overflow -> inf
  if (exp < 103u) return static_cast<uint16_t>(sign);            // underflow -> 0
  if (exp <= 112u) {
    // subnormal half
    mant |= 0x800000u;
    const int shift = static_cast<int>(126u - exp);
    uint32_t half = mant >> (shift + 1);
    if ((mant >> shift) & 1u) ++half;  // round
    return static_cast<uint16_t>(sign | half);
  }
  uint32_t half = ((exp - 112u) << 10) | (mant >> 13);
  // round to nearest even on the dropped 13 bits
  const uint32_t rem = mant & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;
  return static_cast<uint16_t>(sign | half);
}

float half_to_float(uint16_t h) {
  const uint32_t sign = (static_cast<uint32_t>(h) & 0x8000u) << 16;
  uint32_t exp = (h >> 10) & 0x1fu;
  uint32_t mant = h & 0x3ffu;
  uint32_t x;
  if (exp == 0) {
    if (mant == 0) {
      x = sign;
    } else {
      exp = 127 - 15 + 1;
      while (!(mant & 0x400u)) {
        mant <<= 1;
        --exp;
      }
      mant &= 0x3ffu;
      x = sign | (exp << 23) | (mant << 13);
    }
  } else if (exp == 0x1fu) {
    x = sign | 0x7f800000u | (mant << 13);
  } else {
    x = sign | ((exp + 127 - 15) << 23) | (mant << 13);
  }
  float f;
  std::memcpy(&f, &x, 4);
  return f;
}

// --- strand binary ----------------------------------------------------------

void save_strands(const std::string& path, const StrandSet& strands) {
  auto os = open_out(path);
  write_pod(os, static_cast<uint32_t>(strands.size()));
  for (const Strand& s : strands.strands) {
    write_pod(os, static_cast<uint32_t>(s.vertices.size()));
    for (const Vec3& v : s.vertices) {
      write_pod(os, static_cast<float>(v.x()));
      write_pod(os, static_cast<float>(v.y()));
      write_pod(os, static_cast<float>(v.z()));
    }
  }
  if (!os) throw FileError("write failed: " + path);
}

StrandSet load_strands(const std::string& path) {
  auto is = open_in(path);
  is.seekg(0, std::ios::end);
  const std::uint64_t file_size = static_cast<std::uint64_t>(is.tellg());
  is.seekg(0);
  uint32_t count = 0;
  if (!read_pod(is, count)) throw MalformedHeaderError("strand file too short for header: " + path);
  // Each strand needs at least its own 4-byte count; a header promising more
  // than the file could hold is rejected before any allocation.
  if (std::uint64_t{count} * 4 > file_size - 4)
    throw TruncatedFileError("strand file header promises " + std::to_string(count) +
                             " strands but holds " + std::to_string(file_size) + " bytes: " + path);
  StrandSet set;
  set.strands.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t n = 0;
    if (!read_pod(is, n)) {
      throw TruncatedFileError("strand file truncated at strand " + std::to_string(i) + ": " + path);
    }
    if (std::uint64_t{n} * 12 > file_size - static_cast<std::uint64_t>(is.tellg()))
      throw TruncatedFileError("strand file truncated at strand " + std::to_string(i) + ": " + path);
    Strand s;
    s.vertices.resize(n);
    for (uint32_t v = 0; v < n; ++v) {
      float xyz[3];
      if (!read_pod(is, xyz)) {
        throw TruncatedFileError("strand file truncated at strand " + std::to_string(i) + ": " + path);
      }
      s.vertices[v] = Vec3(xyz[0], xyz[1], xyz[2]);
    }
    set.strands.push_back(std::move(s));
  }
  return set;
}

// --- PLY --------------------------------------------------------------------

namespace {

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

std::size_t ply_scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" || type == "float" ||
      type == "float32")
    return 4;
  if (type == "double" || type == "float64") return 8;
  throw MalformedHeaderError("unknown PLY property type: " + type);
}

double ply_read_scalar(std::istream& is, const std::string& type) {
  if (type == "float" || type == "float32") {
    float v;
    if (!read_pod(is, v)) throw TruncatedFileError("PLY payload truncated");
    return v;
  }
  if (type == "double" || type == "float64") {
    double v;
    if (!read_pod(is, v)) throw TruncatedFileError("PLY payload truncated");
    return v;
  }
  char buf[8];
  const std::size_t n = ply_scalar_size(type);
  is.read(buf, static_cast<std::streamsize>(n));
  if (!is) throw TruncatedFileError("PLY payload truncated");
  // integer property we do not interpret beyond its value
  int64_t v = 0;
  std::memcpy(&v, buf, n);
  return static_cast<double>(v);
}

}  // namespace

void save_ply(const std::string& path, const PointCloud& cloud, bool binary) {
  if (cloud.has_directions() && cloud.directions.size() != cloud.points.size()) {
    throw DimensionMismatchError("point/direction count mismatch in cloud");
  }
  auto os = open_out(path);
  os << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  os << "element vertex " << cloud.points.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_directions()) {
    os << "property float nx\nproperty float ny\nproperty float nz\n";
  }
  os << "end_header\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    float row[6] = {static_cast<float>(cloud.points[i].x()),
                    static_cast<float>(cloud.points[i].y()),
                    static_cast<float>(cloud.points[i].z()), 0, 0, 0};
    int n = 3;
    if (cloud.has_directions()) {
      const Vec3 d = canonical_direction(cloud.directions[i]);
      row[3] = static_cast<float>(d.x());
      row[4] = static_cast<float>(d.y());
      row[5] = static_cast<float>(d.z());
      n = 6;
    }
    if (binary) {
      os.write(reinterpret_cast<const char*>(row), n * 4);
    } else {
      for (int c = 0; c < n; ++c) os << row[c] << (c + 1 == n ? '\n' : ' ');
    }
  }
  if (!os) throw FileError("write failed: " + path);
}

PointCloud load_ply(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("ply", 0) != 0) {
    throw MalformedHeaderError("not a PLY file: " + path);
  }
  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt == "ascii") {
        binary = false;
      } else {
        throw MalformedHeaderError("unsupported PLY format: " + fmt);
      }
    } else if (tok == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      elements.push_back(el);
    } else if (tok == "property") {
      if (elements.empty()) throw MalformedHeaderError("PLY property before element");
      PlyProperty prop;
      ls >> prop.type;
      if (prop.type == "list") {
        std::string count_type;
        ls >> count_type >> prop.type >> prop.name;
        prop.is_list = true;
      } else {
        ls >> prop.name;
      }
      elements.back().properties.push_back(prop);
    } else if (tok == "end_header") {
      break;
    } else {
      throw MalformedHeaderError("unexpected PLY header token: " + tok);
    }
  }

  PointCloud cloud;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const PlyElement& el = elements[e];
    if (el.name != "vertex") {
      if (e == 0) throw MalformedHeaderError("PLY vertex element must come first: " + path);
      break;  // faces etc. after the vertices are ignored
    }
    int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      if (el.properties[p].is_list) throw MalformedHeaderError("list property in PLY vertex element");
      const std::string& n = el.properties[p].name;
      if (n == "x") ix = static_cast<int>(p);
      if (n == "y") iy = static_cast<int>(p);
      if (n == "z") iz = static_cast<int>(p);
      if (n == "nx") inx = static_cast<int>(p);
      if (n == "ny") iny = static_cast<int>(p);
      if (n == "nz") inz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw MalformedHeaderError("PLY vertex element lacks x/y/z");
    const bool has_n = inx >= 0 && iny >= 0 && inz >= 0;
    cloud.points.reserve(el.count);
    if (has_n) cloud.directions.reserve(el.count);
    std::vector<double> row(el.properties.size());
    for (std::size_t v = 0; v < el.count; ++v) {
      if (binary) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          row[p] = ply_read_scalar(is, el.properties[p].type);
        }
      } else {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          if (!(is >> row[p])) throw TruncatedFileError("PLY payload truncated: " + path);
        }
      }
      cloud.points.emplace_back(row[ix], row[iy], row[iz]);
      if (has_n) cloud.directions.emplace_back(row[inx], row[iny], row[inz]);
    }
  }
  return cloud;
}

void save_linemap_ply(const std::string& path, const LineMap& map, bool binary) {
  PointCloud cloud;
  cloud.points.reserve(map.size());
  cloud.directions.reserve(map.size());
  for (const OrientedPoint& p : map.points()) {
    cloud.points.push_back(p.position);
    cloud.directions.push_back(p.direction);
  }
  save_ply(path, cloud, binary);
}

LineMap load_linemap_ply(const std::string& path, double min_spacing) {
  const PointCloud cloud = load_ply(path);
  if (!cloud.has_directions()) {
    throw MalformedHeaderError("line map PLY lacks nx/ny/nz directions: " + path);
  }
  std::vector<OrientedPoint> pts(cloud.points.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].position = cloud.points[i];
    const double n = cloud.directions[i].norm();
    pts[i].direction = n > 0 ? Vec3(cloud.directions[i] / n) : Vec3::UnitX();
  }
  return LineMap(std::move(pts), min_spacing);
}

// --- cameras ----------------------------------------------------------------

void save_cameras(const std::string& path, const std::vector<CameraView>& views) {
  auto os = open_out(path, std::ios::out);
  os << "hairrec-cameras 1\n";
  os << "count " << views.size() << "\n";
  os.precision(17);
  for (const CameraView& v : views) {
    os << "camera\n";
    os << "size " << v.width << " " << v.height << "\n";
    os << "intrinsics " << v.fx << " " << v.fy << " " << v.cx << " " << v.cy << "\n";
    os << "pose\n";
    for (int r = 0; r < 3; ++r) {
      os << v.rotation(r, 0) << " " << v.rotation(r, 1) << " " << v.rotation(r, 2) << " "
         << v.translation(r) << "\n";
    }
    os << "0 0 0 1\n";
  }
  if (!os) throw FileError("write failed: " + path);
}

std::vector<CameraView> load_cameras(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  std::string tok;
  int version = 0;
  is >> tok >> version;
  if (tok != "hairrec-cameras" || version != 1) {
    throw MalformedHeaderError("not a hairrec camera file: " + path);
  }
  std::size_t count = 0;
  is >> tok >> count;
  if (tok != "count") throw MalformedHeaderError("camera file missing count: " + path);
  std::vector<CameraView> views;
  views.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CameraView v;
    is >> tok;
    if (tok != "camera") throw TruncatedFileError("camera file truncated at view " + std::to_string(i));
    is >> tok >> v.width >> v.height;
    if (tok != "size") throw MalformedHeaderError("camera entry missing size");
    is >> tok >> v.fx >> v.fy >> v.cx >> v.cy;
    if (tok != "intrinsics") throw MalformedHeaderError("camera entry missing intrinsics");
    is >> tok;
    if (tok != "pose") throw MalformedHeaderError("camera entry missing pose");
    double last[4];
    for (int r = 0; r < 3; ++r) {
      is >> v.rotation(r, 0) >> v.rotation(r, 1) >> v.rotation(r, 2) >> v.translation(r);
    }
    is >> last[0] >> last[1] >> last[2] >> last[3];
    if (!is) throw TruncatedFileError("camera file truncated at view " + std::to_string(i));
    v.validate();
    views.push_back(v);
  }
  return views;
}

// --- pixel-field rasters ------------------------------------------------------

namespace {
constexpr char kRasterMagic[4] = {'H', 'R', 'R', 'F'};
}

void save_raster(const std::string& path, const Image& image) {
  auto os = open_out(path);
  os.write(kRasterMagic, 4);
  write_pod(os, static_cast<uint32_t>(image.width()));
  write_pod(os, static_cast<uint32_t>(image.height()));
  write_pod(os, static_cast<uint32_t>(image.channels()));
  os.write(reinterpret_cast<const char*>(image.data().data()),
           static_cast<std::streamsize>(image.data().size() * sizeof(float)));
  if (!os) throw FileError("write failed: " + path);
}

Image load_raster(const std::string& path) {
  auto is = open_in(path);
  char magic[4];
  uint32_t w = 0, h = 0, c = 0;
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRasterMagic, 4) != 0) {
    throw MalformedHeaderError("not a raster file (bad magic): " + path);
  }
  if (!read_pod(is, w) || !read_pod(is, h) || !read_pod(is, c)) {
    throw MalformedHeaderError("raster header too short: " + path);
  }
  if (w == 0 || h == 0 || c == 0 || c > 4) {
    throw MalformedHeaderError("raster header out of range: " + path);
  }
  Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
  is.read(reinterpret_cast<char*>(img.data().data()),
          static_cast<std::streamsize>(img.data().size() * sizeof(float)));
  if (!is) throw TruncatedFileError("raster payload truncated: " + path);
  return img;
}

Image load_pnm(const std::string& path) {
  auto is = open_in(path);
  std::string magic;
  is >> magic;
  if (magic != "P5" && magic != "P6") throw MalformedHeaderError("not a binary PGM/PPM: " + path);
  const int channels_in = magic == "P6" ? 3 : 1;

  // Header tokens with '#' comments.
  auto next_int = [&]() {
    int v = 0;
    while (is >> std::ws) {
      if (is.peek() == '#') {
        std::string line;
        std::getline(is, line);
        continue;
      }
      if (is >> v) return v;
      break;
    }
    throw MalformedHeaderError("PNM header too short: " + path);
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw MalformedHeaderError("PNM header out of range: " + path);
  is.get();  // single whitespace before payload

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels_in * bytes);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!is) throw TruncatedFileError("PNM payload truncated: " + path);

  Image img(w, h, 1);
  const float scale = 1.0f / maxval;
  for (std::size_t p = 0; p < static_cast<std::size_t>(w) * h; ++p) {
    float rgb[3] = {0, 0, 0};
    for (int c = 0; c < channels_in; ++c) {
      const std::size_t o = (p * channels_in + c) * bytes;
      const unsigned v = bytes == 2 ? (raw[o] << 8 | raw[o + 1]) : raw[o];  // big-endian 16 bit
      rgb[c] = v * scale;
    }
    img.data()[p] =
        channels_in == 3 ? 0.2126f * rgb[0] + 0.7152f * rgb[1] + 0.0722f * rgb[2] : rgb[0];
  }
  return img;
}

Image load_image_any(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".pgm" || ext == ".ppm") return load_pnm(path);
  return load_raster(path);
}

// --- orientation grid ---------------------------------------------------------

namespace {
constexpr char kGridMagic[4] = {'H', 'R', 'G', 'D'};
}

void save_grid(const std::string& path, const OrientationGrid& grid) {
  auto os = open_out(path);
  os.write(kGridMagic, 4);
  for (int a = 0; a < 3; ++a) write_pod(os, static_cast<uint32_t>(grid.dims()[a]));
  for (int a = 0; a < 3; ++a) write_pod(os, static_cast<float>(grid.spec().origin[a]));
  write_pod(os, static_cast<float>(grid.voxel_size()));

  const std::size_t n = grid.spec().voxel_count();
  std::vector<uint8_t> bitmap((n + 7) / 8, 0);
  const auto occupied = grid.occupied_indices();
  for (std::size_t idx : occupied) bitmap[idx >> 3] |= static_cast<uint8_t>(1u << (idx & 7));
  write_pod(os, static_cast<uint64_t>(occupied.size()));
  os.write(reinterpret_cast<const char*>(bitmap.data()), static_cast<std::streamsize>(bitmap.size()));
  for (std::size_t idx : occupied) {
    const Eigen::Vector3i v = grid.from_linear(idx);
    const Vec3f d = grid.direction(v.x(), v.y(), v.z());
    const Vec3 canon = canonical_direction(d.cast<double>());
    for (int a = 0; a < 3; ++a) write_pod(os, float_to_half(static_cast<float>(canon[a])));
  }
  if (!os) throw FileError("write failed: " + path);
}

OrientationGrid load_grid(const std::string& path) {
  auto is = open_in(path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kGridMagic, 4) != 0) {
    throw MalformedHeaderError("not a grid file (bad magic): " + path);
  }
  GridSpec spec;
  uint32_t dims[3];
  float origin[3], voxel;
  for (auto& d : dims)
    if (!read_pod(is, d)) throw MalformedHeaderError("grid header too short: " + path);
  for (auto& o : origin)
    if (!read_pod(is, o)) throw MalformedHeaderError("grid header too short: " + path);
  if (!read_pod(is, voxel)) throw MalformedHeaderError("grid header too short: " + path);
  spec.dims = Eigen::Vector3i(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                              static_cast<int>(dims[2]));
  spec.origin = Vec3(origin[0], origin[1], origin[2]);
  spec.voxel_size = voxel;
  if (spec.dims.minCoeff() <= 0 || !(spec.voxel_size > 0)) {
    throw MalformedHeaderError("grid header out of range: " + path);
  }

  uint64_t occupied_count = 0;
  if (!read_pod(is, occupied_count)) throw MalformedHeaderError("grid header too short: " + path);
  OrientationGrid grid(spec);
  const std::size_t n = spec.voxel_count();
  std::vector<uint8_t> bitmap((n + 7) / 8);
  is.read(reinterpret_cast<char*>(bitmap.data()), static_cast<std::streamsize>(bitmap.size()));
  if (!is) throw TruncatedFileError("grid bitmap truncated: " + path);
  std::size_t seen = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (!((bitmap[idx >> 3] >> (idx & 7)) & 1)) continue;
    uint16_t h[3];
    if (!read_pod(is, h)) throw TruncatedFileError("grid directions truncated: " + path);
    const Eigen::Vector3i v = grid.from_linear(idx);
    grid.set(v.x(), v.y(), v.z(), Vec3f(half_to_float(h[0]), half_to_float(h[1]), half_to_float(h[2])));
    ++seen;
  }
  if (seen != occupied_count) {
    throw TruncatedFileError("grid occupancy count mismatch: " + path);
  }
  return grid;
}

// --- scalp ------------------------------------------------------------------

void save_scalp(const std::string& path, const ScalpModel& scalp) {
  auto os = open_out(path, std::ios::out);
  os.precision(9);
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << scalp.vertices.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "element face " << scalp.faces.size() << "\n";
  os << "property list uchar int vertex_indices\n";
  os << "element root " << scalp.root_sites.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "end_header\n";
  for (const Vec3& v : scalp.vertices) os << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& f : scalp.faces) os << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
  for (const Vec3& r : scalp.root_sites) os << r.x() << " " << r.y() << " " << r.z() << "\n";
  if (!os) throw FileError("write failed: " + path);
}

ScalpModel load_scalp(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  std::string line;
  if (!std::getline(is, line) || line.rfind("ply", 0) != 0) {
    throw MalformedHeaderError("not a PLY scalp file: " + path);
  }
  std::size_t n_vertex = 0, n_face = 0, n_root = 0;
  std::string current;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "element") {
      std::size_t cnt;
      ls >> current >> cnt;
      if (current == "vertex") n_vertex = cnt;
      else if (current == "face") n_face = cnt;
      else if (current == "root") n_root = cnt;
      else throw MalformedHeaderError("unexpected scalp element: " + current);
    } else if (tok == "end_header") {
      break;
    }
  }
  ScalpModel scalp;
  scalp.vertices.resize(n_vertex);
  for (auto& v : scalp.vertices) {
    if (!(is >> v.x() >> v.y() >> v.z())) throw TruncatedFileError("scalp vertices truncated");
  }
  scalp.faces.resize(n_face);
  for (auto& f : scalp.faces) {
    int n;
    if (!(is >> n >> f[0] >> f[1] >> f[2]) || n != 3) {
      throw TruncatedFileError("scalp faces truncated or non-triangular");
    }
    for (int c : f) {
      if (c < 0 || static_cast<std::size_t>(c) >= n_vertex) {
        throw ValidationError("scalp face index out of range");
      }
    }
  }
  scalp.root_sites.resize(n_root);
  for (auto& r : scalp.root_sites) {
    if (!(is >> r.x() >> r.y() >> r.z())) throw TruncatedFileError("scalp roots truncated");
  }
  return scalp;
}

}  // namespace hairrec
