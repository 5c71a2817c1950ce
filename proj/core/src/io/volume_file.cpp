#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "exset/io.hpp"
#include "io/json_convert.hpp"

namespace exset {

namespace {

constexpr const char* kMagic = "EXSETVOL";
constexpr const char* kDiscMagic = "EXSETDISC";

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::size_t parse_size(const std::string& s, std::size_t offset, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-')
    throw ParseError(std::string("volume: bad ") + what + " '" + s + "'", offset);
  return static_cast<std::size_t>(v);
}

void check_labels(const PhaseImage& img) {
  if (img.extents.empty() || img.extents.size() > 3) fail_contract("volume: image must be 1-, 2- or 3-D");
  std::size_t n = 1;
  for (auto e : img.extents) n *= e;
  if (n != img.labels.size() || n == 0) fail_contract("volume: label count does not match extents");
  for (auto l : img.labels)
    if (l < 1 || l > 3) fail_contract("volume: labels must lie in {1,2,3}");
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("error writing '" + path + "'");
}

std::string encode_volume(const PhaseImage& img, const VolumeMeta& meta) {
  check_labels(img);
  if (!(meta.voxel_size_um > 0)) fail_contract("volume: voxel size must be positive");
  if (meta.legend.find('\n') != std::string::npos) fail_contract("volume: legend must be a single line");
  std::ostringstream h;
  h.precision(17);
  h << kMagic << " 1\n";
  h << "dims " << img.dim() << "\n";
  h << "extents";
  for (auto e : img.extents) h << ' ' << e;
  h << "\nvoxel_size_um " << meta.voxel_size_um << "\n";
  h << "legend " << meta.legend << "\n";
  h << "order x-fastest\nend\n";
  std::string out = h.str();
  out.append(reinterpret_cast<const char*>(img.labels.data()), img.labels.size());
  return out;
}

PhaseImage decode_volume(const std::string& bytes, VolumeMeta* meta) {
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& start) {
    start = pos;
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw ParseError("volume: header ends before 'end'", bytes.size());
    pos = nl + 1;
    return bytes.substr(start, nl - start);
  };
  std::size_t at = 0;
  const auto first = tokens(next_line(at));
  if (first.empty() || first[0] != kMagic) throw ParseError("volume: bad magic (expected EXSETVOL)", 0);
  if (first.size() != 2 || first[1] != "1")
    throw ParseError("volume: unsupported version '" + (first.size() > 1 ? first[1] : std::string()) + "'",
                     std::strlen(kMagic) + 1);

  std::size_t dims = 0;
  std::vector<std::size_t> extents;
  VolumeMeta m;
  m.legend.clear();
  bool have_dims = false, have_extents = false;
  for (;;) {
    const auto line = next_line(at);
    const auto t = tokens(line);
    if (t.empty()) throw ParseError("volume: empty header line", at);
    if (t[0] == "end") break;
    if (t[0] == "dims") {
      if (t.size() != 2) throw ParseError("volume: 'dims' takes one value", at);
      dims = parse_size(t[1], at, "dims");
      if (dims < 1 || dims > 3) throw ParseError("volume: dims must be 1, 2 or 3", at);
      have_dims = true;
    } else if (t[0] == "extents") {
      extents.clear();
      for (std::size_t k = 1; k < t.size(); ++k) extents.push_back(parse_size(t[k], at, "extent"));
      for (auto e : extents)
        if (e == 0) throw ParseError("volume: extents must be positive", at);
      have_extents = true;
    } else if (t[0] == "voxel_size_um") {
      if (t.size() != 2) throw ParseError("volume: 'voxel_size_um' takes one value", at);
      try {
        std::size_t p = 0;
        m.voxel_size_um = std::stod(t[1], &p);
        if (p != t[1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("volume: bad voxel size '" + t[1] + "'", at);
      }
      if (!(m.voxel_size_um > 0)) throw ParseError("volume: voxel size must be positive", at);
    } else if (t[0] == "legend") {
      const auto k = line.find_first_not_of(' ', line.find("legend") + 6);
      m.legend = k == std::string::npos ? std::string() : line.substr(k);
    } else if (t[0] == "order") {
      if (t.size() != 2 || t[1] != "x-fastest") throw ParseError("volume: only 'order x-fastest' is supported", at);
    } else {
      throw ParseError("volume: unknown header key '" + t[0] + "'", at);
    }
  }
  if (!have_dims || !have_extents) throw ParseError("volume: header lacks dims or extents", at);
  if (extents.size() != dims)
    throw ParseError("volume: " + std::to_string(extents.size()) + " extents for dims " + std::to_string(dims), at);

  std::size_t n = 1;
  for (auto e : extents) n *= e;
  const std::size_t have = bytes.size() - pos;
  if (have != n)
    throw ParseError("volume: payload size mismatch, expected " + std::to_string(n) + " bytes, got " +
                         std::to_string(have),
                     pos + std::min(have, n));
  PhaseImage img{extents, std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<std::uint8_t>(bytes[pos + i]);
    if (b < 1 || b > 3) throw ParseError("volume: illegal phase byte " + std::to_string(b), pos + i);
    img.labels[i] = b;
  }
  if (meta) *meta = m;
  return img;
}

PhaseImage load_volume(const std::string& path, VolumeMeta* meta) { return decode_volume(read_file(path), meta); }

void save_volume(const PhaseImage& img, const std::string& path, const VolumeMeta& meta) {
  write_file(path, encode_volume(img, meta));
}

std::vector<PhaseImage> slices_of(const PhaseImage& volume, int axis) {
  if (volume.dim() != 3) throw DataError("slices: volume must be 3-D");
  if (axis < 0 || axis > 2) fail_contract("slices: axis must be 0, 1 or 2");
  const std::size_t nx = volume.extents[0], ny = volume.extents[1], nz = volume.extents[2];
  const std::size_t count = volume.extents[static_cast<std::size_t>(axis)];
  std::vector<PhaseImage> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    PhaseImage s;
    if (axis == 2) {
      s.extents = {nx, ny};
      s.labels.assign(volume.labels.begin() + static_cast<std::ptrdiff_t>(k * nx * ny),
                      volume.labels.begin() + static_cast<std::ptrdiff_t>((k + 1) * nx * ny));
    } else if (axis == 1) {
      s.extents = {nx, nz};
      s.labels.resize(nx * nz);
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t x = 0; x < nx; ++x) s.labels[z * nx + x] = volume.labels[(z * ny + k) * nx + x];
    } else {
      s.extents = {ny, nz};
      s.labels.resize(ny * nz);
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t y = 0; y < ny; ++y) s.labels[z * ny + y] = volume.labels[(z * ny + y) * nx + k];
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PhaseImage> load_slices(const std::string& path, int axis) { return slices_of(load_volume(path), axis); }

void save_discriminator(const DiscriminatorParams& params, const std::string& path) {
  const auto& c = params.config;
  if (params.values.size() != c.parameter_count()) fail_contract("discriminator: parameter count mismatch");
  jsonio::json layers = jsonio::json::array();
  for (const auto& l : c.layers) layers.push_back({l.kernel, l.features, l.stride});
  const jsonio::json h = {{"layers", layers},      {"leaky_alpha", c.leaky_alpha}, {"height", c.height},
                          {"width", c.width},      {"channels", c.channels},       {"seed", params.seed},
                          {"count", params.values.size()}};
  std::string out = std::string(kDiscMagic) + " 1 " + h.dump() + "\n";
  const std::size_t off = out.size();
  out.resize(off + 8 * params.values.size());
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    auto u = std::bit_cast<std::uint64_t>(params.values[i]);
    for (int b = 0; b < 8; ++b) out[off + 8 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  write_file(path, out);
}

DiscriminatorParams load_discriminator(const std::string& path) {
  const auto bytes = read_file(path);
  const std::string prefix = std::string(kDiscMagic) + " 1 ";
  if (bytes.compare(0, prefix.size(), prefix) != 0) throw ParseError("discriminator: bad magic or version", 0);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ParseError("discriminator: missing header terminator", bytes.size());
  const auto h = jsonio::parse(bytes.substr(prefix.size(), nl - prefix.size()));
  DiscriminatorParams p;
  try {
    p.config.layers.clear();
    for (const auto& l : h.at("layers"))
      p.config.layers.push_back({l[0].get<std::size_t>(), l[1].get<std::size_t>(), l[2].get<std::size_t>()});
    p.config.leaky_alpha = h.at("leaky_alpha").get<double>();
    p.config.height = h.at("height").get<std::size_t>();
    p.config.width = h.at("width").get<std::size_t>();
    p.config.channels = h.at("channels").get<std::size_t>();
    p.seed = h.at("seed").get<std::uint64_t>();
  } catch (const jsonio::json::exception& e) {
    throw ParseError(std::string("discriminator: bad header: ") + e.what(), prefix.size());
  }
  const std::size_t count = h.value("count", std::size_t{0});
  if (count != p.config.parameter_count())
    throw ParseError("discriminator: header count does not match the architecture", prefix.size());
  const std::size_t off = nl + 1;
  if (bytes.size() - off != 8 * count)
    throw ParseError("discriminator: payload size mismatch, expected " + std::to_string(8 * count) + " bytes, got " +
                         std::to_string(bytes.size() - off),
                     bytes.size());
  p.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[off + 8 * i + b])) << (8 * b);
    p.values[i] = std::bit_cast<double>(u);
  }
  return p;
}

}  // namespace exset
