#include <png.h>

#include <cstring>
#include <string>

#include "exset/error.hpp"
#include "exset/io.hpp"

namespace exset {

void save_slice_png(const PhaseImage& img, std::size_t z, const std::string& path) {
  if (img.dim() != 2 && img.dim() != 3) fail_contract("png: image must be 2-D or 3-D");
  const std::size_t nx = img.extents[0], ny = img.extents[1];
  const std::size_t nz = img.dim() == 3 ? img.extents[2] : 1;
  if (z >= nz) fail_contract("png: section " + std::to_string(z) + " outside 0.." + std::to_string(nz - 1));
  if (img.labels.size() != nx * ny * nz) fail_contract("png: label count does not match extents");
  std::vector<std::uint8_t> rgb(3 * nx * ny);
  for (std::size_t i = 0; i < nx * ny; ++i) {
    const auto l = img.labels[z * nx * ny + i];
    if (l < 1 || l > 3) fail_contract("png: labels must lie in {1,2,3}");
    std::memcpy(&rgb[3 * i], kPhaseColors[l - 1].data(), 3);
  }
  png_image out;
  std::memset(&out, 0, sizeof out);
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(nx);
  out.height = static_cast<png_uint_32>(ny);
  out.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&out, path.c_str(), 0, rgb.data(), 0, nullptr)) {
    const std::string msg = out.message;
    png_image_free(&out);
    throw IoError("cannot write png '" + path + "': " + msg);
  }
}

RgbImage read_png(const std::string& path) {
  png_image in;
  std::memset(&in, 0, sizeof in);
  in.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&in, path.c_str())) throw IoError("cannot read png '" + path + "': " + in.message);
  in.format = PNG_FORMAT_RGB;
  RgbImage img;
  img.width = in.width;
  img.height = in.height;
  img.rgb.resize(PNG_IMAGE_SIZE(in));
  if (!png_image_finish_read(&in, nullptr, img.rgb.data(), 0, nullptr)) {
    const std::string msg = in.message;
    png_image_free(&in);
    throw IoError("cannot decode png '" + path + "': " + msg);
  }
  return img;
}

}  // namespace exset
