#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "exset/calibration.hpp"
#include "exset/discriminator.hpp"
#include "exset/excursion_model.hpp"

namespace exset {

/// Header data of a segmented volume file besides the extents.
struct VolumeMeta {
  double voxel_size_um = 1.0;
  std::string legend = "1=solid_electrolyte 2=active_material 3=pore";
};

/// Text header ("EXSETVOL 1", dims, extents, voxel_size_um, legend, order, end)
/// followed by one byte per voxel in {1,2,3}, x fastest.
std::string encode_volume(const PhaseImage& img, const VolumeMeta& meta = {});
PhaseImage decode_volume(const std::string& bytes, VolumeMeta* meta = nullptr);

PhaseImage load_volume(const std::string& path, VolumeMeta* meta = nullptr);
void save_volume(const PhaseImage& img, const std::string& path, const VolumeMeta& meta = {});

/// 2-D sections perpendicular to `axis` (0 = x, 1 = y, 2 = z) in increasing order.
std::vector<PhaseImage> slices_of(const PhaseImage& volume, int axis = 2);
std::vector<PhaseImage> load_slices(const std::string& path, int axis = 2);

/// Display colors of phases 1, 2, 3.
inline constexpr std::array<std::array<std::uint8_t, 3>, 3> kPhaseColors{
    {{128, 128, 128}, {255, 0, 0}, {0, 0, 0}}};

/// Writes section z of a 3-D image (or the image itself if 2-D) as an RGB PNG.
void save_slice_png(const PhaseImage& img, std::size_t z, const std::string& path);

struct RgbImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};
RgbImage read_png(const std::string& path);

std::string params_to_json(const ModelParams& theta);
ModelParams params_from_json(const std::string& text);
void save_params(const ModelParams& theta, const std::string& path);
ModelParams load_params(const std::string& path);

/// Everything `fit` needs: training settings, model family and paths.
struct RunConfig {
  Algorithm algorithm = Algorithm::Combined;
  ModelKind kind = ModelKind::LowParametric;
  std::size_t support = 100;
  std::size_t lowparam_halfwidth = 12;
  int n_dof = 2;
  int sign = 1;
  int slice_axis = 2;
  std::string data_path;
  std::string out_dir;
  TrainConfig train;

  /// Template parameter set for the configured family.
  ModelParams model_template() const;
};

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);
void save_config(const RunConfig& config, const std::string& path);
RunConfig load_config(const std::string& path);

/// Text header line followed by the raw little-endian doubles.
void save_discriminator(const DiscriminatorParams& params, const std::string& path);
DiscriminatorParams load_discriminator(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

}  // namespace exset
