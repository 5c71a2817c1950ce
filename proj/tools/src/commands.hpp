#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace exset::cli {

struct FitArgs {
  std::optional<std::string> algo;
  std::string data, config, out;
  bool resume = false;
  std::optional<int> threads;
};

struct GenerateArgs {
  std::string params, out;
  bool anisotropic = false;
  std::optional<double> s_hat;
  std::vector<std::size_t> size;
  std::uint64_t seed = 0;
  std::optional<std::string> png;
  std::size_t png_z = 0;
};

struct DescriptorsArgs {
  std::string volume, out;
  std::string axis = "z";
  std::size_t h_max = 50;
  bool no_transport = false;
};

struct ScaleFitArgs {
  std::string volume, out;
  std::optional<std::string> params, params_out;
};

struct ValidateArgs {
  std::string params, data, out;
  std::size_t n = 10;
  std::uint64_t seed = 0;
  std::string axis = "z";
  bool anisotropic = false;
  bool no_transport = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out);
int cmd_generate(const GenerateArgs& a, std::ostream& out);
int cmd_descriptors(const DescriptorsArgs& a, std::ostream& out);
int cmd_scale_fit(const ScaleFitArgs& a, std::ostream& out);
int cmd_validate(const ValidateArgs& a, std::ostream& out);

}  // namespace exset::cli
