#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nhmf/errors.hpp"
#include "nhmf/ssp_transport.hpp"

namespace nhmf::cli {

inline constexpr const char* kToolName = "nhmf";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Format { Csv, Json };

// Bad configuration or command line. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

struct URange {
  double min = 0.0, max = 10.0, step = 0.01;
  std::vector<double> grid() const;
};

/// Everything a run depends on. Per-command defaults fill the optional
/// fields in resolve(), so the echoed configuration is always complete.
struct RunConfig {
  ModelParams model = ModelParams::reference(0.0);
  SearchConfig search;
  int hmf_grid = 360;

  std::optional<double> u;
  std::optional<URange> u_range;

  double beta = 0.1;
  double e_min = -2.0, e_max = 2.0, e_step = 0.005;
  std::optional<double> shift;  // unset = auto

  Format format = Format::Csv;
  std::string out;  // empty = stdout
  bool plot = false;

  /// Fill command-specific defaults and validate. Throws ConfigError.
  void resolve(const std::string& command);

  SSPConfig ssp() const;
  nlohmann::json to_json() const;
};

/// Overlay a JSON document onto cfg. Unknown keys are rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Read and apply a JSON config file.
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace nhmf::cli
