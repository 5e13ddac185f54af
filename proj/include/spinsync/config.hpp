#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinsync/analysis.hpp"

namespace spinsync {

/// Initial-state descriptor: either explicit product-state Bloch angles,
/// an explicit density matrix, or the library default.
struct InitialStateSpec {
  enum class Kind { Default, Product, DensityMatrix } kind = Kind::Default;
  std::vector<double> theta;  // Product
  std::vector<double> phi;
  ComplexMatrix density;      // DensityMatrix

  /// Resolve to a density matrix of the right dimension.
  ComplexMatrix realize(int n_spins) const;
  /// Resolve to a pure state; throws for Kind::DensityMatrix.
  StateVector realize_pure(int n_spins) const;
};

struct FftConfig {
  double transient_cut = 20.0;
  FftWindow window = FftWindow::Rectangular;
};

struct SyncConfig {
  int site_j = 1;
  int site_l = 2;
  double window_start = -20.0;  ///< negative = relative to t_final
  double window_end = 0.0;
};

struct LyapunovConfig {
  double delta = 1e-3;
  double delta_max = 0.05;
  double t_final = 50.0;
  std::uint64_t seed = 1;
};

/// Everything a run needs; serializes losslessly to/from JSON, and every run
/// directory stores the exact configuration used.
struct ExperimentConfig {
  ModelSpec model = paper_preset(Preset::Xxz);
  InitialStateSpec initial_state;
  double t_final = 100.0;
  double dt = 1e-3;
  MasterIntegrator integrator = MasterIntegrator::Rk4;
  int record_stride = 1;
  int n_traj = 500;
  std::uint64_t master_seed = 20260810;
  int snapshot_stride = 100;
  double snapshot_t_min = 0.0;
  SseScheme scheme = SseScheme::ExponentialEuler;
  int n_threads = 0;
  FftConfig fft;
  SyncConfig sync;
  LyapunovConfig lyapunov;
  std::string output_dir = "runs";

  void validate() const;  ///< throws std::invalid_argument with the field path
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

/// FNV-1a 64-bit over the canonical (sorted-keys) JSON form, as 16 hex chars.
std::string config_hash(const ExperimentConfig& config);

}  // namespace spinsync
