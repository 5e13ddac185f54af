#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/spectral.hpp"

namespace spinsync {

/// CSV conventions: RFC-4180-style rows, '.' decimal separator, full double
/// precision (%.17g). Leading '#' comment lines carry the tool version and
/// config hash so payloads are byte-identical across reruns of one config.
struct CsvWriter {
  explicit CsvWriter(const std::filesystem::path& path, const std::string& hash);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

std::string format_double(double v);

void write_series_csv(const std::filesystem::path& path, const std::string& hash,
                      const TimeSeries& series);
void write_series_csv(const std::filesystem::path& path, const std::string& hash,
                      const std::vector<TimeSeries>& series);  ///< shared time grid

void write_spectrum_csv(const std::filesystem::path& path, const std::string& hash,
                        const SpectrumClassification& spec);

/// Eigenmatrices as JSON arrays of [re, im] entries (optional heavy dump).
void write_eigenmatrices_json(const std::filesystem::path& path,
                              const SpectrumClassification& spec, int max_modes);

void write_sync_csv(const std::filesystem::path& path, const std::string& hash,
                    const std::vector<SyncResult>& per_trajectory,
                    const std::vector<std::uint64_t>& seeds);

void write_lyapunov_csv(const std::filesystem::path& dir, const std::string& hash,
                        const LyapunovTrace& trace);

/// Run metadata: timestamp, tool version, config hash, and the full config.
void write_metadata(const std::filesystem::path& path, const ExperimentConfig& config,
                    const std::string& subcommand,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Creates `<output_dir>/<subcommand>-<hash>-<timestamp>/`.
std::filesystem::path make_run_directory(const ExperimentConfig& config,
                                         const std::string& subcommand);

// -- self-contained SVG plots -------------------------------------------------

struct PlotStyle {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 900;
  int height = 540;
};

/// Polyline plot of one or more series on a shared axis; throws on empty data.
void emit_line_plot(const std::filesystem::path& path,
                    const std::vector<TimeSeries>& series, const PlotStyle& style);

/// Scatter of (x, y) points, e.g. eigenvalues in the complex plane.
void emit_scatter_plot(const std::filesystem::path& path,
                       const std::vector<double>& x, const std::vector<double>& y,
                       const PlotStyle& style);

/// Phase/modulus polar scatter inside the unit circle.
void emit_polar_scatter(const std::filesystem::path& path,
                        const std::vector<double>& modulus,
                        const std::vector<double>& phase, const PlotStyle& style);

}  // namespace spinsync
