#include "spinsync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace spinsync {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDenominatorFloor = 1e-12;
}  // namespace

SpectralPeak dominant_frequency(const TimeSeries& series, double transient_cut,
                                FftWindow window) {
  if (!series.uniform())
    throw std::invalid_argument("analysis: FFT requires a uniform time grid");
  std::size_t first = 0;
  while (first < series.times.size() && series.times[first] < transient_cut - 1e-12)
    ++first;
  const std::size_t n = series.times.size() - first;
  if (n < 64)
    throw std::invalid_argument(
        "analysis: series too short after the transient cut (" +
        std::to_string(n) + " < 64 samples)");
  const double dt = series.dt();

  double mean = 0.0;
  for (std::size_t i = first; i < series.times.size(); ++i) mean += series.values[i];
  mean /= double(n);

  std::vector<double> samples(n);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == FftWindow::Hann)
      w = 0.5 * (1.0 - std::cos(2.0 * kPi * double(i) / double(n - 1)));
    samples[i] = (series.values[first + i] - mean) * w;
    window_sum += w;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> bins;
  fft.fwd(bins, samples);

  SpectralPeak peak;
  peak.resolution = 1.0 / (double(n) * dt);
  const std::size_t n_half = n / 2;  // up to Nyquist
  peak.spectrum.label = series.label + "_spectrum";
  peak.spectrum.times.reserve(n_half);
  peak.spectrum.values.reserve(n_half);
  std::size_t best = 0;
  double best_mag = 0.0;
  for (std::size_t k = 1; k <= n_half; ++k) {
    const double mag = std::abs(bins[k]);
    peak.spectrum.times.push_back(double(k) * peak.resolution);
    peak.spectrum.values.push_back(2.0 * mag / window_sum);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  if (best == 0 || best_mag < 1e-12 * double(n))
    throw std::domain_error(
        "analysis: no non-DC spectral content (constant series?)");
  peak.dominant_frequency = double(best) * peak.resolution;
  peak.amplitude = 2.0 * best_mag / window_sum;
  return peak;
}

namespace {

Complex correlator_from_expectations(Complex cross, double n_j, double n_l) {
  if (n_j < kDenominatorFloor || n_l < kDenominatorFloor)
    throw std::domain_error(
        "analysis: sync correlator undefined (a site has no excitation; "
        "denominator below 1e-12)");
  return cross / std::sqrt(n_j * n_l);
}

}  // namespace

Complex sync_correlator(const StateVector& psi, int j, int l, int n_spins) {
  const ComplexMatrix sm_j = embed(pauli(PauliAxis::Minus), j, n_spins);
  const ComplexMatrix sm_l = embed(pauli(PauliAxis::Minus), l, n_spins);
  const StateVector down_j = sm_j * psi;
  const StateVector down_l = (j == l) ? down_j : StateVector(sm_l * psi);
  // <s+_j s-_l> = <s-_j psi | s-_l psi>, so Cauchy-Schwarz bounds |C| by 1.
  const Complex cross = down_j.dot(down_l);
  return correlator_from_expectations(cross, down_j.squaredNorm(),
                                      down_l.squaredNorm());
}

Complex sync_correlator(const ComplexMatrix& rho, int j, int l, int n_spins) {
  const ComplexMatrix sp_j = embed(pauli(PauliAxis::Plus), j, n_spins);
  const ComplexMatrix sm_l = embed(pauli(PauliAxis::Minus), l, n_spins);
  const ComplexMatrix sp_l = embed(pauli(PauliAxis::Plus), l, n_spins);
  const ComplexMatrix sm_j = embed(pauli(PauliAxis::Minus), j, n_spins);
  const Complex cross = (rho * sp_j * sm_l).trace();
  const double n_j = (rho * sp_j * sm_j).trace().real();
  const double n_l = (rho * sp_l * sm_l).trace().real();
  return correlator_from_expectations(cross, n_j, n_l);
}

double circular_mean(std::span<const double> angles) {
  Complex sum{0.0, 0.0};
  for (double a : angles) sum += std::exp(Complex{0.0, a});
  return std::arg(sum);
}

SyncResult steady_sync(const TrajectoryRun& run, int j, int l, double t1,
                       double t2, int n_spins) {
  if (!(t2 > t1))
    throw std::invalid_argument("analysis: sync window must have t2 > t1");
  if (run.snapshots.empty() || run.snapshot_times.front() > t1 + 1e-9 ||
      run.snapshot_times.back() < t2 - 1e-9)
    throw std::invalid_argument(
        "analysis: trajectory snapshots do not cover the sync window [" +
        std::to_string(t1) + ", " + std::to_string(t2) + "]");

  std::vector<double> times, phases;
  double modulus_sum = 0.0;
  int defined = 0, undefined = 0;
  for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
    const double t = run.snapshot_times[i];
    if (t < t1 - 1e-9 || t > t2 + 1e-9) continue;
    try {
      const Complex c = sync_correlator(run.snapshots[i], j, l, n_spins);
      modulus_sum += std::abs(c);
      times.push_back(t);
      phases.push_back(std::arg(c));
      ++defined;
    } catch (const std::domain_error&) {
      ++undefined;
    }
  }
  const int total = defined + undefined;
  if (total == 0)
    throw std::invalid_argument("analysis: no snapshots inside the sync window");
  if (undefined * 10 > total)
    throw std::domain_error(
        "analysis: sync correlator undefined at more than 10% of snapshots (" +
        std::to_string(undefined) + "/" + std::to_string(total) + ")");

  SyncResult result;
  result.site_j = j;
  result.site_l = l;
  result.window_start = t1;
  result.window_end = t2;
  result.n_samples = defined;
  result.modulus_mean = modulus_sum / double(defined);
  result.phase = circular_mean(phases);

  // Unwrap and fit a line for the drift rate.
  std::vector<double> unwrapped(phases.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (i > 0) {
      double d = phases[i] - phases[i - 1];
      if (d > kPi) offset -= 2.0 * kPi;
      else if (d < -kPi) offset += 2.0 * kPi;
    }
    unwrapped[i] = phases[i] + offset;
  }
  if (unwrapped.size() >= 2) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    const auto n = double(unwrapped.size());
    for (std::size_t i = 0; i < unwrapped.size(); ++i) {
      st += times[i];
      sy += unwrapped[i];
      stt += times[i] * times[i];
      sty += times[i] * unwrapped[i];
    }
    const double denom = n * stt - st * st;
    result.phase_drift = denom > 0 ? (n * sty - st * sy) / denom : 0.0;
  }
  return result;
}

LyapunovAccumulator::LyapunovAccumulator(double delta0, double threshold)
    : delta0_(delta0), threshold_(threshold) {
  if (!(threshold > 0.0))
    throw std::invalid_argument("analysis: Lyapunov threshold must be > 0");
}

bool LyapunovAccumulator::observe(double t, double distance) {
  if (std::abs(distance) <= threshold_) return false;
  const double d = std::abs(distance) / delta0_;
  events_.push_back({t, d});
  sum_log_ += std::log(d);
  return true;
}

double LyapunovAccumulator::lambda_at(double t) const {
  return t > 0.0 ? sum_log_ / t : 0.0;
}

LyapunovTrace lyapunov(const Lindbladian& lind, const StateVector& psi0,
                       const Observable& observable, const LyapunovOptions& opts) {
  if (opts.delta < 0.0 || opts.delta >= 1.0)
    throw std::invalid_argument("analysis: Lyapunov delta must be in [0, 1)");
  const StateVector psi_f0 = normalized(psi0);

  StateVector psi_a0 = psi_f0;
  if (opts.delta > 0.0) {
    NoiseStream direction(derive_seed(opts.seed, 0x70657274ULL));  // perturbation stream
    StateVector chi(psi_f0.size());
    for (Eigen::Index i = 0; i < chi.size(); ++i)
      chi(i) = Complex{direction.gaussian(), direction.gaussian()};
    chi -= psi_f0 * psi_f0.dot(chi);
    chi = normalized(chi);
    psi_a0 = normalized(psi_f0 + opts.delta * chi);
  }

  const double a_f0 = expectation(psi_f0, observable.op).real();
  const double a_a0 = expectation(psi_a0, observable.op).real();
  const double delta0 = std::abs(a_f0 - a_a0);
  if (opts.delta > 0.0 && delta0 < 1e-12)
    throw std::runtime_error(
        "analysis: initial observable distance below 1e-12; the perturbation "
        "is invisible to '" + observable.label +
        "' — choose a different perturbation direction (seed)");

  LyapunovTrace trace;
  trace.delta0 = delta0;
  trace.threshold = opts.delta_max;
  trace.lambda.label = "lambda";
  trace.distance.label = "delta_" + observable.label;

  LyapunovAccumulator acc(delta0, opts.delta_max);
  const bool active = opts.delta > 0.0;

  TrajectoryOptions topts;
  topts.t_final = opts.t_final;
  topts.dt = opts.dt;
  topts.seed = derive_seed(opts.seed, 0);  // shared noise stream
  topts.record_stride = std::max(1, opts.lambda_stride);
  topts.scheme = opts.scheme;

  auto callback = [&](long /*step*/, double t, const StateVector& fid,
                      const StateVector& aux) -> std::optional<StateVector> {
    const double dist = expectation(fid, observable.op).real() -
                        expectation(aux, observable.op).real();
    if (!active || !acc.observe(t, dist)) return std::nullopt;
    StateVector u = aux - fid;
    const double norm = u.norm();
    if (norm < 1e-14) return std::nullopt;  // pair already identical
    return normalized(fid + (opts.delta / norm) * u);
  };

  SharedNoisePair pair = run_shared_noise_pair(lind, psi_f0, psi_a0, topts,
                                               observable, callback);

  const auto& tf = pair.fiducial.observables[0];
  const auto& ta = pair.auxiliary.observables[0];
  std::size_t event_cursor = 0;
  double sum_log = 0.0;
  for (std::size_t i = 0; i < tf.times.size(); ++i) {
    const double t = tf.times[i];
    while (event_cursor < acc.events().size() &&
           acc.events()[event_cursor].time <= t + 1e-12) {
      sum_log += std::log(acc.events()[event_cursor].growth_factor);
      ++event_cursor;
    }
    trace.lambda.times.push_back(t);
    trace.lambda.values.push_back(t > 0.0 ? sum_log / t : 0.0);
    trace.distance.times.push_back(t);
    trace.distance.values.push_back(tf.values[i] - ta.values[i]);
  }
  trace.events = acc.events();
  trace.lambda_final = acc.lambda_at(opts.t_final);
  return trace;
}

}  // namespace spinsync
