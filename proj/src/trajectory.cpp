#include "spinsync/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

namespace spinsync {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 finalizer; distinct golden-ratio offsets per index.
  std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NoiseStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = (double(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = (double(rng_() >> 11) + 1.0) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

void NoiseStream::fill_increments(std::span<double> dw, double dt) {
  const double scale = std::sqrt(dt);
  for (double& x : dw) x = gaussian() * scale;
}

SseContext SseContext::make(const Lindbladian& lind, double dt, SseScheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory-engine: dt must be > 0");
  SseContext ctx;
  ctx.dt = dt;
  ctx.scheme = scheme;
  ctx.jumps = lind.jumps;
  const Complex i_half{0.0, 0.5};
  ctx.h_eff = lind.hamiltonian;
  for (const auto& op : lind.jumps) ctx.h_eff -= i_half * (op.adjoint() * op);
  if (scheme == SseScheme::ExponentialEuler)
    ctx.exp_h_eff_dt = (Complex{0.0, -1.0} * ctx.h_eff * dt).exp();
  return ctx;
}

namespace {

struct SseWorkspace {
  StateVector base;   // state after the linear substep
  StateVector out;
  StateVector jpsi;
};

void sse_step_inplace(StateVector& psi, const SseContext& ctx,
                      std::span<const double> dw, SseWorkspace& ws,
                      double* norm_drift) {
  const Complex i_unit{0.0, 1.0};
  if (ctx.scheme == SseScheme::ExponentialEuler) {
    ws.base.noalias() = ctx.exp_h_eff_dt * psi;
    ws.out = ws.base;
  } else {
    ws.base = psi;
    ws.out = psi;
    ws.jpsi.noalias() = ctx.h_eff * psi;
    ws.out -= i_unit * ctx.dt * ws.jpsi;
  }
  for (int k = 0; k < ctx.n_channels(); ++k) {
    ws.jpsi.noalias() = ctx.jumps[k] * ws.base;
    const double s = 2.0 * ws.base.dot(ws.jpsi).real();
    ws.out += ((0.5 * s) * ctx.dt + dw[k]) * ws.jpsi;
    ws.out -= ((0.125 * s * s) * ctx.dt + (0.5 * s) * dw[k]) * ws.base;
  }
  const double norm = ws.out.norm();
  if (norm < 1e-6)
    throw std::runtime_error(
        "trajectory-engine: state norm collapsed to " + std::to_string(norm) +
        " before renormalization (reduce dt)");
  if (norm_drift) *norm_drift = std::abs(norm - 1.0);
  psi = ws.out / norm;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

StateVector sse_step(const StateVector& psi, const SseContext& ctx,
                     std::span<const double> dw, double* norm_drift) {
  if (static_cast<int>(dw.size()) != ctx.n_channels())
    throw std::invalid_argument(
        "trajectory-engine: expected one Wiener increment per jump channel");
  SseWorkspace ws;
  StateVector out = psi;
  sse_step_inplace(out, ctx, dw, ws, norm_drift);
  return out;
}

TrajectoryRun run_trajectory(const Lindbladian& lind, const StateVector& psi0,
                             const TrajectoryOptions& opts,
                             const std::vector<Observable>& observables) {
  if (opts.record_stride < 1)
    throw std::invalid_argument("trajectory-engine: record_stride must be >= 1");
  const SseContext ctx = SseContext::make(lind, opts.dt, opts.scheme);
  const auto steps = static_cast<long>(std::llround(opts.t_final / opts.dt));

  TrajectoryRun run;
  run.seed = opts.seed;
  run.dt = opts.dt;
  run.observables.resize(observables.size());
  for (std::size_t i = 0; i < observables.size(); ++i)
    run.observables[i].label = observables[i].label;

  NoiseStream noise(opts.seed);
  std::vector<double> dw(ctx.n_channels());
  StateVector psi = normalized(psi0);
  SseWorkspace ws;
  std::vector<double> drifts;
  drifts.reserve(static_cast<std::size_t>(steps));

  for (long step = 0;; ++step) {
    const double t = step * opts.dt;
    if (step % opts.record_stride == 0) {
      for (std::size_t i = 0; i < observables.size(); ++i) {
        run.observables[i].times.push_back(t);
        run.observables[i].values.push_back(expectation(psi, observables[i].op).real());
      }
    }
    if (opts.snapshot_stride > 0 && step % opts.snapshot_stride == 0 &&
        t >= opts.snapshot_t_min - 1e-12) {
      run.snapshot_times.push_back(t);
      run.snapshots.push_back(psi);
    }
    if (step == steps) break;
    noise.fill_increments(dw, opts.dt);
    double drift = 0.0;
    sse_step_inplace(psi, ctx, dw, ws, &drift);
    drifts.push_back(drift);
  }
  run.median_norm_drift = median_of(std::move(drifts));
  return run;
}

EnsembleResult run_ensemble(const Lindbladian& lind, const StateVector& psi0,
                            const EnsembleOptions& opts,
                            const std::vector<Observable>& observables,
                            const TrajectoryHook& hook) {
  if (opts.n_traj < 1)
    throw std::invalid_argument("trajectory-engine: n_traj must be >= 1");
  EnsembleResult result;
  result.n_traj = opts.n_traj;
  result.master_seed = opts.master_seed;
  result.seeds.resize(opts.n_traj);
  for (int i = 0; i < opts.n_traj; ++i)
    result.seeds[i] = derive_seed(opts.master_seed, static_cast<std::uint64_t>(i));

  std::vector<std::vector<TimeSeries>> recorded(opts.n_traj);
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= opts.n_traj || failed.load()) return;
      TrajectoryOptions topts = opts.trajectory;
      topts.seed = result.seeds[static_cast<std::size_t>(i)];
      try {
        TrajectoryRun run = run_trajectory(lind, psi0, topts, observables);
        if (hook) hook(static_cast<std::size_t>(i), run);
        recorded[static_cast<std::size_t>(i)] = std::move(run.observables);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty())
          error_message = "trajectory-engine: trajectory " + std::to_string(i) +
                          " (seed " + std::to_string(topts.seed) + ") failed: " + e.what();
      }
    }
  };

  int n_threads = opts.n_threads > 0
                      ? opts.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, opts.n_traj));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error(error_message);

  // Deterministic reduction in trajectory-index order (Welford per point).
  const std::size_t n_obs = observables.size();
  const std::size_t n_points = recorded[0][0].times.size();
  result.mean.resize(n_obs);
  result.standard_error.resize(n_obs);
  for (std::size_t o = 0; o < n_obs; ++o) {
    result.mean[o].label = observables[o].label;
    result.mean[o].times = recorded[0][o].times;
    result.mean[o].values.assign(n_points, 0.0);
    result.standard_error[o].label = observables[o].label + "_se";
    result.standard_error[o].times = recorded[0][o].times;
    result.standard_error[o].values.assign(n_points, 0.0);
  }
  std::vector<double> m2(n_points);
  for (std::size_t o = 0; o < n_obs; ++o) {
    std::fill(m2.begin(), m2.end(), 0.0);
    auto& mean = result.mean[o].values;
    for (int i = 0; i < opts.n_traj; ++i) {
      const auto& vals = recorded[static_cast<std::size_t>(i)][o].values;
      const double inv = 1.0 / double(i + 1);
      for (std::size_t p = 0; p < n_points; ++p) {
        const double delta = vals[p] - mean[p];
        mean[p] += delta * inv;
        m2[p] += delta * (vals[p] - mean[p]);
      }
    }
    auto& se = result.standard_error[o].values;
    for (std::size_t p = 0; p < n_points; ++p)
      se[p] = opts.n_traj > 1
                  ? std::sqrt(m2[p] / double(opts.n_traj - 1) / double(opts.n_traj))
                  : 0.0;
  }
  return result;
}

SharedNoisePair run_shared_noise_pair(const Lindbladian& lind,
                                      const StateVector& psi_f0,
                                      const StateVector& psi_a0,
                                      const TrajectoryOptions& opts,
                                      const Observable& observable,
                                      const PairStepCallback& callback) {
  const SseContext ctx = SseContext::make(lind, opts.dt, opts.scheme);
  const auto steps = static_cast<long>(std::llround(opts.t_final / opts.dt));

  SharedNoisePair pair;
  for (TrajectoryRun* run : {&pair.fiducial, &pair.auxiliary}) {
    run->seed = opts.seed;
    run->dt = opts.dt;
    run->observables.resize(1);
    run->observables[0].label = observable.label;
  }

  NoiseStream noise(opts.seed);
  std::vector<double> dw(ctx.n_channels());
  StateVector psi_f = normalized(psi_f0);
  StateVector psi_a = normalized(psi_a0);
  SseWorkspace ws_f, ws_a;

  for (long step = 0;; ++step) {
    const double t = step * opts.dt;
    if (step % opts.record_stride == 0) {
      pair.fiducial.observables[0].times.push_back(t);
      pair.fiducial.observables[0].values.push_back(
          expectation(psi_f, observable.op).real());
      pair.auxiliary.observables[0].times.push_back(t);
      pair.auxiliary.observables[0].values.push_back(
          expectation(psi_a, observable.op).real());
    }
    if (step == steps) break;
    noise.fill_increments(dw, opts.dt);
    sse_step_inplace(psi_f, ctx, dw, ws_f, nullptr);
    sse_step_inplace(psi_a, ctx, dw, ws_a, nullptr);  // identical increments
    if (callback) {
      auto replacement = callback(step + 1, (step + 1) * opts.dt, psi_f, psi_a);
      if (replacement) psi_a = normalized(*replacement);
    }
  }
  return pair;
}

}  // namespace spinsync
