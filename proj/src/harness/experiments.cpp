#include "fgmm/harness/experiments.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fgmm/em.hpp"
#include "fgmm/harness/csv.hpp"
#include "fgmm/metrics.hpp"
#include "fgmm/music.hpp"
#include "fgmm/reduce.hpp"

namespace fgmm::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Matrixd design_points(const ExperimentConfig& cfg, Index L, Index dim, Index k, std::uint64_t seed, DesignMeta& meta) {
  if (cfg.design == DesignScheme::directional) {
    const Index J = cfg.directions > 0 ? cfg.directions : directions_for_confidence(cfg.design_confidence);
    const Index S = cfg.steps > 0 ? cfg.steps : k;
    const double tau = cfg.tau > 0 ? cfg.tau : default_tau(cfg.delta > 0 ? cfg.delta : 1.0);
    auto design = directional_design<double>(J, S, tau, dim, seed);
    meta = design.meta();
    return design.points();
  }
  auto design = ball_design<double>(L, cfg.ball_radius, dim, seed);
  meta = design.meta();
  return design.points();
}

}  // namespace

void parallel_for(Index count, Index workers, const std::function<void(Index)>& f) {
  if (workers <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  const Index n_threads = std::min(workers, count);
  for (Index t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

FrequencyDesign<double> order_design(const ExperimentConfig& cfg, Index dim, std::uint64_t seed) {
  const Index count = cfg.translations > 0 ? cfg.translations : dim + 1;
  const Matrixd translations = orthonormal_translations<double>(dim, count);
  if (!cfg.design_points.empty()) {
    const Matrixd points = read_points_csv(cfg.design_points);
    require(points.rows() == dim, "design_points: point dimension does not match the data");
    return FrequencyDesign<double>(points, translations);
  }
  const Index L = cfg.points > 0 ? cfg.points : cfg.points_per_component * cfg.k;
  DesignMeta meta;
  Matrixd points = design_points(cfg, L, dim, cfg.k, seed, meta);
  return FrequencyDesign<double>(std::move(points), translations, meta);
}

FrequencyDesign<double> mean_design(const ExperimentConfig& cfg, Index dim, Index k, std::uint64_t seed) {
  DesignMeta meta;
  Matrixd points = design_points(cfg, cfg.mean_points_per_component * k, dim, k, seed, meta);
  return FrequencyDesign<double>(std::move(points), orthonormal_translations<double>(dim, dim + 1), meta);
}

Matrixd placed_simplex(const ExperimentConfig& cfg, double delta, std::uint64_t seed) {
  Matrixd means = simplex_means<double>(cfg.k, delta, cfg.d);
  if (cfg.orientation == Orientation::random) means = random_rotation<double>(cfg.d, seed) * means;
  return means;
}

TrialRecord run_phase_trial(const ExperimentConfig& cfg, Index row, Index col, Index trial, double delta, Index n) {
  TrialRecord rec;
  rec.experiment = "phase";
  rec.row = row;
  rec.col = col;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.seed, row, col, trial);
  rec.n = n;
  rec.k_true = cfg.k;

  const auto model =
      GmmModel<double>::equal_weights(placed_simplex(cfg, delta, derive_seed(rec.seed, stream_model)), cfg.sigma);
  const SampleSet<double> samples = sample_gmm(model, n, derive_seed(rec.seed, stream_samples));
  const FrequencyDesign<double> design = order_design(cfg, cfg.d, derive_seed(rec.seed, stream_design));

  auto t0 = Clock::now();
  const auto y = measurement_set(samples, design, model.noise());
  rec.timings.measure_ms = ms_since(t0);
  t0 = Clock::now();
  const auto spec = spectral_decomposition(empirical_covariance(y));
  try {
    rec.k_hat = select_order(spec.singular_values, cfg.order_rule, cfg.epsilon).k_hat;
  } catch (const DegenerateSpectrumError&) {
    rec.k_hat = 0;
  }
  rec.timings.svd_ms = ms_since(t0);
  rec.success = rec.k_hat == rec.k_true;
  return rec;
}

PhaseGridResult run_phase_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.geometry != Geometry::simplex) throw ConfigError("phase grids use simplex geometry (k = 2, 3 or 4)");
  PhaseGridResult out;
  out.deltas = grid_axis(cfg.delta_min, cfg.delta_max, cfg.delta_step);
  out.log10_n = grid_axis(cfg.log10_n_min, cfg.log10_n_max, cfg.log10_n_step);
  const Index rows = Index(out.deltas.size()), cols = Index(out.log10_n.size()), T = cfg.trials;
  out.trials.resize(std::size_t(rows * cols * T));
  parallel_for(rows * cols * T, cfg.workers, [&](Index task) {
    const Index trial = task % T;
    const Index cell = task / T;
    const Index row = cell / cols, col = cell % cols;
    out.trials[task] = run_phase_trial(cfg, row, col, trial, out.deltas[row], cell_sample_size(out.log10_n[col]));
  });
  for (Index row = 0; row < rows; ++row) {
    for (Index col = 0; col < cols; ++col) {
      PhaseCell c;
      c.k = cfg.k;
      c.d = cfg.d;
      c.delta = out.deltas[row];
      c.log10_n = out.log10_n[col];
      c.n = cell_sample_size(c.log10_n);
      c.trials = T;
      for (Index t = 0; t < T; ++t) c.successes += out.trials[std::size_t((row * cols + col) * T + t)].success;
      c.success_rate = double(c.successes) / double(T);
      out.cells.push_back(c);
    }
  }
  return out;
}

FourierFit fourier_fit(const SampleSet<double>& samples, Index k, const NoiseCovariance<double>& noise,
                       const ExperimentConfig& cfg, std::uint64_t design_seed) {
  require(k >= 1, "fourier_fit: k must be >= 1");
  FourierFit fit;
  auto t0 = Clock::now();
  std::optional<PcaSubspace<double>> sub;
  if (k < samples.d()) {
    try {
      sub = pca_subspace(samples, k, cfg.pca_centered);
    } catch (const std::invalid_argument&) {
      sub.reset();  // rank-deficient data (e.g. noiseless atoms): stay in R^d
    }
  }
  fit.used_pca = sub.has_value();
  const SampleSet<double> work = sub ? project(samples, *sub) : samples;
  const NoiseCovariance<double> work_noise = sub ? noise.projected(sub->basis) : noise;
  const FrequencyDesign<double> design = mean_design(cfg, work.d(), k, design_seed);
  const CMatrixd phasors = point_phasors(work.data, design.points());
  const auto y = measurement_set(work, design, work_noise, phasors);
  fit.timings.measure_ms = ms_since(t0);

  t0 = Clock::now();
  const auto spec = spectral_decomposition(empirical_covariance(y));
  const auto proj = SubspaceProjector<double>::from_spectrum(spec, k, design);
  fit.spectrum = spec.singular_values;
  fit.timings.svd_ms = ms_since(t0);

  t0 = Clock::now();
  MeanEstimate<double> est;
  try {
    est = estimate_means(work, proj, k, cfg.gd_settings(), scores(phasors, proj));
  } catch (const StartsExhaustedError<double>& e) {
    est = e.partial();
    fit.exhausted = true;
  }
  fit.starts = est.starts_tried;
  fit.timings.descent_ms = ms_since(t0);

  t0 = Clock::now();
  WeightEstimate<double> w = estimate_weights(est.centers, y);
  fit.weights = w.weights;
  fit.weight_info = std::move(w);
  fit.timings.weights_ms = ms_since(t0);
  fit.centers = sub ? back_project(est.centers, *sub) : est.centers;
  return fit;
}

GmmModel<double> bench_model(const ExperimentConfig& cfg, Index trial) {
  const std::uint64_t seed = derive_seed(cfg.seed, stream_model, trial);
  Matrixd means = cfg.geometry == Geometry::sphere ? sphere_means<double>(cfg.k, cfg.d, cfg.radius, seed)
                                                   : placed_simplex(cfg, cfg.delta, derive_seed(seed, 2));
  Vectord w = cfg.weights == WeightScheme::dirichlet ? dirichlet_weights<double>(cfg.k, derive_seed(seed, 1))
                                                     : Vectord::Constant(cfg.k, 1.0 / double(cfg.k));
  return GmmModel<double>(std::move(w), std::move(means), cfg.sigma);
}

BenchTrialResult run_bench_trial(const ExperimentConfig& cfg, Index n_index, Index n, Index trial) {
  BenchTrialResult out;
  TrialRecord& rec = out.record;
  rec.experiment = "bench";
  rec.row = n_index;
  rec.col = 0;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.seed, n_index, 0, trial);
  rec.n = n;
  rec.k_true = cfg.k;
  rec.k_hat = cfg.k;

  const GmmModel<double> model = bench_model(cfg, trial);
  const SampleSet<double> samples = sample_gmm(model, n, derive_seed(rec.seed, stream_samples));
  const DiscreteDistribution<double> truth(model.means(), model.weights());

  const FourierFit fit = fourier_fit(samples, cfg.k, model.noise(), cfg, derive_seed(rec.seed, stream_mean_design));
  rec.timings = fit.timings;
  rec.descent_starts = fit.starts;
  rec.k_hat = fit.centers.cols();
  rec.success = !fit.exhausted;
  rec.w1_error = wasserstein1(truth, DiscreteDistribution<double>(fit.centers, fit.weights));
  out.fourier = {"fourier", cfg.k, cfg.d, n, trial, rec.seed, rec.w1_error, fit.timings.fourier_total()};

  if (cfg.run_em) {
    require(cfg.sigma > 0, "bench: EM needs sigma > 0");
    const Matrixd init = em_init_random(samples, cfg.k, derive_seed(rec.seed, stream_em_init));
    EmSettings settings;
    settings.max_iter = int(cfg.em_max_iter);
    settings.loglik_tol = cfg.em_tol;
    const auto t0 = Clock::now();
    const EmResult<double> em = em_fit(samples, cfg.k, cfg.sigma, init, settings);
    rec.timings.em_ms = ms_since(t0);
    rec.em_iterations = em.iterations;
    out.em_loglik = em.loglik_trace;
    for (std::size_t i = 1; i < em.loglik_trace.size(); ++i)
      if (em.loglik_trace[i] < em.loglik_trace[i - 1] - 1e-9) rec.em_monotone = false;
    rec.em_w1_error = wasserstein1(truth, DiscreteDistribution<double>(em.means, em.weights));
    out.em = BenchRow{"em", cfg.k, cfg.d, n, trial, rec.seed, rec.em_w1_error, rec.timings.em_ms};
  }
  return out;
}

std::vector<BenchSummary> summarize_bench(const std::vector<BenchRow>& rows) {
  std::vector<BenchSummary> out;
  for (const BenchRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const BenchSummary& s) { return s.method == r.method && s.n == r.n; });
    if (it == out.end()) {
      out.push_back({r.method, r.n, 0, 0, 0, 0});
      it = out.end() - 1;
    }
    ++it->trials;
    it->w1_mean += r.w1;
    it->runtime_mean_ms += r.runtime_ms;
  }
  for (BenchSummary& s : out) {
    s.w1_mean /= double(s.trials);
    s.runtime_mean_ms /= double(s.trials);
    double ss = 0;
    for (const BenchRow& r : rows)
      if (r.method == s.method && r.n == s.n) ss += (r.w1 - s.w1_mean) * (r.w1 - s.w1_mean);
    s.w1_std = s.trials > 1 ? std::sqrt(ss / double(s.trials - 1)) : 0.0;
  }
  return out;
}

BenchResult run_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<Index> ns = n_schedule(cfg);
  const Index T = cfg.trials;
  std::vector<BenchTrialResult> results(ns.size() * std::size_t(T));
  parallel_for(Index(results.size()), cfg.workers, [&](Index task) {
    const Index ni = task / T, trial = task % T;
    results[task] = run_bench_trial(cfg, ni, ns[ni], trial);
  });
  BenchResult out;
  for (BenchTrialResult& r : results) {
    out.rows.push_back(r.fourier);
    if (r.em) out.rows.push_back(*r.em);
    out.em_monotone = out.em_monotone && r.record.em_monotone;
    out.trials.push_back(std::move(r.record));
  }
  out.summary = summarize_bench(out.rows);
  return out;
}

OrderReport run_order(const SampleSet<double>& samples, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto noise = NoiseCovariance<double>::isotropic(cfg.sigma, samples.d());
  const FrequencyDesign<double> design = order_design(cfg, samples.d(), derive_seed(cfg.seed, stream_design));
  OrderReport rep;
  rep.L = design.L();
  rep.translation_count = design.translation_count();
  rep.radius_bound = design.radius_bound();
  rep.n = samples.n();
  rep.d = samples.d();
  auto t0 = Clock::now();
  const auto y = measurement_set(samples, design, noise);
  rep.timings.measure_ms = ms_since(t0);
  t0 = Clock::now();
  const auto spec = spectral_decomposition(empirical_covariance(y));
  rep.selection = select_order(spec.singular_values, cfg.order_rule, cfg.epsilon);
  rep.timings.svd_ms = ms_since(t0);
  return rep;
}

EstimateReport run_estimate(const SampleSet<double>& samples, const ExperimentConfig& cfg) {
  EstimateReport rep;
  rep.order = run_order(samples, cfg);
  const Index k = rep.order.selection.k_hat;
  if (k < 1) throw std::runtime_error("order selection found no singular value above epsilon");
  const auto noise = NoiseCovariance<double>::isotropic(cfg.sigma, samples.d());
  rep.fit = fourier_fit(samples, k, noise, cfg, derive_seed(cfg.seed, stream_mean_design));
  return rep;
}

}  // namespace fgmm::harness
