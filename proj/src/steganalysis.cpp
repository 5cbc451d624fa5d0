#include "echohide/steganalysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

void validate_mfcc(const MfccConfig& cfg) {
  const auto w = cfg.window_len;
  require(w >= 2 && (w & (w - 1)) == 0, ErrorKind::parameter, "mfcc: window_len must be a power of two");
  require(cfg.hop >= 1, ErrorKind::parameter, "mfcc: hop must be positive");
  require(cfg.n_mel_filters >= 1, ErrorKind::parameter, "mfcc: need at least one mel filter");
  require(cfg.n_coeffs >= 1 && cfg.n_coeffs <= cfg.n_mel_filters, ErrorKind::parameter,
          "mfcc: n_coeffs must be in 1..n_mel_filters");
  require(cfg.sample_rate > 0, ErrorKind::parameter, "mfcc: sample rate must be positive");
}

namespace {
double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  return w;
}
}  // namespace

std::vector<std::vector<double>> mel_filterbank(const MfccConfig& cfg) {
  validate_mfcc(cfg);
  const std::size_t bins = cfg.window_len / 2 + 1;
  const std::size_t m = cfg.n_mel_filters;
  const double nyquist = cfg.sample_rate / 2.0;
  const double top = hz_to_mel(nyquist);
  std::vector<double> edges(m + 2);
  for (std::size_t i = 0; i < m + 2; ++i) edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(m + 1));
  std::vector<std::vector<double>> bank(m, std::vector<double>(bins, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(cfg.window_len);
      if (f > lo && f <= mid) bank[j][k] = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) bank[j][k] = (hi - f) / (hi - mid);
    }
  }
  return bank;
}

FeatureMatrix mfcc_features(const AudioSignal& signal, const MfccConfig& cfg, Exec exec) {
  validate_mfcc(cfg);
  require(signal.size() >= cfg.window_len, ErrorKind::shape, "mfcc: signal shorter than one window");
  const std::size_t count = (signal.size() - cfg.window_len) / cfg.hop + 1;
  const auto bank = mel_filterbank(cfg);
  const auto window = hamming(cfg.window_len);
  const std::size_t m = cfg.n_mel_filters, bins = cfg.window_len / 2 + 1;
  std::vector<std::vector<double>> dct(cfg.n_coeffs, std::vector<double>(m));
  for (std::size_t k = 0; k < cfg.n_coeffs; ++k)
    for (std::size_t j = 0; j < m; ++j)
      dct[k][j] = std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) / static_cast<double>(m));

  FeatureMatrix out(count);
  auto one = [&](std::ptrdiff_t w) {
    const std::size_t start = static_cast<std::size_t>(w) * cfg.hop;
    std::vector<double> seg(cfg.window_len);
    for (std::size_t i = 0; i < cfg.window_len; ++i) seg[i] = signal.samples[start + i] * window[i];
    const auto spec = dsp::fft_real(seg);
    std::vector<double> logmel(m);
    for (std::size_t j = 0; j < m; ++j) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k)
        if (bank[j][k] != 0.0) e += bank[j][k] * std::abs(spec[k]);
      logmel[j] = std::log(std::max(e, 1e-10));
    }
    auto& row = out[static_cast<std::size_t>(w)];
    row.assign(cfg.n_coeffs, 0.0);
    for (std::size_t k = 0; k < cfg.n_coeffs; ++k)
      for (std::size_t j = 0; j < m; ++j) row[k] += dct[k][j] * logmel[j];
  };
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t w = 0; w < n; ++w) one(w);
  } else {
    for (std::ptrdiff_t w = 0; w < n; ++w) one(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GMM

namespace {
constexpr std::size_t kChunk = 256;
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Per-component log(weight) + log N(x; mean, var).
void component_logs(const GmmModel& g, std::span<const double> x, std::vector<double>& out) {
  const std::size_t k_count = g.n_components(), d = g.dim();
  out.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (g.weights[k] <= 0.0) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - g.means[k][j];
      acc += kLog2Pi + std::log(g.variances[k][j]) + diff * diff / g.variances[k][j];
    }
    out[k] = std::log(g.weights[k]) - 0.5 * acc;
  }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

// Runs body(chunk_index) over fixed chunks; results combine in chunk order, so
// both paths give identical sums.
template <class Body>
void for_chunks(std::size_t n, Exec exec, Body&& body) {
  const auto chunks = static_cast<std::ptrdiff_t>(chunk_count(n));
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) body(static_cast<std::size_t>(c));
  } else {
    for (std::ptrdiff_t c = 0; c < chunks; ++c) body(static_cast<std::size_t>(c));
  }
}

void check_features(const FeatureMatrix& features) {
  require(!features.empty() && !features.front().empty(), ErrorKind::shape, "gmm: empty feature matrix");
  const std::size_t d = features.front().size();
  for (const auto& row : features) require(row.size() == d, ErrorKind::shape, "gmm: ragged feature matrix");
}
}  // namespace

double GmmModel::log_likelihood(std::span<const double> x) const {
  require(x.size() == dim(), ErrorKind::shape, "gmm: feature dimension mismatch");
  std::vector<double> logs;
  component_logs(*this, x, logs);
  return log_sum_exp(logs);
}

double GmmModel::mean_log_likelihood(const FeatureMatrix& features, Exec exec) const {
  check_features(features);
  require(features.front().size() == dim(), ErrorKind::shape, "gmm: feature dimension mismatch");
  const std::size_t n = features.size();
  std::vector<double> partial(chunk_count(n), 0.0);
  for_chunks(n, exec, [&](std::size_t c) {
    std::vector<double> logs;
    double s = 0.0;
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      component_logs(*this, features[i], logs);
      s += log_sum_exp(logs);
    }
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(n);
}

nlohmann::json GmmModel::to_json() const {
  return nlohmann::json{{"format", "echohide-gmm"},
                        {"version", 1},
                        {"weights", weights},
                        {"means", means},
                        {"variances", variances}};
}

GmmModel GmmModel::from_json(const nlohmann::json& doc) {
  GmmModel g;
  try {
    require(doc.at("format") == "echohide-gmm" && doc.at("version") == 1, ErrorKind::config,
            "gmm model: unsupported format or version");
    g.weights = doc.at("weights").get<std::vector<double>>();
    g.means = doc.at("means").get<std::vector<std::vector<double>>>();
    g.variances = doc.at("variances").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("gmm model: ") + e.what());
  }
  const std::size_t k = g.weights.size();
  require(k >= 1 && g.means.size() == k && g.variances.size() == k, ErrorKind::config,
          "gmm model: inconsistent component counts");
  for (std::size_t i = 0; i < k; ++i) {
    require(g.means[i].size() == g.dim() && g.variances[i].size() == g.dim(), ErrorKind::config,
            "gmm model: inconsistent dimensions");
    for (double v : g.variances[i]) require(v >= kVarianceFloor, ErrorKind::config, "gmm model: variance below floor");
  }
  return g;
}

GmmFit gmm_fit(const FeatureMatrix& features, const GmmFitOptions& options) {
  check_features(features);
  const std::size_t n = features.size(), d = features.front().size(), k_count = options.n_components;
  require(k_count >= 1, ErrorKind::parameter, "gmm: need at least one component");
  require(n >= 10 * k_count, ErrorKind::shape, "gmm: need at least 10 feature rows per component");

  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& row : features)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  for (auto& v : mean) v /= static_cast<double>(n);
  for (const auto& row : features)
    for (std::size_t j = 0; j < d; ++j) var[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  for (auto& v : var) v /= static_cast<double>(n);

  GmmFit fit;
  if (std::all_of(var.begin(), var.end(), [](double v) { return v == 0.0; })) {
    fit.degenerate = true;
    fit.model.weights = {1.0};
    fit.model.means = {mean};
    fit.model.variances = {std::vector<double>(d, kVarianceFloor)};
    fit.log_likelihood_trace.push_back(fit.model.mean_log_likelihood(features, options.exec));
    fit.iterations = 1;
    return fit;
  }

  // responsibilities, row-major n x K
  std::vector<double> resp(n * k_count, 0.0);
  std::mt19937_64 rng(dsp::mix_seed(options.seed, 0x6A11));
  std::uniform_int_distribution<std::size_t> pick(0, k_count - 1);
  for (std::size_t i = 0; i < n; ++i) resp[i * k_count + pick(rng)] = 1.0;

  GmmModel& g = fit.model;
  g.weights.assign(k_count, 0.0);
  g.means.assign(k_count, std::vector<double>(d, 0.0));
  g.variances.assign(k_count, std::vector<double>(d, 0.0));

  const std::size_t chunks = chunk_count(n);
  auto m_step = [&] {
    std::vector<std::vector<double>> nk(chunks, std::vector<double>(k_count, 0.0));
    std::vector<std::vector<double>> sx(chunks, std::vector<double>(k_count * d, 0.0));
    for_chunks(n, options.exec, [&](std::size_t c) {
      for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
        for (std::size_t k = 0; k < k_count; ++k) {
          const double r = resp[i * k_count + k];
          nk[c][k] += r;
          for (std::size_t j = 0; j < d; ++j) sx[c][k * d + j] += r * features[i][j];
        }
    });
    std::vector<double> nk_tot(k_count, 0.0), sx_tot(k_count * d, 0.0);
    for (std::size_t c = 0; c < chunks; ++c) {
      for (std::size_t k = 0; k < k_count; ++k) nk_tot[k] += nk[c][k];
      for (std::size_t q = 0; q < k_count * d; ++q) sx_tot[q] += sx[c][q];
    }
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t j = 0; j < d; ++j)
        g.means[k][j] = nk_tot[k] > 0.0 ? sx_tot[k * d + j] / nk_tot[k] : mean[j];

    std::vector<std::vector<double>> sv(chunks, std::vector<double>(k_count * d, 0.0));
    for_chunks(n, options.exec, [&](std::size_t c) {
      for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i)
        for (std::size_t k = 0; k < k_count; ++k) {
          const double r = resp[i * k_count + k];
          if (r == 0.0) continue;
          for (std::size_t j = 0; j < d; ++j) {
            const double diff = features[i][j] - g.means[k][j];
            sv[c][k * d + j] += r * diff * diff;
          }
        }
    });
    std::vector<double> sv_tot(k_count * d, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
      for (std::size_t q = 0; q < k_count * d; ++q) sv_tot[q] += sv[c][q];
    for (std::size_t k = 0; k < k_count; ++k) {
      g.weights[k] = nk_tot[k] / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j)
        g.variances[k][j] = std::max(kVarianceFloor, nk_tot[k] > 0.0 ? sv_tot[k * d + j] / nk_tot[k] : var[j]);
    }
  };

  auto e_step = [&] {
    std::vector<double> partial(chunks, 0.0);
    for_chunks(n, options.exec, [&](std::size_t c) {
      std::vector<double> logs;
      double s = 0.0;
      for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
        component_logs(g, features[i], logs);
        const double lse = log_sum_exp(logs);
        s += lse;
        for (std::size_t k = 0; k < k_count; ++k) resp[i * k_count + k] = std::exp(logs[k] - lse);
      }
      partial[c] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(n);
  };

  m_step();
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const double ll = e_step();
    fit.log_likelihood_trace.push_back(ll);
    fit.iterations = it + 1;
    const auto& tr = fit.log_likelihood_trace;
    if (tr.size() >= 2 && tr.back() - tr[tr.size() - 2] < options.tol) break;
    m_step();
  }
  // the final E-step leaves the model consistent with the last trace entry
  return fit;
}

double score_file(const GmmModel& cover, const GmmModel& stego, const FeatureMatrix& features) {
  require(cover.dim() == stego.dim(), ErrorKind::shape, "score_file: models differ in dimension");
  return stego.mean_log_likelihood(features) - cover.mean_log_likelihood(features);
}

double compute_pe(const ScoreSet& scores) {
  require(!scores.cover_scores.empty() && !scores.stego_scores.empty(), ErrorKind::shape,
          "compute_pe: empty score set");
  std::vector<double> all(scores.cover_scores);
  all.insert(all.end(), scores.stego_scores.begin(), scores.stego_scores.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> thresholds{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < all.size(); ++i) thresholds.push_back(0.5 * (all[i] + all[i + 1]));

  const double nc = static_cast<double>(scores.cover_scores.size());
  const double ns = static_cast<double>(scores.stego_scores.size());
  double best = 0.5;
  for (double t : thresholds) {
    const double fa = static_cast<double>(std::count_if(scores.cover_scores.begin(), scores.cover_scores.end(),
                                                        [t](double s) { return s >= t; })) / nc;
    const double md = static_cast<double>(std::count_if(scores.stego_scores.begin(), scores.stego_scores.end(),
                                                        [t](double s) { return s < t; })) / ns;
    const double e = 0.5 * (fa + md);
    best = std::min({best, e, 1.0 - e});
  }
  return best;
}

}  // namespace echohide
