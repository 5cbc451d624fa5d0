#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "echohide/audio.hpp"
#include "echohide/parallel.hpp"

namespace echohide {

struct MfccConfig {
  std::size_t window_len = 512;
  std::size_t hop = 256;
  std::size_t n_mel_filters = 26;
  std::size_t n_coeffs = 13;
  int sample_rate = 16000;
};

void validate_mfcc(const MfccConfig& cfg);

using FeatureMatrix = std::vector<std::vector<double>>;  // one row per window

/// n_mel_filters x (window_len / 2 + 1) triangular weights, 0 Hz to Nyquist.
std::vector<std::vector<double>> mel_filterbank(const MfccConfig& cfg);

FeatureMatrix mfcc_features(const AudioSignal& signal, const MfccConfig& cfg,
                            Exec exec = Exec::parallel);

struct GmmModel {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;

  std::size_t n_components() const { return weights.size(); }
  std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }

  double log_likelihood(std::span<const double> x) const;
  /// Mean per-row log-likelihood.
  double mean_log_likelihood(const FeatureMatrix& features, Exec exec = Exec::parallel) const;

  nlohmann::json to_json() const;
  static GmmModel from_json(const nlohmann::json& doc);
};

inline constexpr double kVarianceFloor = 1e-6;

struct GmmFitOptions {
  std::size_t n_components = 8;
  std::uint64_t seed = 1;
  std::size_t max_iter = 200;
  double tol = 1e-6;  // on the mean per-row log-likelihood
  Exec exec = Exec::parallel;
};

struct GmmFit {
  GmmModel model;
  std::vector<double> log_likelihood_trace;  // mean per-row, one per iteration
  bool degenerate = false;                   // features had no spread
  std::size_t iterations = 0;
};

GmmFit gmm_fit(const FeatureMatrix& features, const GmmFitOptions& options);

/// Mean per-row log-likelihood under the stego model minus under the cover
/// model; positive leans stego.
double score_file(const GmmModel& cover, const GmmModel& stego, const FeatureMatrix& features);

struct ScoreSet {
  std::vector<double> cover_scores;
  std::vector<double> stego_scores;
};

/// min over thresholds and both polarities of (P_FA + P_MD) / 2, in [0, 0.5].
double compute_pe(const ScoreSet& scores);

}  // namespace echohide
