#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "echohide/attacks.hpp"
#include "echohide/audio.hpp"
#include "echohide/cepstrum.hpp"
#include "echohide/echo.hpp"
#include "echohide/hybrid.hpp"
#include "echohide/keysched.hpp"
#include "echohide/spread.hpp"
#include "echohide/steganalysis.hpp"

namespace echohide {

enum class Method {
  echo_original_extract,
  echo_proposed_extract,
  ss,
  ss_improved,
  echo_np,
  echo_bf,
  echo_mirrored,
  echo_ts,
  hybrid,
};

const std::vector<Method>& all_methods();
std::string to_string(Method method);
Method method_from_string(const std::string& name);
/// Methods whose echo coefficient follows the experiment's alpha grid.
bool uses_alpha_grid(Method method);

/// Parameters for every method at once. Defaults are the reference settings
/// used by the evaluation.
struct SchemeConfig {
  FrameSpec frame{};
  BitDelays delays{};
  double echo_alpha = 0.3;
  NegPosKernel np{};
  BackwardForwardKernel bf{};
  MirroredKernel mirrored{};
  double ts_alpha = 0.035;
  std::size_t ts_chips = 1023;
  std::uint64_t ts_seed = 7;
  SSParams ss{0.005, -1.0, false};
  SSParams ss_improved{0.003, -1.0, true, 0.5};
  std::uint64_t ss_seed = 1;
  HybridConfig hybrid{};
  PrimaryKey primary_key = random_primary_key(100, 11);
  ConstantMatrix constant_matrix = random_constant_matrix(100, 12);
  CepstralOptions cepstral{};

  /// Echo kernel prototype for a method (delay = d0).
  EchoKernel kernel_for(Method method, double alpha) const;
  HybridConfig hybrid_for(double alpha) const;
};

SchemeConfig scheme_from_json(const nlohmann::json& doc);
nlohmann::json scheme_to_json(const SchemeConfig& cfg);

/// Number of message bits a method carries in the signal.
std::size_t message_capacity(Method method, const SchemeConfig& cfg, std::size_t n_samples);

AudioSignal embed_method(Method method, const AudioSignal& cover, const BitString& message,
                         const SchemeConfig& cfg, double alpha);
/// Decodes n_bits message bits. The hybrid path regenerates the plan for the
/// known length instead of trusting the decoded header.
BitString extract_method(Method method, const AudioSignal& stego, std::size_t n_bits,
                         const SchemeConfig& cfg, double alpha);

// ---------------------------------------------------------------------------

struct SyntheticCorpus {
  std::size_t files = 10;
  double duration_s = 60.0;
  int sample_rate = 16000;
  std::uint64_t seed = 1;
};

struct CorpusSpec {
  std::optional<std::filesystem::path> directory;
  SyntheticCorpus synthetic{};
};

struct NamedSignal {
  std::string name;
  AudioSignal signal;
};

std::vector<NamedSignal> load_corpus(const CorpusSpec& spec);

struct SteganalysisSpec {
  std::vector<Method> methods;
  std::size_t train_per_class = 400;
  std::size_t test_per_class = 200;
  std::size_t file_samples = 20000;
  std::uint64_t seed = 101;
  MfccConfig mfcc{};
  GmmFitOptions gmm{};
};

struct CepstralSeriesSpec {
  std::vector<Method> methods;
  std::size_t file = 0;
  std::size_t frame = 0;
  std::size_t lag_begin = 1;
  std::size_t lag_end = 301;  // exclusive
};

struct ExperimentConfig {
  CorpusSpec corpus{};
  std::vector<Method> methods;
  std::vector<double> alphas{0.3};
  std::vector<AttackSpec> attacks{NoAttack{}};
  std::size_t message_length = 0;  // 0 fills each method's capacity
  std::uint64_t message_seed = 1;
  bool quantize_stego = true;  // stego passes through the 16-bit grid
  SchemeConfig scheme{};
  std::optional<SteganalysisSpec> steganalysis;
  std::optional<CepstralSeriesSpec> cepstral_series;
  CodecHook codec = CodecHook::from_env();

  void validate() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& doc);

struct ReportCell {
  std::string file;
  Method method;
  double alpha;  // 0 for methods that ignore the alpha grid
  std::string attack;
  bool skipped = false;
  std::string reason;
  double recovery_rate = 0.0;
  double snr_db = 0.0;
  std::size_t bits = 0;
};

struct CepstralSeries {
  std::vector<std::size_t> lags;
  std::vector<double> cover;
  std::vector<double> stego;
};

struct EvaluationReport {
  std::vector<ReportCell> cells;
  std::map<std::string, double> pe;  // steganalysis, keyed by method
  std::map<std::string, CepstralSeries> cepstral_series;

  nlohmann::json to_json() const;
  /// Mean recovery over files for a (method, alpha, attack) cell group;
  /// skipped cells are excluded.
  std::optional<double> mean_recovery(Method method, double alpha, const std::string& attack) const;
  std::optional<double> mean_snr(Method method, double alpha, const std::string& attack) const;
  bool all_skipped() const;
  void write_tables(const std::filesystem::path& dir) const;
};

EvaluationReport run_experiment(const ExperimentConfig& cfg);

CepstralSeries export_cepstral_series(const AudioSignal& cover, const AudioSignal& stego,
                                      const FrameSpec& spec, std::size_t frame_index,
                                      std::size_t lag_begin, std::size_t lag_end,
                                      CepstralMethod method = CepstralMethod::proposed,
                                      const CepstralOptions& opts = {});

/// Mean over full frames of max |stego - cover| profile deviation in the lag range.
double mean_cepstral_deviation(const AudioSignal& cover, const AudioSignal& stego,
                               const FrameSpec& spec, std::size_t lag_begin, std::size_t lag_end,
                               const CepstralOptions& opts = {});

// ---------------------------------------------------------------------------

struct SteganalysisResult {
  std::map<std::string, double> pe;
  std::map<std::string, bool> degenerate_fit;
};

/// Synthetic two-class bench: cover chunks from the speech-like generator,
/// stego versions per method, a cover GMM and one stego GMM per method, P_E
/// on held-out files.
SteganalysisResult run_steganalysis(const SteganalysisSpec& spec, const SchemeConfig& scheme,
                                    int sample_rate = 16000);

/// Directory bench: <dir>/cover/*.wav and <dir>/<method>/*.wav in both the
/// training and test trees.
SteganalysisResult run_steganalysis_dirs(const std::filesystem::path& train_dir,
                                         const std::filesystem::path& test_dir,
                                         const MfccConfig& mfcc, const GmmFitOptions& gmm);

}  // namespace echohide
