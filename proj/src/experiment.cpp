#include "echohide/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"
#include "echohide/metrics.hpp"

namespace echohide {

using nlohmann::json;

namespace {
const std::vector<std::pair<Method, const char*>> kMethodNames{
    {Method::echo_original_extract, "echo_original_extract"},
    {Method::echo_proposed_extract, "echo_proposed_extract"},
    {Method::ss, "ss"},
    {Method::ss_improved, "ss_improved"},
    {Method::echo_np, "echo_np"},
    {Method::echo_bf, "echo_bf"},
    {Method::echo_mirrored, "echo_mirrored"},
    {Method::echo_ts, "echo_ts"},
    {Method::hybrid, "hybrid"},
};
}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> m;
    for (const auto& [method, name] : kMethodNames) m.push_back(method);
    return m;
  }();
  return methods;
}

std::string to_string(Method method) {
  for (const auto& [m, name] : kMethodNames)
    if (m == method) return name;
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (const auto& [m, n] : kMethodNames)
    if (name == n) return m;
  fail(ErrorKind::config, "unknown method '" + name + "'");
}

bool uses_alpha_grid(Method method) {
  return method == Method::echo_original_extract || method == Method::echo_proposed_extract ||
         method == Method::hybrid;
}

EchoKernel SchemeConfig::kernel_for(Method method, double alpha) const {
  switch (method) {
    case Method::echo_original_extract:
    case Method::echo_proposed_extract:
      return BasicKernel{alpha, delays.d0};
    case Method::echo_np:
      return with_delay(np, delays.d0);
    case Method::echo_bf:
      return with_delay(bf, delays.d0);
    case Method::echo_mirrored:
      return with_delay(mirrored, delays.d0);
    case Method::echo_ts:
      return make_time_spread(ts_alpha, delays.d0, ts_chips, ts_seed);
    default:
      fail(ErrorKind::parameter, "kernel_for: " + to_string(method) + " is not an echo method");
  }
}

HybridConfig SchemeConfig::hybrid_for(double alpha) const {
  HybridConfig h = hybrid;
  h.echo_alpha = alpha;
  h.frame = frame;
  h.delays = delays;
  h.cepstral = cepstral;
  return h;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {
void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  require(obj.is_object(), ErrorKind::config, where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* name : keys) known = known || k == name;
    require(known, ErrorKind::config, where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class F>
auto guarded(const std::string& where, F&& body) {
  try {
    return body();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, where + ": " + e.what());
  }
}

const char* header_channel_name(HeaderChannel c) { return c == HeaderChannel::ss ? "ss" : "plan"; }
HeaderChannel header_channel_from(const std::string& s) {
  if (s == "ss") return HeaderChannel::ss;
  if (s == "plan") return HeaderChannel::plan;
  fail(ErrorKind::config, "hybrid.header_channel must be 'ss' or 'plan'");
}
}  // namespace

SchemeConfig scheme_from_json(const json& doc) {
  return guarded("scheme", [&] {
    SchemeConfig cfg;
    allow_keys(doc,
               {"frame_len", "d0", "d1", "echo_alpha", "np", "bf", "mirrored", "ts", "ss", "ss_improved", "hybrid",
                "primary_key", "constant_matrix", "key_length", "key_seed", "cepstral"},
               "scheme");
    read(doc, "frame_len", cfg.frame.frame_len);
    read(doc, "d0", cfg.delays.d0);
    read(doc, "d1", cfg.delays.d1);
    read(doc, "echo_alpha", cfg.echo_alpha);
    if (doc.contains("np")) {
      const auto& o = doc.at("np");
      allow_keys(o, {"alpha_pb", "alpha_nb", "spacing"}, "scheme.np");
      int spacing = cfg.np.d_nb - cfg.np.d_pb;
      read(o, "alpha_pb", cfg.np.alpha_pb);
      read(o, "alpha_nb", cfg.np.alpha_nb);
      read(o, "spacing", spacing);
      cfg.np.d_nb = cfg.np.d_pb + spacing;
    }
    if (doc.contains("bf")) {
      allow_keys(doc.at("bf"), {"alpha"}, "scheme.bf");
      read(doc.at("bf"), "alpha", cfg.bf.alpha);
    }
    if (doc.contains("mirrored")) {
      const auto& o = doc.at("mirrored");
      allow_keys(o, {"alpha_pb", "alpha_nb", "spacing"}, "scheme.mirrored");
      int spacing = cfg.mirrored.d_nb - cfg.mirrored.d_pb;
      read(o, "alpha_pb", cfg.mirrored.alpha_pb);
      read(o, "alpha_nb", cfg.mirrored.alpha_nb);
      read(o, "spacing", spacing);
      cfg.mirrored.d_nb = cfg.mirrored.d_pb + spacing;
    }
    if (doc.contains("ts")) {
      const auto& o = doc.at("ts");
      allow_keys(o, {"alpha", "chips", "seed"}, "scheme.ts");
      read(o, "alpha", cfg.ts_alpha);
      read(o, "chips", cfg.ts_chips);
      read(o, "seed", cfg.ts_seed);
    }
    if (doc.contains("ss")) {
      const auto& o = doc.at("ss");
      allow_keys(o, {"strength_a", "k", "seed"}, "scheme.ss");
      read(o, "strength_a", cfg.ss.strength_a);
      read(o, "k", cfg.ss.k);
      read(o, "seed", cfg.ss_seed);
    }
    if (doc.contains("ss_improved")) {
      const auto& o = doc.at("ss_improved");
      allow_keys(o, {"strength_a", "k", "rejection"}, "scheme.ss_improved");
      read(o, "strength_a", cfg.ss_improved.strength_a);
      read(o, "k", cfg.ss_improved.k);
      read(o, "rejection", cfg.ss_improved.rejection);
    }
    if (doc.contains("hybrid")) {
      const auto& o = doc.at("hybrid");
      allow_keys(o,
                 {"ss_strength_a", "ss_k", "ss_improved", "ss_seed", "header_bits", "header_channel", "echo_extractor",
                  "lfsr_seed", "lfsr_taps", "lfsr_width"},
                 "scheme.hybrid");
      read(o, "ss_strength_a", cfg.hybrid.ss.strength_a);
      read(o, "ss_k", cfg.hybrid.ss.k);
      read(o, "ss_improved", cfg.hybrid.ss.improved);
      read(o, "ss_seed", cfg.hybrid.ss_seed);
      read(o, "header_bits", cfg.hybrid.header_bits);
      if (o.contains("header_channel")) cfg.hybrid.header_channel = header_channel_from(o.at("header_channel").get<std::string>());
      if (o.contains("echo_extractor")) {
        try {
          cfg.hybrid.echo_extractor = cepstral_method_from_string(o.at("echo_extractor").get<std::string>());
        } catch (const Error& e) {
          fail(ErrorKind::config, e.what());
        }
      }
      read(o, "lfsr_seed", cfg.hybrid.lfsr.seed);
      read(o, "lfsr_taps", cfg.hybrid.lfsr.taps);
      read(o, "lfsr_width", cfg.hybrid.lfsr.width);
    }
    std::size_t key_length = 100;
    std::uint64_t key_seed = 0;
    read(doc, "key_length", key_length);
    read(doc, "key_seed", key_seed);
    if (doc.contains("key_length") || doc.contains("key_seed")) {
      cfg.primary_key = random_primary_key(key_length, dsp::mix_seed(key_seed, 11));
      cfg.constant_matrix = random_constant_matrix(key_length, dsp::mix_seed(key_seed, 12));
    }
    try {
      if (doc.contains("primary_key")) cfg.primary_key = PrimaryKey::parse(doc.at("primary_key").get<std::string>());
      if (doc.contains("constant_matrix"))
        cfg.constant_matrix = ConstantMatrix::parse(doc.at("constant_matrix").get<std::vector<std::string>>());
    } catch (const Error& e) {
      fail(ErrorKind::config, e.what());
    }
    if (doc.contains("cepstral")) {
      const auto& o = doc.at("cepstral");
      allow_keys(o, {"analysis_gain", "log_floor", "peak_window"}, "scheme.cepstral");
      read(o, "analysis_gain", cfg.cepstral.analysis_gain);
      read(o, "log_floor", cfg.cepstral.log_floor);
      read(o, "peak_window", cfg.cepstral.peak_window);
    }
    try {
      validate_delays(cfg.delays, cfg.frame);
      for (Method m : {Method::echo_proposed_extract, Method::echo_np, Method::echo_bf, Method::echo_mirrored,
                       Method::echo_ts})
        validate_kernel(cfg.kernel_for(m, cfg.echo_alpha));
      validate_ss_params(cfg.ss, cfg.frame.frame_len);
      validate_ss_params(cfg.ss_improved, cfg.frame.frame_len);
      validate_lfsr(cfg.hybrid.lfsr);
    } catch (const Error& e) {
      fail(ErrorKind::config, std::string("scheme: ") + e.what());
    }
    return cfg;
  });
}

json scheme_to_json(const SchemeConfig& cfg) {
  return json{
      {"frame_len", cfg.frame.frame_len},
      {"d0", cfg.delays.d0},
      {"d1", cfg.delays.d1},
      {"echo_alpha", cfg.echo_alpha},
      {"np", {{"alpha_pb", cfg.np.alpha_pb}, {"alpha_nb", cfg.np.alpha_nb}, {"spacing", cfg.np.d_nb - cfg.np.d_pb}}},
      {"bf", {{"alpha", cfg.bf.alpha}}},
      {"mirrored",
       {{"alpha_pb", cfg.mirrored.alpha_pb},
        {"alpha_nb", cfg.mirrored.alpha_nb},
        {"spacing", cfg.mirrored.d_nb - cfg.mirrored.d_pb}}},
      {"ts", {{"alpha", cfg.ts_alpha}, {"chips", cfg.ts_chips}, {"seed", cfg.ts_seed}}},
      {"ss", {{"strength_a", cfg.ss.strength_a}, {"k", cfg.ss.k}, {"seed", cfg.ss_seed}}},
      {"ss_improved",
       {{"strength_a", cfg.ss_improved.strength_a},
        {"k", cfg.ss_improved.k},
        {"rejection", cfg.ss_improved.rejection}}},
      {"hybrid",
       {{"ss_strength_a", cfg.hybrid.ss.strength_a},
        {"ss_k", cfg.hybrid.ss.k},
        {"ss_improved", cfg.hybrid.ss.improved},
        {"ss_seed", cfg.hybrid.ss_seed},
        {"header_bits", cfg.hybrid.header_bits},
        {"header_channel", header_channel_name(cfg.hybrid.header_channel)},
        {"echo_extractor", to_string(cfg.hybrid.echo_extractor)},
        {"lfsr_seed", cfg.hybrid.lfsr.seed},
        {"lfsr_taps", cfg.hybrid.lfsr.taps},
        {"lfsr_width", cfg.hybrid.lfsr.width}}},
      {"primary_key", cfg.primary_key.str()},
      {"constant_matrix", cfg.constant_matrix.str()},
      {"cepstral",
       {{"analysis_gain", cfg.cepstral.analysis_gain},
        {"log_floor", cfg.cepstral.log_floor},
        {"peak_window", cfg.cepstral.peak_window}}},
  };
}

// ---------------------------------------------------------------------------
// Per-method embed / extract

std::size_t message_capacity(Method method, const SchemeConfig& cfg, std::size_t n_samples) {
  const std::size_t frames = cfg.frame.frame_count(n_samples);
  if (method == Method::hybrid) return frames > cfg.hybrid.header_bits ? frames - cfg.hybrid.header_bits : 0;
  return frames;
}

AudioSignal embed_method(Method method, const AudioSignal& cover, const BitString& message, const SchemeConfig& cfg,
                         double alpha) {
  switch (method) {
    case Method::ss:
      return ss_embed(cover, message, cfg.ss_seed, cfg.ss, cfg.frame);
    case Method::ss_improved:
      return ss_embed(cover, message, cfg.ss_seed, cfg.ss_improved, cfg.frame);
    case Method::hybrid:
      return hybrid_embed(cover, message, cfg.hybrid_for(alpha), cfg.primary_key, cfg.constant_matrix);
    default:
      return embed_echo(cover, message, cfg.kernel_for(method, alpha), cfg.delays, cfg.frame);
  }
}

BitString extract_method(Method method, const AudioSignal& stego, std::size_t n_bits, const SchemeConfig& cfg,
                         double alpha) {
  switch (method) {
    case Method::ss:
    case Method::ss_improved:
      return ss_extract(stego, cfg.ss_seed, cfg.frame, n_bits);
    case Method::hybrid: {
      const HybridConfig h = cfg.hybrid_for(alpha);
      validate_hybrid(h, stego.sample_rate);
      const std::size_t total = h.header_bits + n_bits;
      const auto plan = frame_plan(h, generate_subkeys(cfg.primary_key, cfg.constant_matrix, total), total);
      const std::vector<FrameMethod> body(plan.begin() + static_cast<std::ptrdiff_t>(h.header_bits), plan.end());
      const auto cipher = hybrid_extract_planned(stego, body, h, hybrid_ss_seed(h, cfg.primary_key), h.header_bits);
      return xor_cipher(cipher, lfsr_stream(h.lfsr, cipher.size()));
    }
    case Method::echo_original_extract:
      return extract_echo(stego, cfg.delays, cfg.frame, n_bits, CepstralMethod::original, cfg.cepstral);
    default:
      return extract_echo(stego, cfg.delays, cfg.frame, n_bits, CepstralMethod::proposed, cfg.cepstral);
  }
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<NamedSignal> load_corpus(const CorpusSpec& spec) {
  std::vector<NamedSignal> out;
  if (spec.directory) {
    require(std::filesystem::is_directory(*spec.directory), ErrorKind::config,
            "corpus directory not found: " + spec.directory->string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*spec.directory))
      if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({f.stem().string(), read_wav(f)});
  } else {
    const auto& s = spec.synthetic;
    for (std::size_t i = 0; i < s.files; ++i) {
      std::ostringstream name;
      name << "synth_" << std::setw(2) << std::setfill('0') << i;
      out.push_back({name.str(), synth_speech_like(s.duration_s, s.sample_rate, dsp::mix_seed(s.seed, i))});
    }
  }
  require(!out.empty(), ErrorKind::config, "corpus is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration

void ExperimentConfig::validate() const {
  require(!methods.empty(), ErrorKind::config, "experiment: no methods requested");
  require(!alphas.empty(), ErrorKind::config, "experiment: empty alpha grid");
  for (double a : alphas)
    require(a > 0.0 && a < 1.0, ErrorKind::config, "experiment: alphas must lie in (0, 1)");
  require(!attacks.empty(), ErrorKind::config, "experiment: no attacks (use \"none\")");
  if (!corpus.directory) {
    require(corpus.synthetic.files >= 1, ErrorKind::config, "experiment: synthetic corpus needs files");
    require(corpus.synthetic.duration_s > 0.0 && corpus.synthetic.sample_rate > 0, ErrorKind::config,
            "experiment: synthetic corpus needs positive duration and rate");
  }
  if (steganalysis) {
    require(!steganalysis->methods.empty(), ErrorKind::config, "steganalysis: no methods");
    require(steganalysis->train_per_class >= 1 && steganalysis->test_per_class >= 1, ErrorKind::config,
            "steganalysis: need train and test files");
  }
  if (cepstral_series) require(!cepstral_series->methods.empty(), ErrorKind::config, "cepstral_series: no methods");
}

namespace {
std::vector<Method> methods_from(const json& arr) {
  std::vector<Method> out;
  for (const auto& m : arr) out.push_back(method_from_string(m.get<std::string>()));
  return out;
}

MfccConfig mfcc_from_json(const json& o, MfccConfig cfg) {
  allow_keys(o, {"window_len", "hop", "n_mel_filters", "n_coeffs", "sample_rate"}, "mfcc");
  read(o, "window_len", cfg.window_len);
  read(o, "hop", cfg.hop);
  read(o, "n_mel_filters", cfg.n_mel_filters);
  read(o, "n_coeffs", cfg.n_coeffs);
  read(o, "sample_rate", cfg.sample_rate);
  return cfg;
}

GmmFitOptions gmm_from_json(const json& o, GmmFitOptions g) {
  allow_keys(o, {"n_components", "seed", "max_iter", "tol"}, "gmm");
  read(o, "n_components", g.n_components);
  read(o, "seed", g.seed);
  read(o, "max_iter", g.max_iter);
  read(o, "tol", g.tol);
  return g;
}
}  // namespace

ExperimentConfig experiment_from_json(const json& doc) {
  return guarded("experiment", [&] {
    ExperimentConfig cfg;
    allow_keys(doc,
               {"corpus", "methods", "alphas", "attacks", "message", "quantize_stego", "scheme", "steganalysis",
                "cepstral_series", "codec"},
               "experiment");
    if (doc.contains("corpus")) {
      const auto& c = doc.at("corpus");
      allow_keys(c, {"directory", "synthetic"}, "corpus");
      if (c.contains("directory")) cfg.corpus.directory = c.at("directory").get<std::string>();
      if (c.contains("synthetic")) {
        const auto& s = c.at("synthetic");
        allow_keys(s, {"files", "duration_s", "sample_rate", "seed"}, "corpus.synthetic");
        read(s, "files", cfg.corpus.synthetic.files);
        read(s, "duration_s", cfg.corpus.synthetic.duration_s);
        read(s, "sample_rate", cfg.corpus.synthetic.sample_rate);
        read(s, "seed", cfg.corpus.synthetic.seed);
      }
    }
    cfg.methods = doc.contains("methods") ? methods_from(doc.at("methods")) : all_methods();
    read(doc, "alphas", cfg.alphas);
    if (doc.contains("attacks")) {
      cfg.attacks.clear();
      for (const auto& a : doc.at("attacks")) {
        try {
          cfg.attacks.push_back(parse_attack(a.get<std::string>()));
        } catch (const Error& e) {
          fail(ErrorKind::config, e.what());
        }
      }
    }
    if (doc.contains("message")) {
      const auto& m = doc.at("message");
      allow_keys(m, {"length", "seed"}, "message");
      read(m, "length", cfg.message_length);
      read(m, "seed", cfg.message_seed);
    }
    read(doc, "quantize_stego", cfg.quantize_stego);
    if (doc.contains("scheme")) cfg.scheme = scheme_from_json(doc.at("scheme"));
    if (doc.contains("steganalysis")) {
      const auto& s = doc.at("steganalysis");
      allow_keys(s, {"methods", "train_per_class", "test_per_class", "file_samples", "seed", "mfcc", "gmm"},
                 "steganalysis");
      SteganalysisSpec st;
      st.methods = s.contains("methods") ? methods_from(s.at("methods")) : cfg.methods;
      read(s, "train_per_class", st.train_per_class);
      read(s, "test_per_class", st.test_per_class);
      read(s, "file_samples", st.file_samples);
      read(s, "seed", st.seed);
      if (s.contains("mfcc")) st.mfcc = mfcc_from_json(s.at("mfcc"), st.mfcc);
      if (s.contains("gmm")) st.gmm = gmm_from_json(s.at("gmm"), st.gmm);
      cfg.steganalysis = st;
    }
    if (doc.contains("cepstral_series")) {
      const auto& s = doc.at("cepstral_series");
      allow_keys(s, {"methods", "file", "frame", "lag_begin", "lag_end"}, "cepstral_series");
      CepstralSeriesSpec cs;
      cs.methods = s.contains("methods") ? methods_from(s.at("methods")) : cfg.methods;
      read(s, "file", cs.file);
      read(s, "frame", cs.frame);
      read(s, "lag_begin", cs.lag_begin);
      read(s, "lag_end", cs.lag_end);
      cfg.cepstral_series = cs;
    }
    if (doc.contains("codec")) {
      const auto& c = doc.at("codec");
      allow_keys(c, {"encode", "decode", "max_align_lag"}, "codec");
      read(c, "encode", cfg.codec.encode);
      read(c, "decode", cfg.codec.decode);
      read(c, "max_align_lag", cfg.codec.max_align_lag);
    }
    cfg.validate();
    return cfg;
  });
}

// ---------------------------------------------------------------------------
// Report

namespace {
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json EvaluationReport::to_json() const {
  json cells_doc = json::array();
  for (const auto& c : cells) {
    json cell{{"file", c.file}, {"method", echohide::to_string(c.method)}, {"alpha", c.alpha}, {"attack", c.attack},
              {"bits", c.bits}, {"snr_db", number_or_null(c.snr_db)}};
    if (c.skipped) {
      cell["status"] = "skipped";
      cell["reason"] = c.reason;
      cell["recovery_rate"] = nullptr;
    } else {
      cell["status"] = "ok";
      cell["recovery_rate"] = c.recovery_rate;
    }
    cells_doc.push_back(std::move(cell));
  }
  json series = json::object();
  for (const auto& [name, s] : cepstral_series) series[name] = {{"lags", s.lags}, {"cover", s.cover}, {"stego", s.stego}};
  json doc{{"format", "echohide-report"}, {"version", 1}, {"cells", cells_doc}, {"cepstral_series", series}};
  json pe_doc = json::object();
  for (const auto& [name, v] : pe) pe_doc[name] = v;
  doc["steganalysis"] = {{"pe", pe_doc}};
  return doc;
}

namespace {
template <class F>
std::optional<double> mean_over(const std::vector<ReportCell>& cells, Method method, double alpha,
                                const std::string& attack, F&& field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.method != method || c.attack != attack || c.skipped || std::abs(c.alpha - alpha) > 1e-12) continue;
    const double v = field(c);
    if (!std::isfinite(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}
}  // namespace

std::optional<double> EvaluationReport::mean_recovery(Method method, double alpha, const std::string& attack) const {
  return mean_over(cells, method, alpha, attack, [](const ReportCell& c) { return c.recovery_rate; });
}

std::optional<double> EvaluationReport::mean_snr(Method method, double alpha, const std::string& attack) const {
  return mean_over(cells, method, alpha, attack, [](const ReportCell& c) { return c.snr_db; });
}

bool EvaluationReport::all_skipped() const {
  return !cells.empty() && std::all_of(cells.begin(), cells.end(), [](const ReportCell& c) { return c.skipped; });
}

void EvaluationReport::write_tables(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::trunc);
    require(static_cast<bool>(f), ErrorKind::io, "cannot write " + (dir / name).string());
    f << std::setprecision(10);
    return f;
  };
  {
    auto f = open("cells.tsv");
    f << "file\tmethod\talpha\tattack\tbits\trecovery_rate\tsnr_db\tstatus\n";
    for (const auto& c : cells) {
      f << c.file << '\t' << echohide::to_string(c.method) << '\t' << c.alpha << '\t' << c.attack << '\t' << c.bits
        << '\t';
      if (c.skipped) f << "NA";
      else f << c.recovery_rate;
      f << '\t';
      if (std::isfinite(c.snr_db)) f << c.snr_db;
      else f << "NA";
      f << '\t' << (c.skipped ? "skipped: " + c.reason : std::string("ok")) << '\n';
    }
  }
  {
    // one row per (method, alpha, attack), one column per file, then the mean
    std::vector<std::string> files;
    for (const auto& c : cells)
      if (std::find(files.begin(), files.end(), c.file) == files.end()) files.push_back(c.file);
    auto f = open("recovery.tsv");
    f << "method\talpha\tattack";
    for (const auto& name : files) f << '\t' << name;
    f << "\taverage\n";
    std::set<std::tuple<std::string, double, std::string>> seen;
    for (const auto& c : cells) {
      auto key = std::make_tuple(echohide::to_string(c.method), c.alpha, c.attack);
      if (!seen.insert(key).second) continue;
      f << std::get<0>(key) << '\t' << c.alpha << '\t' << c.attack;
      for (const auto& name : files) {
        f << '\t';
        auto it = std::find_if(cells.begin(), cells.end(), [&](const ReportCell& x) {
          return x.file == name && x.method == c.method && x.alpha == c.alpha && x.attack == c.attack;
        });
        if (it == cells.end() || it->skipped) f << "NA";
        else f << it->recovery_rate;
      }
      const auto avg = mean_recovery(c.method, c.alpha, c.attack);
      f << '\t';
      if (avg) f << *avg;
      else f << "NA";
      f << '\n';
    }
  }
  {
    auto f = open("snr.tsv");
    f << "method\talpha\tmean_snr_db\n";
    std::set<std::pair<std::string, double>> seen;
    for (const auto& c : cells) {
      if (!seen.insert({echohide::to_string(c.method), c.alpha}).second) continue;
      const auto v = mean_snr(c.method, c.alpha, c.attack);
      f << echohide::to_string(c.method) << '\t' << c.alpha << '\t';
      if (v) f << *v;
      else f << "NA";
      f << '\n';
    }
  }
  if (!pe.empty()) {
    auto f = open("pe.tsv");
    f << "method\tpe\n";
    for (const auto& [name, v] : pe) f << name << '\t' << v << '\n';
  }
}

// ---------------------------------------------------------------------------
// Experiment runner

CepstralSeries export_cepstral_series(const AudioSignal& cover, const AudioSignal& stego, const FrameSpec& spec,
                                      std::size_t frame_index, std::size_t lag_begin, std::size_t lag_end,
                                      CepstralMethod method, const CepstralOptions& opts) {
  require(cover.size() == stego.size(), ErrorKind::shape, "cepstral series: cover and stego lengths differ");
  require(spec.frame_len > 0 && frame_index < spec.frame_count(cover.size()), ErrorKind::parameter,
          "cepstral series: frame index out of range");
  require(lag_begin < lag_end && lag_end <= spec.frame_len, ErrorKind::parameter,
          "cepstral series: lag range must be non-empty and inside the frame");
  const auto pc = cepstrum_autocorr(frame_view(cover, spec, frame_index), method, opts);
  const auto ps = cepstrum_autocorr(frame_view(stego, spec, frame_index), method, opts);
  CepstralSeries s;
  for (std::size_t lag = lag_begin; lag < lag_end; ++lag) {
    s.lags.push_back(lag);
    s.cover.push_back(pc[lag]);
    s.stego.push_back(ps[lag]);
  }
  return s;
}

double mean_cepstral_deviation(const AudioSignal& cover, const AudioSignal& stego, const FrameSpec& spec,
                               std::size_t lag_begin, std::size_t lag_end, const CepstralOptions& opts) {
  require(cover.size() == stego.size(), ErrorKind::shape, "cepstral deviation: lengths differ");
  require(lag_begin < lag_end && lag_end <= spec.frame_len, ErrorKind::parameter,
          "cepstral deviation: bad lag range");
  const std::size_t frames = spec.frame_count(cover.size());
  require(frames > 0, ErrorKind::shape, "cepstral deviation: no full frames");
  std::vector<double> dev(frames, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(frames);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < n; ++f) {
    const auto i = static_cast<std::size_t>(f);
    const auto pc = cepstrum_autocorr_proposed(frame_view(cover, spec, i), opts);
    const auto ps = cepstrum_autocorr_proposed(frame_view(stego, spec, i), opts);
    double m = 0.0;
    for (std::size_t lag = lag_begin; lag < lag_end; ++lag) m = std::max(m, std::abs(ps[lag] - pc[lag]));
    dev[i] = m;
  }
  double sum = 0.0;
  for (double d : dev) sum += d;
  return sum / static_cast<double>(frames);
}

namespace {
struct Job {
  std::size_t file;
  Method method;
  double alpha;
};

double cell_alpha(Method method, double alpha) { return uses_alpha_grid(method) ? alpha : 0.0; }
}  // namespace

EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto corpus = load_corpus(cfg.corpus);

  std::vector<Job> jobs;
  for (std::size_t f = 0; f < corpus.size(); ++f)
    for (Method m : cfg.methods) {
      if (uses_alpha_grid(m))
        for (double a : cfg.alphas) jobs.push_back({f, m, a});
      else
        jobs.push_back({f, m, cfg.scheme.echo_alpha});
    }

  // capacity problems surface before any work starts
  for (const auto& job : jobs) {
    const std::size_t cap = message_capacity(job.method, cfg.scheme, corpus[job.file].signal.size());
    require(cfg.message_length <= cap, ErrorKind::capacity,
            corpus[job.file].name + ": " + to_string(job.method) + " carries only " + std::to_string(cap) +
                " bits, message has " + std::to_string(cfg.message_length));
    require(cap > 0, ErrorKind::capacity, corpus[job.file].name + ": no capacity for " + to_string(job.method));
  }

  std::vector<std::vector<ReportCell>> results(jobs.size());
  std::exception_ptr error;
  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n_jobs; ++j) {
    try {
      const Job& job = jobs[static_cast<std::size_t>(j)];
      const auto& cover = corpus[job.file];
      const std::size_t len = cfg.message_length > 0
                                  ? cfg.message_length
                                  : message_capacity(job.method, cfg.scheme, cover.signal.size());
      const auto message = random_bits(len, dsp::mix_seed(cfg.message_seed, job.file));
      AudioSignal stego = embed_method(job.method, cover.signal, message, cfg.scheme, job.alpha);
      if (cfg.quantize_stego) stego = quantize_pcm16(stego);
      double snr = std::numeric_limits<double>::infinity();
      try {
        snr = snr_db(cover.signal, stego);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infinite_snr) throw;
      }
      auto& out = results[static_cast<std::size_t>(j)];
      for (const auto& attack : cfg.attacks) {
        ReportCell cell;
        cell.file = cover.name;
        cell.method = job.method;
        cell.alpha = cell_alpha(job.method, job.alpha);
        cell.attack = attack_label(attack);
        cell.bits = len;
        cell.snr_db = snr;
        const auto attacked = apply_attack(stego, attack, cfg.codec);
        if (attacked.skipped) {
          cell.skipped = true;
          cell.reason = attacked.reason;
        } else {
          const auto received = extract_method(job.method, attacked.signal, len, cfg.scheme, job.alpha);
          cell.recovery_rate = recovery_rate(message, received);
        }
        out.push_back(std::move(cell));
      }
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  EvaluationReport report;
  for (auto& r : results)
    for (auto& c : r) report.cells.push_back(std::move(c));

  if (cfg.cepstral_series) {
    const auto& cs = *cfg.cepstral_series;
    require(cs.file < corpus.size(), ErrorKind::parameter, "cepstral_series: file index out of range");
    const auto& cover = corpus[cs.file].signal;
    for (Method m : cs.methods) {
      const std::size_t cap = message_capacity(m, cfg.scheme, cover.size());
      const auto message = random_bits(cap, dsp::mix_seed(cfg.message_seed, cs.file));
      auto stego = embed_method(m, cover, message, cfg.scheme, cfg.scheme.echo_alpha);
      if (cfg.quantize_stego) stego = quantize_pcm16(stego);
      report.cepstral_series[to_string(m)] = export_cepstral_series(cover, stego, cfg.scheme.frame, cs.frame,
                                                                    cs.lag_begin, cs.lag_end, CepstralMethod::proposed,
                                                                    cfg.scheme.cepstral);
    }
  }

  if (cfg.steganalysis) {
    const auto result = run_steganalysis(*cfg.steganalysis, cfg.scheme, cfg.corpus.synthetic.sample_rate);
    report.pe = result.pe;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Steganalysis benches

namespace {
FeatureMatrix stack(const std::vector<FeatureMatrix>& files, std::size_t begin, std::size_t end) {
  FeatureMatrix out;
  for (std::size_t i = begin; i < end; ++i) out.insert(out.end(), files[i].begin(), files[i].end());
  return out;
}

double pe_for(const GmmModel& cover_model, const GmmModel& stego_model, const std::vector<FeatureMatrix>& cover_test,
              const std::vector<FeatureMatrix>& stego_test) {
  ScoreSet scores;
  for (const auto& f : cover_test) scores.cover_scores.push_back(score_file(cover_model, stego_model, f));
  for (const auto& f : stego_test) scores.stego_scores.push_back(score_file(cover_model, stego_model, f));
  return compute_pe(scores);
}
}  // namespace

SteganalysisResult run_steganalysis(const SteganalysisSpec& spec, const SchemeConfig& scheme, int sample_rate) {
  require(!spec.methods.empty(), ErrorKind::config, "steganalysis: no methods");
  require(spec.file_samples >= spec.mfcc.window_len, ErrorKind::config, "steganalysis: files shorter than one window");
  MfccConfig mfcc = spec.mfcc;
  mfcc.sample_rate = sample_rate;
  const std::size_t total = spec.train_per_class + spec.test_per_class;

  // covers are cut from longer speech-like recordings
  constexpr double kSourceSeconds = 60.0;
  std::vector<AudioSignal> covers;
  for (std::size_t src = 0; covers.size() < total; ++src) {
    const auto long_signal = synth_speech_like(kSourceSeconds, sample_rate, dsp::mix_seed(spec.seed, src));
    for (std::size_t off = 0; off + spec.file_samples <= long_signal.size() && covers.size() < total;
         off += spec.file_samples) {
      AudioSignal piece;
      piece.sample_rate = sample_rate;
      piece.samples.assign(long_signal.samples.begin() + static_cast<std::ptrdiff_t>(off),
                           long_signal.samples.begin() + static_cast<std::ptrdiff_t>(off + spec.file_samples));
      covers.push_back(quantize_pcm16(piece));
    }
  }

  std::vector<FeatureMatrix> cover_features(total);
  for (std::size_t i = 0; i < total; ++i) cover_features[i] = mfcc_features(covers[i], mfcc);
  const auto cover_fit = gmm_fit(stack(cover_features, 0, spec.train_per_class), spec.gmm);
  const std::vector<FeatureMatrix> cover_test(cover_features.begin() + static_cast<std::ptrdiff_t>(spec.train_per_class),
                                              cover_features.end());

  SteganalysisResult result;
  for (Method m : spec.methods) {
    std::vector<FeatureMatrix> stego_features(total);
    const auto n = static_cast<std::ptrdiff_t>(total);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        const auto& cover = covers[static_cast<std::size_t>(i)];
        const std::size_t cap = message_capacity(m, scheme, cover.size());
        const auto message = random_bits(cap, dsp::mix_seed(spec.seed ^ 0x57E60, static_cast<std::uint64_t>(i)));
        const auto stego = quantize_pcm16(embed_method(m, cover, message, scheme, scheme.echo_alpha));
        stego_features[static_cast<std::size_t>(i)] = mfcc_features(stego, mfcc, Exec::serial);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    const auto stego_fit = gmm_fit(stack(stego_features, 0, spec.train_per_class), spec.gmm);
    const std::vector<FeatureMatrix> stego_test(stego_features.begin() + static_cast<std::ptrdiff_t>(spec.train_per_class),
                                                stego_features.end());
    result.pe[to_string(m)] = pe_for(cover_fit.model, stego_fit.model, cover_test, stego_test);
    result.degenerate_fit[to_string(m)] = cover_fit.degenerate || stego_fit.degenerate;
  }
  return result;
}

namespace {
std::map<std::string, std::vector<FeatureMatrix>> features_by_class(const std::filesystem::path& root,
                                                                    const MfccConfig& mfcc) {
  require(std::filesystem::is_directory(root), ErrorKind::config, "steganalysis: not a directory: " + root.string());
  std::map<std::string, std::vector<FeatureMatrix>> out;
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(d))
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    auto& list = out[d.filename().string()];
    for (const auto& f : files) {
      const auto sig = read_wav(f);
      MfccConfig cfg = mfcc;
      cfg.sample_rate = sig.sample_rate;
      list.push_back(mfcc_features(sig, cfg));
    }
  }
  return out;
}
}  // namespace

SteganalysisResult run_steganalysis_dirs(const std::filesystem::path& train_dir, const std::filesystem::path& test_dir,
                                         const MfccConfig& mfcc, const GmmFitOptions& gmm) {
  const auto train = features_by_class(train_dir, mfcc);
  const auto test = features_by_class(test_dir, mfcc);
  auto need = [](const auto& m, const std::string& cls, const std::filesystem::path& root) -> const auto& {
    auto it = m.find(cls);
    require(it != m.end() && !it->second.empty(), ErrorKind::config,
            "steganalysis: " + (root / cls).string() + " has no .wav files");
    return it->second;
  };
  const auto& cover_train = need(train, "cover", train_dir);
  const auto& cover_test = need(test, "cover", test_dir);
  const auto cover_fit = gmm_fit(stack(cover_train, 0, cover_train.size()), gmm);

  SteganalysisResult result;
  for (const auto& [cls, files] : train) {
    if (cls == "cover") continue;
    const auto& stego_test = need(test, cls, test_dir);
    const auto stego_fit = gmm_fit(stack(files, 0, files.size()), gmm);
    result.pe[cls] = pe_for(cover_fit.model, stego_fit.model, cover_test, stego_test);
    result.degenerate_fit[cls] = cover_fit.degenerate || stego_fit.degenerate;
  }
  require(!result.pe.empty(), ErrorKind::config, "steganalysis: no stego class directories next to 'cover'");
  return result;
}

}  // namespace echohide
