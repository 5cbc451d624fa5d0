#include "echohide/metrics.hpp"

#include <cmath>

#include "echohide/error.hpp"

namespace echohide {

double recovery_rate(const BitString& sent, const BitString& received) {
  require(!sent.empty(), ErrorKind::shape, "recovery_rate: empty message");
  require(sent.size() == received.size(), ErrorKind::shape, "recovery_rate: length mismatch");
  std::size_t match = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) match += (sent[i] & 1u) == (received[i] & 1u);
  return 100.0 * static_cast<double>(match) / static_cast<double>(sent.size());
}

double snr_db(const AudioSignal& cover, const AudioSignal& stego) {
  require(cover.size() == stego.size(), ErrorKind::shape, "snr_db: length mismatch");
  double sig = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    sig += cover.samples[i] * cover.samples[i];
    const double e = stego.samples[i] - cover.samples[i];
    noise += e * e;
  }
  require(noise > 0.0, ErrorKind::infinite_snr, "snr_db: stego is identical to the cover");
  require(sig > 0.0, ErrorKind::degenerate, "snr_db: silent cover");
  return 10.0 * std::log10(sig / noise);
}

}  // namespace echohide
