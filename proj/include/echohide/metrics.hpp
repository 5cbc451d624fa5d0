#pragma once

#include "echohide/audio.hpp"

namespace echohide {

/// 100 * matching bits / total. Shape error on unequal or empty inputs.
double recovery_rate(const BitString& sent, const BitString& received);

/// 10 log10(sum cover^2 / sum (stego - cover)^2). Infinite-SNR error when the
/// signals are identical.
double snr_db(const AudioSignal& cover, const AudioSignal& stego);

}  // namespace echohide
