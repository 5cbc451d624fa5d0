#pragma once

namespace echohide {

// Selects between the OpenMP kernel and its serial reference. Both paths
// produce bit-identical results; the serial one exists for testing and
// benchmarking.
enum class Exec { serial, parallel };

int max_threads();

}  // namespace echohide
