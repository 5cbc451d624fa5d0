#include "echohide/error.hpp"
#include "echohide/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace echohide {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::format: return "format error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::capacity: return "capacity error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::degenerate: return "degenerate input";
    case ErrorKind::weak_key: return "weak key";
    case ErrorKind::corrupt_header: return "corrupt header";
    case ErrorKind::config: return "config error";
    case ErrorKind::infinite_snr: return "infinite SNR";
  }
  return "error";
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace echohide
