#pragma once

#include <stdexcept>
#include <string>

namespace echohide {

enum class ErrorKind {
  format,          // unsupported or malformed file contents
  io,              // unreadable, unwritable or truncated file
  capacity,        // not enough frames for the requested payload
  shape,           // mismatched lengths or dimensions
  parameter,       // out-of-range argument
  degenerate,      // silent or all-zero input where energy is required
  weak_key,        // key material that yields a constant subkey stream
  corrupt_header,  // decoded length header is impossible for the signal
  config,          // malformed configuration document
  infinite_snr,    // stego equals cover
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace echohide
