// Stand-in for an external codec: copies a WAV file with a fixed delay and a
// slight gain change. Usage: fake_codec <in.wav> <out.wav> <delay> [fail]
#include <cstdlib>
#include <iostream>
#include <string>

#include "echohide/audio.hpp"

int main(int argc, char** argv) {
  if (argc < 4) return 2;
  if (argc > 4 && std::string(argv[4]) == "fail") return 1;
  try {
    auto s = echohide::read_wav(argv[1]);
    const auto delay = static_cast<std::size_t>(std::atoi(argv[3]));
    s.samples.insert(s.samples.begin(), delay, 0.0);
    for (auto& v : s.samples) v *= 0.98;
    echohide::write_wav(s, argv[2]);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
