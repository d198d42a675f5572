#include <cstdlib>
#include <iostream>

#include "narravine/perception/gaze.hpp"

// Regenerates the shipped mutual-gaze training set.
int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: gen_gaze_data <out.csv> [count] [seed]\n";
    return 2;
  }
  const std::size_t n = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 1200;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 57;
  narravine::perception::write_gaze_csv(argv[1], narravine::perception::generate_gaze_samples(n, seed));
  return 0;
}
