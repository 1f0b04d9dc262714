// Allocates and touches N MiB, then exits. Used to check peak-RSS accounting.

#include <cstdlib>
#include <cstring>
#include <vector>

int main(int argc, char** argv) {
  const std::size_t mib = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
  std::vector<char> block(mib << 20);
  std::memset(block.data(), 1, block.size());
  volatile char sink = 0;
  for (std::size_t i = 0; i < block.size(); i += 4096) sink = sink + block[i];
  return sink == 42 ? 1 : 0;
}
