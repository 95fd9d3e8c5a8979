// Regenerates the checked-in files under tests/golden/. Run with the target
// directory as the only argument, then review the diff before committing.
#include <cstdio>

#include "support/oracles.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <golden-dir>\n", argv[0]);
    return 1;
  }
  qcr::testing::write_golden_artifacts(argv[1]);
  std::printf("wrote golden artifacts to %s\n", argv[1]);
  return 0;
}
