#include "cli.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training allocates and frees megabyte-sized activations every batch; stop
  // glibc from returning them to the kernel each time.
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_MMAP_THRESHOLD, 1 << 28);
#endif
  return poserefer::cli::run(argc, argv);
}
