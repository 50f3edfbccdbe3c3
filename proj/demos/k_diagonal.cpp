// Builds the k-diagonal Example unitary from its zeroth column and prints the
// diagonals it occupies together with the minimal-support certificate.

#include <cstdio>
#include <cstdlib>

#include "wshift/wshift.hpp"

int main(int argc, char** argv) {
  const int k = argc > 1 ? std::atoi(argv[1]) : 3;
  try {
    const wshift::EigenGrid grid = wshift::default_grid(k);
    const wshift::ShiftPair pair = wshift::generate_k_diagonal_pair(grid);
    const int window = std::max(8, 2 * k + 4);
    const wshift::BuildResult b =
        wshift::build_unitary_detailed(wshift::canonical_u0(k), pair.s, pair.t, window, window);

    std::printf("k = %d, window N = %d, column range %d\n", k, window, b.col_range);
    std::printf("unitarity residual   %.3e\n", wshift::unitarity_residual(b.unitary, b.reliable_margin));
    std::printf("intertwining residual %.3e\n",
                wshift::intertwining_residual(b.unitary, pair.s, pair.t, 1, b.reliable_margin));
    std::printf("diagonals:");
    for (int d : wshift::diagonal_support(b.unitary, wshift::kDefaultTol, b.reliable_margin)) std::printf(" %d", d);
    const wshift::MinSupportCertificate cert = wshift::certify_min_support(pair.s, pair.t, grid, k);
    std::printf("\nminimal number of diagonals: %d\n", cert.min_support);
  } catch (const wshift::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
