// Random commuting positive pair on C^2 whose eigenvalue branches are shifted
// by (tau_a, tau_b): recovers the branch matching and the two-diagonal unitary.

#include <cstdio>
#include <cstdlib>
#include <random>

#include "wshift/wshift.hpp"

int main(int argc, char** argv) {
  const int tau_a = argc > 1 ? std::atoi(argv[1]) : 2;
  const int tau_b = argc > 2 ? std::atoi(argv[2]) : -1;
  std::mt19937_64 rng(argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1);
  try {
    const wshift::BranchShiftPair pair = wshift::branch_shift_pair(rng, tau_a, tau_b, true);
    const wshift::EigenData sd = wshift::common_eigenbasis(pair.s);
    const wshift::EigenData td = wshift::common_eigenbasis(pair.t);
    const auto st = wshift::match_sigma_tau(sd, td, 4);
    if (!st) {
      std::printf("no branch matching within |tau| <= 4\n");
      return 2;
    }
    const wshift::TwoDiagonalResult r = wshift::construct_two_diagonal_unitary(pair.s, pair.t, *st, sd, td, 10);
    std::printf("sigma = (%d, %d), tau = (%d, %d)\n", st->sigma[0] + 1, st->sigma[1] + 1, st->tau[0], st->tau[1]);
    std::printf("diagonals:");
    for (int d : r.support) std::printf(" %d", d);
    std::printf("\nintertwining residual %.3e\n",
                wshift::intertwining_residual(r.build.unitary, pair.s, pair.t, 1, r.build.reliable_margin));
  } catch (const wshift::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
