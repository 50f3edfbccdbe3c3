#pragma once

#include <cstdlib>
#include <string>
#include <utility>

#include "wshift/banded_operator.hpp"
#include "wshift/polar.hpp"
#include "wshift/weight_sequence.hpp"

namespace wshift {

/// Finite section of the bilateral shift (S x)_i = S_i x_{i-1}: blocks
/// (i, i-1) = S_i for -N+1 <= i <= N.
inline BandedOperator truncate_shift(const WeightSequence& seq, int window) {
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "truncation window must be >= 1");
  BandedOperator op(seq.dim(), window);
  for (int i = -window + 1; i <= window; ++i) op.set(i, i - 1, seq.at(i));
  return op;
}

/// Finite section of S^[k]: S^k for k >= 1, I for k = 0, S^{*|k|} for k <= -1.
/// Blocks are the closed-form products, so every block whose row and column
/// lie in the window is exact.
inline BandedOperator shift_power_signed(const WeightSequence& seq, int k, int window) {
  if (std::abs(k) > 2 * window) {
    throw Error(ErrorKind::WindowTooSmall,
                "|k| = " + std::to_string(std::abs(k)) + " exceeds 2N = " + std::to_string(2 * window));
  }
  if (k == 0) return BandedOperator::identity(seq.dim(), window);
  BandedOperator op(seq.dim(), window);
  if (k > 0) {
    for (int j = -window; j + k <= window; ++j) op.set(j + k, j, forward_product(seq, j, k));
  } else {
    const int n = -k;
    for (int j = -window + n; j <= window; ++j) op.set(j - n, j, backward_adjoint_product(seq, j, n));
  }
  return op;
}

/// Weightwise polar decomposition S_i = V_i |S_i|. Returns the sequences of
/// unitary factors (V_i) and moduli (|S_i|) in the same description kind.
inline std::pair<WeightSequence, WeightSequence> shift_polar(const WeightSequence& seq) {
  std::vector<CMatrix> factors;
  std::vector<CMatrix> moduli;
  for (const auto& w : seq.stored()) {
    auto pp = polar_decompose(w);
    factors.push_back(std::move(pp.factor));
    moduli.push_back(std::move(pp.modulus));
  }
  if (seq.is_periodic()) {
    return {WeightSequence::periodic(seq.dim(), std::move(factors)),
            WeightSequence::periodic(seq.dim(), std::move(moduli))};
  }
  return {WeightSequence::windowed(seq.dim(), seq.first_index(), std::move(factors)),
          WeightSequence::windowed(seq.dim(), seq.first_index(), std::move(moduli))};
}

/// D[(|S_{i+1}|)], the modulus |S| of the shift as a diagonal operator.
inline BandedOperator shift_modulus_operator(const WeightSequence& seq, int window) {
  return BandedOperator::diagonal(seq.dim(), window, [&](int i) { return modulus(seq.at(i + 1)); });
}

}  // namespace wshift
