#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wshift/matrix.hpp"
#include "wshift/polar.hpp"

namespace wshift {

/// Stored weights S_lo..S_hi; every other index carries the identity.
struct Windowed {
  int lo = 0;
  int hi = -1;
  std::vector<CMatrix> weights;
};

/// S_i = weights[i mod period], anchored at index 0.
struct Periodic {
  std::vector<CMatrix> weights;
};

/// Finite description of a bounded sequence (S_i)_{i in Z} of invertible m x m
/// weights. Immutable after construction.
class WeightSequence {
 public:
  using Kind = std::variant<Windowed, Periodic>;

  WeightSequence(Eigen::Index dim, Kind kind) : dim_(dim), kind_(std::move(kind)) { validate(); }

  static WeightSequence windowed(Eigen::Index dim, int lo, std::vector<CMatrix> weights) {
    const int hi = lo + static_cast<int>(weights.size()) - 1;
    return WeightSequence(dim, Windowed{lo, hi, std::move(weights)});
  }

  static WeightSequence periodic(Eigen::Index dim, std::vector<CMatrix> weights) {
    return WeightSequence(dim, Periodic{std::move(weights)});
  }

  static WeightSequence identity_weights(Eigen::Index dim) {
    return WeightSequence(dim, Windowed{0, -1, {}});
  }

  static WeightSequence constant(const CMatrix& w) { return periodic(w.rows(), {w}); }

  Eigen::Index dim() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }
  bool is_periodic() const noexcept { return std::holds_alternative<Periodic>(kind_); }

  /// Stored weights in description order (window order, or period order).
  const std::vector<CMatrix>& stored() const noexcept {
    return std::visit([](const auto& k) -> const std::vector<CMatrix>& { return k.weights; }, kind_);
  }

  /// Index of the first stored weight (lo for windowed, 0 for periodic).
  int first_index() const noexcept {
    if (const auto* w = std::get_if<Windowed>(&kind_)) return w->lo;
    return 0;
  }

  int last_index() const noexcept {
    return first_index() + static_cast<int>(stored().size()) - 1;
  }

  const CMatrix& at(int i) const {
    if (const auto* w = std::get_if<Windowed>(&kind_)) {
      if (i < w->lo || i > w->hi) return identity_;
      return w->weights[static_cast<std::size_t>(i - w->lo)];
    }
    const auto& ws = std::get<Periodic>(kind_).weights;
    const int p = static_cast<int>(ws.size());
    return ws[static_cast<std::size_t>(((i % p) + p) % p)];
  }

  /// sup_i ||S_i||, the max over the description (identity padding included).
  double sup_norm() const noexcept { return sup_norm_; }

 private:
  void validate() {
    if (dim_ < 1) throw Error(ErrorKind::InvalidArgument, "weight dimension must be positive");
    identity_ = wshift::identity(dim_);
    const auto& ws = stored();
    if (const auto* w = std::get_if<Windowed>(&kind_)) {
      if (w->hi - w->lo + 1 != static_cast<int>(ws.size())) {
        throw Error(ErrorKind::InvalidArgument, "windowed sequence: hi - lo + 1 must equal the weight count");
      }
    } else if (ws.empty()) {
      throw Error(ErrorKind::InvalidArgument, "periodic sequence needs at least one weight");
    }

    const bool padded = std::holds_alternative<Windowed>(kind_);
    double largest = padded ? 1.0 : 0.0;
    std::vector<RVector> svals;
    svals.reserve(ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) {
      require_square(ws[k], dim_, "weight");
      if (!is_finite(ws[k])) {
        throw Error(ErrorKind::InvariantError, "weight at position " + std::to_string(k) + " is not finite");
      }
      svals.push_back(singular_values(ws[k]));
      largest = std::max(largest, svals.back()(0));
    }
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const double smallest = svals[k](svals[k].size() - 1);
      if (!(smallest > kInvertibilityEps * largest)) {
        throw Error(ErrorKind::InvariantError,
                    "weight at index " + std::to_string(first_index() + static_cast<int>(k)) +
                        " is not invertible (smallest singular value " + std::to_string(smallest) +
                        " <= 1e-10 x " + std::to_string(largest) + ")");
      }
    }
    sup_norm_ = largest;
  }

  Eigen::Index dim_;
  Kind kind_;
  CMatrix identity_;
  double sup_norm_ = 0.0;
};

inline const CMatrix& weight_at(const WeightSequence& seq, int i) { return seq.at(i); }

/// S_{j+n} S_{j+n-1} ... S_{j+1}, highest index leftmost.
inline CMatrix forward_product(const WeightSequence& seq, int j, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "forward_product needs n >= 1");
  CMatrix acc = seq.at(j + 1);
  for (int t = j + 2; t <= j + n; ++t) acc = seq.at(t) * acc;
  return acc;
}

/// S*_{j-n+1} ... S*_j, the adjoint of forward_product(seq, j - n, n). This is
/// the (j - n, j) block of S^{*n}.
inline CMatrix backward_adjoint_product(const WeightSequence& seq, int j, int n) {
  return forward_product(seq, j - n, n).adjoint();
}

/// |S_{j+n} ... S_{j+1}|.
inline CMatrix modulus_product(const WeightSequence& seq, int j, int n) {
  return modulus(forward_product(seq, j, n));
}

/// |S*_{j-n+1} ... S*_j|.
inline CMatrix adjoint_modulus_product(const WeightSequence& seq, int j, int n) {
  return modulus(backward_adjoint_product(seq, j, n));
}

/// Weight sequence that maps every stored weight through f. Identity padding is
/// preserved, so f must send the identity to the identity.
template <typename F>
WeightSequence transform_weights(const WeightSequence& seq, F&& f) {
  std::vector<CMatrix> out;
  out.reserve(seq.stored().size());
  for (const auto& w : seq.stored()) out.push_back(f(w));
  if (seq.is_periodic()) return WeightSequence::periodic(seq.dim(), std::move(out));
  return WeightSequence(seq.dim(), Windowed{seq.first_index(), seq.last_index(), std::move(out)});
}

}  // namespace wshift
