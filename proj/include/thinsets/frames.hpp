#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "thinsets/norms.hpp"

namespace thinsets {

enum class FrameSpace { coordinate_sup, exp_psi2 };

/// The n-tuple v_1..v_n entering Z = ||sum X_j v_j||. Two ambient spaces:
/// R^m with the sup norm (explicit coordinate vectors) or L^{Psi_2} with
/// v_j = e_{k_j} for distinct frequencies k_j.
struct BanachFrame {
  FrameSpace space = FrameSpace::coordinate_sup;
  std::vector<std::vector<double>> vectors;  // coordinate_sup
  std::vector<std::int64_t> frequencies;     // exp_psi2
  OrliczConfig orlicz;

  static BanachFrame coordinate(std::vector<std::vector<double>> vecs) {
    if (vecs.empty()) throw std::invalid_argument("BanachFrame: need n >= 1 vectors");
    const std::size_t dim = vecs.front().size();
    if (dim == 0) throw std::invalid_argument("BanachFrame: zero-dimensional vectors");
    for (const auto& v : vecs)
      if (v.size() != dim) throw std::invalid_argument("BanachFrame: inconsistent dimensions");
    BanachFrame f;
    f.space = FrameSpace::coordinate_sup;
    f.vectors = std::move(vecs);
    return f;
  }

  static BanachFrame exponential(std::vector<std::int64_t> freqs, OrliczConfig cfg = {}) {
    if (freqs.empty()) throw std::invalid_argument("BanachFrame: need n >= 1 frequencies");
    std::set<std::int64_t> distinct(freqs.begin(), freqs.end());
    if (distinct.size() != freqs.size())
      throw std::invalid_argument("BanachFrame: frequencies must be distinct");
    BanachFrame f;
    f.space = FrameSpace::exp_psi2;
    f.frequencies = std::move(freqs);
    f.orlicz = cfg;
    return f;
  }

  std::size_t size() const {
    return space == FrameSpace::coordinate_sup ? vectors.size() : frequencies.size();
  }

  std::size_t dimension() const {
    return space == FrameSpace::coordinate_sup ? vectors.front().size() : 0;
  }

  /// Ambient-space norm of v_j: sup coordinate for R^m, 1/sqrt(ln 2) for e_k.
  double vector_norm(std::size_t j) const {
    if (space == FrameSpace::coordinate_sup) {
      double m = 0.0;
      for (double x : vectors[j]) m = std::max(m, std::abs(x));
      return m;
    }
    return 1.0 / std::sqrt(detail::kLn2);
  }

  /// Strong l2 norm (sum ||v_j||^2)^{1/2}, the denominator of the classical
  /// bounded-increment tail bound.
  double strong_l2() const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += vector_norm(j) * vector_norm(j);
    return std::sqrt(s);
  }
};

}  // namespace thinsets
