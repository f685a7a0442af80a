#pragma once

#include <compare>
#include <cstdlib>
#include <string>

#include "pibreak/errors.hpp"

namespace pibreak {

/// Angular momentum quantum number stored as twice its value, so that
/// j = 0, 1/2, 1, ... are exact. Magnetic numbers travel alongside as plain
/// `int two_m` values.
class SpinQuantum {
 public:
  constexpr SpinQuantum() = default;

  static constexpr SpinQuantum from_twice(int twice) {
    if (twice < 0) throw DomainError("SpinQuantum: negative 2j");
    SpinQuantum s;
    s.twice_ = twice;
    return s;
  }

  /// Spin of a symmetric ensemble of `n` spin-1/2 particles, j = n/2.
  static constexpr SpinQuantum from_spin_count(int n) { return from_twice(n); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  /// Dimension 2j+1 of the multiplet.
  constexpr int dim() const { return twice_ + 1; }

  /// True when `two_m` is an allowed projection of this multiplet.
  constexpr bool admits(int two_m) const {
    return two_m >= -twice_ && two_m <= twice_ && ((twice_ - two_m) % 2 == 0);
  }

  /// Row index of |j, m> in the descending-m ordering used throughout.
  constexpr int index_of(int two_m) const { return (twice_ - two_m) / 2; }
  constexpr int two_m_at(int index) const { return twice_ - 2 * index; }

  constexpr auto operator<=>(const SpinQuantum&) const = default;

  std::string str() const {
    return twice_ % 2 == 0 ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

inline constexpr SpinQuantum half_spin = SpinQuantum::from_twice(1);

}  // namespace pibreak
