#pragma once

#include <cmath>

#include "fockforge/errors.hpp"

namespace fockforge {

/// Truncated single-mode Fock space |0>..|cutoff-1>. Every state and operator
/// carries the cutoff of the space it was built on; mixing cutoffs is rejected.
class HilbertSpace {
  public:
    explicit HilbertSpace(int cutoff) : cutoff_(cutoff) {
        if (cutoff < 2) throw CutoffTooSmall("HilbertSpace cutoff must be >= 2");
    }

    int cutoff() const { return cutoff_; }

    friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
        return a.cutoff_ == b.cutoff_;
    }

  private:
    int cutoff_;
};

/// Smallest cutoff that keeps the Poisson tail of amplitude `a` below ~1e-10:
/// a^2 + 8a + 10.
inline int tail_safe_cutoff(double amplitude) {
    double a = std::abs(amplitude);
    return static_cast<int>(std::ceil(a * a + 8.0 * a + 10.0));
}

}  // namespace fockforge
