#pragma once

#include <memory>
#include <vector>

#include "fockforge/hilbert.hpp"

namespace fockforge {

/// Matrix elements <n|D(beta)|m> of the displacement operator for real beta,
///
///   <n|D(beta)|m> = e^{-b^2/2} sqrt(m!/n!) beta^{n-m} L_m^{(n-m)}(b^2),  n >= m
///   <n|D(beta)|m> = (-1)^{m-n} <m|D(beta)|n>,                            n <= m
///
/// with b = |beta|. Entries are real; prefactors are accumulated in log space
/// with the sign of beta^q tracked separately, Laguerre values come from the
/// stable three-term recurrence along each diagonal.
class DisplacementMatrix {
  public:
    DisplacementMatrix(HilbertSpace space, double beta, std::vector<double> entries);

    const HilbertSpace& space() const { return space_; }
    int cutoff() const { return space_.cutoff(); }
    double beta() const { return beta_; }
    double at(int n, int m) const {
        return entries_[static_cast<size_t>(n) * cutoff() + m];
    }
    const std::vector<double>& entries() const { return entries_; }

    /// max |(D^T D - I)_{nm}| over the upper-left (cutoff-pad)^2 block,
    /// pad = ceil(8|beta| + 10). Truncation-safe unitarity measure.
    double unitarity_defect() const;
    int safe_block() const;

  private:
    HilbertSpace space_;
    double beta_;
    std::vector<double> entries_;  // row-major, real
};

/// Serial reference construction. Kept verbatim as the baseline the parallel
/// path is checked against.
DisplacementMatrix displacement_matrix_reference(double beta, const HilbertSpace& space);

/// Production construction; diagonals are built on a worker team when
/// threads != 1. Bitwise identical to the reference for any thread count.
DisplacementMatrix displacement_matrix(double beta, const HilbertSpace& space, int threads = 1);

/// Process-wide read-dominant cache keyed by (beta bits, cutoff).
std::shared_ptr<const DisplacementMatrix> cached_displacement(double beta,
                                                              const HilbertSpace& space);
void clear_displacement_cache();

/// Radial profile R_{q,p} = e^{-x/2} g^q sqrt(p!/(p+q)!) L_p^{(q)}(x) with
/// x = g^2, for p = 0..p_max. Building block shared by the displacement matrix
/// and the phase-space kernels (where g = |2 alpha| is a complex modulus).
void displacement_radial_row(int q, double g, int p_max, std::vector<double>& out);

}  // namespace fockforge
