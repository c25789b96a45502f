#pragma once

#include <string>
#include <vector>

#include "fockforge/protocol.hpp"

namespace fockforge {

/// One reference parameter set: target N, step count M, the step parameters
/// and the fidelity they reach (alpha = sqrt(N)).
struct ReferenceRow {
    int target_n = 0;
    int m_steps = 0;
    std::vector<double> beta;
    std::vector<double> chi_over_pi;
    double fidelity = 0.0;

    PulseSequence sequence() const;
};

/// Bundled reference parameters (data/reference_params.json). The file is the
/// interchange format; `optimize` runs can regenerate rows on request.
class ReferenceTable {
  public:
    static ReferenceTable load(const std::string& path);
    /// FOCKFORGE_TABLE env override, else the path baked in at build time.
    static const ReferenceTable& bundled();

    const std::vector<ReferenceRow>& rows() const { return rows_; }
    /// Throws MissingParameters when no row covers (N, M).
    const ReferenceRow& find(int target_n, int m_steps) const;
    PulseSequence sequence_for(int target_n, int m_steps) const;
    std::vector<int> targets_for_m(int m_steps) const;

  private:
    std::vector<ReferenceRow> rows_;
};

}  // namespace fockforge
