#pragma once

#include "specband/spectral.hpp"

namespace specband {

struct CoherenceSummary {
  int epoch_id = 0;
  Band band;
  double mean_offdiag_coherence = 0.0;
};

// |f_rs|^2 / (f_rr f_ss) at one bin.
double squared_coherence(const SpectralMatrices& estimate, Index bin, Index r, Index s);

// Mean of the squared coherence over grid frequencies in (lo, hi] and over
// unordered pairs r < s, equally weighted.
CoherenceSummary squared_coherence_band(const SpectralMatrices& estimate,
                                        const Band& band_radians, int epoch_id = 0);

// Sigma^{-1/2} X_t with Sigma the lag-0 sample covariance (divisor T) and
// the symmetric inverse square root from an eigendecomposition. The output is
// demeaned.
EpochSeries prewhiten(const EpochSeries& series);

}  // namespace specband
