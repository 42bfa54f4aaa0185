#pragma once

#include "specband/core.hpp"
#include "specband/random.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace specband {

enum class Scheme { example21a, example21b, s1, s2, s3 };

std::string_view to_string(Scheme scheme) noexcept;  // ex21a, ex21b, s1, s2, s3
Scheme parse_scheme(std::string_view text);

struct SchemeConfig {
  Scheme scheme = Scheme::s1;
  int epochs = 500;     // N
  Index length = 1000;  // T
  int dim_min = 2;      // p_i ~ U{dim_min..dim_max}
  int dim_max = 30;
  double xi_lo = 0.8;
  double xi_hi = 0.98;
  double theta_pre = 4.0 * kPi / 25.0;
  double theta_post = 4.0 * kPi / 5.0;
  // Epoch ids run 1..N; epoch i is pre-change when i < changepoint.
  // Empty = N/2 for the schemes, 300 for Example 2.1.
  std::optional<int> changepoint;
  double rho = 0.4;   // Scheme 2 noise correlation
  int fixed_p = 30;   // Scheme 3 latent dimension
  bool truncate = true;  // Scheme 3: keep the first p_i mixed coordinates
  int burn_in = 500;
  std::uint64_t seed = 0;

  int effective_changepoint() const noexcept;
  void validate() const;
};

// f(w) = sd^2 / (2 pi |1 - phi1 e^{-iw} - phi2 e^{-2iw}|^2).
double ar2_true_spectrum(double phi1, double phi2, double noise_sd, double omega);

// True when both roots of 1 - phi1 z - phi2 z^2 lie outside the unit circle.
bool ar2_is_stationary(double phi1, double phi2) noexcept;

// p-variate X_t = phi1 X_{t-1} + phi2 X_{t-2} + e_t with e_t ~ N(0, noise_cov),
// zero initial state and `burn_in` discarded samples. The returned series is
// not demeaned.
EpochSeries simulate_ar2_epoch(int epoch_id, double phi1, double phi2,
                               const Eigen::MatrixXd& noise_cov, Index length, Rng& rng,
                               int burn_in = 500);

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, R diagonal
// made positive).
Eigen::MatrixXd random_orthogonal(Index p, Rng& rng);

// Toeplitz rho^|r-s|.
Eigen::MatrixXd toeplitz_covariance(Index p, double rho);

struct SimulatedEpoch {
  EpochSeries observed;
  std::optional<EpochSeries> latent;  // Scheme 3 only: Y before mixing
  double phi1 = 0.0;
  double phi2 = 0.0;
  double xi = 0.0;     // 0 for Example 2.1
  double theta = 0.0;  // 0 for Example 2.1
};

// Epoch i depends only on (config, i): its draws come from stream
// (seed, i), and the Scheme 3 mixing matrices from two fixed streams.
class SchemeGenerator {
 public:
  explicit SchemeGenerator(SchemeConfig config);

  const SchemeConfig& config() const noexcept { return config_; }
  SimulatedEpoch epoch(int epoch_id) const;

  const Eigen::MatrixXd& mixing_pre() const noexcept { return mixing_pre_; }
  const Eigen::MatrixXd& mixing_post() const noexcept { return mixing_post_; }

 private:
  SchemeConfig config_;
  Eigen::MatrixXd mixing_pre_;
  Eigen::MatrixXd mixing_post_;
};

std::vector<EpochSeries> generate_scheme(const SchemeConfig& config, unsigned threads = 1);

}  // namespace specband
