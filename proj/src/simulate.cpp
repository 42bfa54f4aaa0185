#include "specband/simulate.hpp"

#include "specband/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <complex>

namespace specband {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::example21a: return "ex21a";
    case Scheme::example21b: return "ex21b";
    case Scheme::s1: return "s1";
    case Scheme::s2: return "s2";
    case Scheme::s3: return "s3";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::example21a, Scheme::example21b, Scheme::s1, Scheme::s2, Scheme::s3}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown scheme '" + std::string(text) + "'");
}

namespace {

bool is_example(Scheme s) { return s == Scheme::example21a || s == Scheme::example21b; }

// Stream ids reserved for the Scheme 3 mixing matrices; epoch ids are >= 1.
constexpr std::uint64_t kMixingStream = 0;

}  // namespace

int SchemeConfig::effective_changepoint() const noexcept {
  if (changepoint) return *changepoint;
  return is_example(scheme) ? 300 : epochs / 2;
}

void SchemeConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (epochs < 1) fail("epoch count must be >= 1");
  if (length < EpochSeries::kMinLength) fail("epoch length must be >= 4");
  if (burn_in < 0) fail("burn-in must be >= 0");
  if (!is_example(scheme)) {
    if (dim_min < 1 || dim_max < dim_min) fail("dimension range must satisfy 1 <= min <= max");
    if (!(xi_lo > 0.0 && xi_lo <= xi_hi && xi_hi < 1.0)) fail("xi range must lie in (0, 1)");
    if (!std::isfinite(theta_pre) || !std::isfinite(theta_post)) fail("theta must be finite");
  }
  if (scheme == Scheme::s2 && !(rho > -1.0 && rho < 1.0)) fail("rho must lie in (-1, 1)");
  if (scheme == Scheme::s3) {
    if (fixed_p < 1) fail("fixed_p must be >= 1");
    if (truncate && dim_max > fixed_p) fail("dimension range exceeds fixed_p for scheme s3");
  }
}

bool ar2_is_stationary(double phi1, double phi2) noexcept {
  return std::abs(phi2) < 1.0 && phi1 + phi2 < 1.0 && phi2 - phi1 < 1.0;
}

double ar2_true_spectrum(double phi1, double phi2, double noise_sd, double omega) {
  if (!ar2_is_stationary(phi1, phi2)) {
    throw Error(ErrorKind::NonstationaryCoefficients,
                "AR(2) coefficients (" + std::to_string(phi1) + ", " + std::to_string(phi2) +
                    ") are not stationary");
  }
  const std::complex<double> z = std::polar(1.0, -omega);
  const double denom = std::norm(1.0 - phi1 * z - phi2 * z * z);
  return noise_sd * noise_sd / (kTwoPi * denom);
}

Eigen::MatrixXd toeplitz_covariance(Index p, double rho) {
  Eigen::MatrixXd out(p, p);
  for (Index r = 0; r < p; ++r) {
    for (Index s = 0; s < p; ++s) out(r, s) = std::pow(rho, static_cast<double>(std::abs(r - s)));
  }
  return out;
}

namespace {

// F with F F^T = cov, from a pivoted LDL^T so singular PSD matrices work.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  const Index p = cov.rows();
  if (cov.cols() != p) throw Error(ErrorKind::NotPositiveSemidefinite, "noise covariance is not square");
  if (!cov.allFinite()) throw Error(ErrorKind::NotPositiveSemidefinite, "noise covariance is not finite");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::NotPositiveSemidefinite, "noise covariance is not symmetric");
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveSemidefinite, "noise covariance factorization failed");
  }
  Eigen::VectorXd dvec = ldlt.vectorD();
  for (Index i = 0; i < p; ++i) {
    if (dvec(i) < -1e-12 * scale) {
      throw Error(ErrorKind::NotPositiveSemidefinite,
                  "noise covariance has negative pivot " + std::to_string(dvec(i)));
    }
    dvec(i) = std::sqrt(std::max(0.0, dvec(i)));
  }
  Eigen::MatrixXd l = ldlt.matrixL();
  Eigen::MatrixXd factor = l * dvec.asDiagonal();
  // cov = P^T L D L^T P
  return ldlt.transpositionsP().transpose() * factor;
}

}  // namespace

EpochSeries simulate_ar2_epoch(int epoch_id, double phi1, double phi2,
                               const Eigen::MatrixXd& noise_cov, Index length, Rng& rng,
                               int burn_in) {
  if (!ar2_is_stationary(phi1, phi2)) {
    throw Error(ErrorKind::NonstationaryCoefficients,
                "AR(2) coefficients (" + std::to_string(phi1) + ", " + std::to_string(phi2) +
                    ") are not stationary");
  }
  const Eigen::MatrixXd factor = covariance_factor(noise_cov);
  const Index p = noise_cov.rows();
  const Index total = length + burn_in;

  // Columns are time points so the recursion walks contiguous memory.
  Eigen::MatrixXd z(p, total);
  for (Index t = 0; t < total; ++t) {
    for (Index r = 0; r < p; ++r) z(r, t) = standard_normal(rng);
  }
  Eigen::MatrixXd x = factor * z;
  for (Index t = 1; t < total; ++t) {
    x.col(t) += phi1 * x.col(t - 1);
    if (t >= 2) x.col(t) += phi2 * x.col(t - 2);
  }
  return EpochSeries(epoch_id, x.rightCols(length).transpose(), 1.0, false);
}

Eigen::MatrixXd random_orthogonal(Index p, Rng& rng) {
  Eigen::MatrixXd g(p, p);
  for (Index c = 0; c < p; ++c) {
    for (Index r = 0; r < p; ++r) g(r, c) = standard_normal(rng);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < p; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

SchemeGenerator::SchemeGenerator(SchemeConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.scheme == Scheme::s3) {
    Rng pre = make_stream(config_.seed, kMixingStream, 1);
    Rng post = make_stream(config_.seed, kMixingStream, 2);
    mixing_pre_ = random_orthogonal(config_.fixed_p, pre);
    mixing_post_ = random_orthogonal(config_.fixed_p, post);
  }
}

SimulatedEpoch SchemeGenerator::epoch(int epoch_id) const {
  const SchemeConfig& c = config_;
  Rng rng = make_stream(c.seed, static_cast<std::uint64_t>(epoch_id), 0);
  const bool pre = epoch_id < c.effective_changepoint();

  if (is_example(c.scheme)) {
    double phi1 = 0.25;
    double phi2 = -0.75;
    if (pre) {
      phi1 = c.scheme == Scheme::example21a ? 0.9 : -0.9;
      phi2 = 0.0;
    }
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(1, 1);
    return SimulatedEpoch{simulate_ar2_epoch(epoch_id, phi1, phi2, cov, c.length, rng, c.burn_in),
                          std::nullopt, phi1, phi2, 0.0, 0.0};
  }

  const Index p_i = uniform_index(rng, c.dim_min, c.dim_max);
  const double xi = uniform_real(rng, c.xi_lo, c.xi_hi);
  const double theta = pre ? c.theta_pre : c.theta_post;
  const double phi1 = 2.0 * xi * std::cos(theta);
  const double phi2 = -xi * xi;

  switch (c.scheme) {
    case Scheme::s1: {
      const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(p_i, p_i);
      return SimulatedEpoch{simulate_ar2_epoch(epoch_id, phi1, phi2, cov, c.length, rng, c.burn_in),
                            std::nullopt, phi1, phi2, xi, theta};
    }
    case Scheme::s2: {
      const Eigen::MatrixXd cov = toeplitz_covariance(p_i, c.rho);
      return SimulatedEpoch{simulate_ar2_epoch(epoch_id, phi1, phi2, cov, c.length, rng, c.burn_in),
                            std::nullopt, phi1, phi2, xi, theta};
    }
    default: break;
  }

  // Scheme 3
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(c.fixed_p, c.fixed_p);
  EpochSeries latent = simulate_ar2_epoch(epoch_id, phi1, phi2, cov, c.length, rng, c.burn_in);
  const Eigen::MatrixXd& mixing = pre ? mixing_pre_ : mixing_post_;
  Eigen::MatrixXd mixed = latent.data() * mixing.transpose();  // rows are X_t^T = (A Y_t)^T
  const Index keep = c.truncate ? p_i : static_cast<Index>(c.fixed_p);
  EpochSeries observed(epoch_id, mixed.leftCols(keep), 1.0, false);
  return SimulatedEpoch{std::move(observed), std::move(latent), phi1, phi2, xi, theta};
}

std::vector<EpochSeries> generate_scheme(const SchemeConfig& config, unsigned threads) {
  const SchemeGenerator gen(config);
  std::vector<std::optional<EpochSeries>> slots(static_cast<std::size_t>(config.epochs));
  parallel_for(slots.size(), threads, [&](std::size_t i) {
    slots[i] = gen.epoch(static_cast<int>(i) + 1).observed;
  });
  std::vector<EpochSeries> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace specband
