#include "support.hpp"

#include <doctest.h>
#include <specband/fsratio.hpp>
#include <specband/simulate.hpp>
#include <specband/spectral.hpp>

#include <Eigen/Eigenvalues>

#include <fstream>

using namespace specband;
namespace ts = testsupport;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("fft matches the direct sum") {
  for (Index t : {5, 16, 33, 64}) {
    for (Index d : {1, 3}) {
      const EpochSeries s(1, ts::white_noise(t, d, 100 + t + d));
      const DftResult fft = compute_dft(s);
      const Eigen::MatrixXcd direct = ts::direct_dft(s.data());
      CHECK(max_abs_diff(fft.values, direct) < 1e-10);
    }
  }
}

TEST_CASE("zero series transforms to zero") {
  const EpochSeries s(1, Eigen::MatrixXd::Zero(32, 2));
  CHECK(compute_dft(s).values.cwiseAbs().maxCoeff() == 0.0);
  const PeriodogramSet p = compute_periodogram(compute_dft(s));
  for (Index k = 0; k < p.size(); ++k) CHECK(p.at(k).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cosine at a Fourier frequency concentrates at +-w_k") {
  const Index t = 256;
  const Index k0 = 19;
  Eigen::MatrixXd x(t, 1);
  for (Index s = 0; s < t; ++s) x(s, 0) = std::cos(2 * ts::kPi * k0 * (s + 1) / double(t));
  const EpochSeries series(1, x);
  const DftResult dft = compute_dft(series);
  const Eigen::MatrixXcd direct = ts::direct_dft(series.data());
  double total = 0.0;
  for (Index k = 0; k < t; ++k) total += std::norm(direct(k, 0));
  const double peak = std::norm(direct(k0, 0)) + std::norm(direct(t - k0, 0));
  CHECK(peak / total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::norm(dft.values(k0, 0)) == doctest::Approx(std::norm(direct(k0, 0))).epsilon(1e-10));
  CHECK(std::norm(dft.values(k0 + 1, 0)) < 1e-20);
}

TEST_CASE("Parseval") {
  const EpochSeries s(1, ts::white_noise(777, 4, 5));
  const DftResult dft = compute_dft(s);
  const double lhs = dft.values.squaredNorm();
  const double rhs = s.data().squaredNorm() / (2 * ts::kPi);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("periodogram is Hermitian, PSD, rank one, conjugate symmetric") {
  const EpochSeries s(1, ts::white_noise(128, 4, 6));
  const DftResult dft = compute_dft(s);
  const PeriodogramSet p = compute_periodogram(dft);
  const FrequencyGrid& g = p.grid();
  for (Index k = 0; k < p.size(); ++k) {
    const Eigen::MatrixXcd& m = p.at(k);
    CHECK(max_abs_diff(m, m.adjoint()) < 1e-14);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
    const Eigen::VectorXd ev = eig.eigenvalues();
    CHECK(ev.minCoeff() > -1e-10);
    CHECK(ev(ev.size() - 1) == doctest::Approx(dft.values.row(k).squaredNorm()).epsilon(1e-10));
    for (Index i = 0; i + 1 < ev.size(); ++i) CHECK(std::abs(ev(i)) < 1e-10);
    CHECK(max_abs_diff(p.at(g.mirror(k)), m.conjugate()) < 1e-14);
  }
}

TEST_CASE("white-noise periodogram averages to 1/(2 pi)") {
  const EpochSeries s(1, ts::white_noise(4096, 1, 7));
  const PeriodogramSet p = compute_periodogram(compute_dft(s));
  double sum = 0.0;
  for (Index k = 0; k < p.size(); ++k) sum += p.at(k)(0, 0).real();
  CHECK(sum / p.size() == doctest::Approx(1 / (2 * ts::kPi)).epsilon(0.05));
}

TEST_CASE("smoothing weights") {
  const auto w = smoothing_weights(Kernel::daniell(3), 100);
  double sum = 0.0;
  int nonzero = 0;
  for (double v : w) {
    sum += v;
    nonzero += v > 0.0;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(nonzero == 7);
  CHECK(w[0] == doctest::Approx(1.0 / 7));
  CHECK(w[97] == doctest::Approx(1.0 / 7));

  const auto b = smoothing_weights(Kernel::bartlett_priestley(0.2), 1000);
  double bsum = 0.0;
  for (double v : b) bsum += v;
  CHECK(bsum == doctest::Approx(1.0).epsilon(1e-12));
  // renormalised samples of K_h(2 pi l / T)
  const Kernel k = Kernel::bartlett_priestley(0.2);
  const double ratio = b[10] / b[0];
  CHECK(ratio == doctest::Approx(k.density(2 * ts::kPi * 10 / 1000 / 0.2) / k.density(0.0)));
  CHECK(b[5] == doctest::Approx(b[995]));
}

TEST_CASE("bandwidth too small for Bartlett-Priestley") {
  const EpochSeries s(1, ts::white_noise(64, 1, 8));
  try {
    estimate_spectral_matrix(s, Kernel::bartlett_priestley(0.01));
    FAIL("expected BandwidthTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BandwidthTooSmall);
  }
}

TEST_CASE("Daniell m = 0 reproduces the periodogram") {
  const EpochSeries s(1, ts::white_noise(100, 3, 9));
  const PeriodogramSet p = compute_periodogram(compute_dft(s));
  const SpectralMatrixEstimate f = smooth_spectral_matrix(p, Kernel::daniell(0));
  for (Index k = 0; k < p.size(); ++k) CHECK(max_abs_diff(f.at(k), p.at(k)) < 1e-15);
}

TEST_CASE("smoothed estimate equals a brute-force circular average") {
  const Index t = 90;
  const EpochSeries s(1, ts::white_noise(t, 3, 10));
  const PeriodogramSet p = compute_periodogram(compute_dft(s));
  for (const Kernel& k : {Kernel::daniell(4), Kernel::bartlett_priestley(0.3)}) {
    const SpectralMatrixEstimate f = smooth_spectral_matrix(p, k);
    // oracle weights straight from the kernel definition
    std::vector<double> w(t, 0.0);
    double total = 0.0;
    for (Index l = -t / 2; l < t - t / 2; ++l) {
      double v = 0.0;
      if (k.type() == KernelType::daniell) {
        v = std::abs(l) <= k.span() ? 1.0 : 0.0;
      } else {
        const double h = k.bandwidth(t);
        const double x = 2 * ts::kPi * l / double(t) / h;
        v = std::abs(x) <= ts::kPi ? 1 - (x / ts::kPi) * (x / ts::kPi) : 0.0;
      }
      w[static_cast<std::size_t>((l + t) % t)] += v;
      total += v;
    }
    for (Index j = 0; j < t; ++j) {
      Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
      for (Index l = 0; l < t; ++l) expect += w[l] / total * p.at((j + l) % t);
      CHECK(max_abs_diff(f.at(j), expect) < 1e-12);
    }
  }
}

TEST_CASE("smoothed estimate invariants") {
  const EpochSeries s(1, ts::ar1(1000, 4, 0.6, 11));
  for (const Kernel& k : {Kernel::daniell(10), Kernel::bartlett_priestley(0.1)}) {
    const SpectralMatrixEstimate f = estimate_spectral_matrix(s, k);
    const PeriodogramSet p = compute_periodogram(compute_dft(s));
    const FrequencyGrid& g = f.grid();
    double tr_f = 0.0;
    double tr_p = 0.0;
    for (Index j = 0; j < f.size(); ++j) {
      const Eigen::MatrixXcd& m = f.at(j);
      CHECK(max_abs_diff(m, m.adjoint()) < 1e-12);
      for (Index r = 0; r < 4; ++r) {
        CHECK(m(r, r).imag() == 0.0);
        CHECK(m(r, r).real() >= 0.0);
      }
      CHECK(max_abs_diff(f.at(g.mirror(j)), m.conjugate()) < 1e-12);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
      CHECK(eig.eigenvalues().minCoeff() > -1e-10);
      tr_f += m.trace().real();
      tr_p += p.at(j).trace().real();
    }
    CHECK(tr_f == doctest::Approx(tr_p).epsilon(0.02));
  }
}

TEST_CASE("white noise d = 2, Daniell m = 64") {
  const EpochSeries s(1, ts::white_noise(4096, 2, 12));
  const SpectralMatrixEstimate f = estimate_spectral_matrix(s, Kernel::daniell(64));
  double diag = 0.0;
  double off = 0.0;
  for (Index j = 0; j < f.size(); ++j) {
    diag += 0.5 * (f.at(j)(0, 0).real() + f.at(j)(1, 1).real());
    off += std::abs(f.at(j)(0, 1));
  }
  diag /= f.size();
  off /= f.size();
  CHECK(diag == doctest::Approx(1 / (2 * ts::kPi)).epsilon(0.10));
  CHECK(off < 0.2 * diag);
}

TEST_CASE("AR(2) peak location") {
  const double xi = 0.9;
  const double theta = 4 * ts::kPi / 25;
  const double phi1 = 2 * xi * std::cos(theta);
  const double phi2 = -xi * xi;
  double best_w = 0.0;
  double best = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double w = ts::kPi * i / 10000.0;
    const double v = ts::ar_spectrum(phi1, phi2, w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  const EpochSeries s(1, ts::ar2(1000, 3, phi1, phi2, 13));
  const SpectralMatrixEstimate f =
      estimate_spectral_matrix(s, Kernel::with_default_bandwidth(KernelType::daniell, 1000));
  Index arg = 1;
  for (Index j = 1; j <= f.grid().max_harmonic(); ++j) {
    if (f.at(f.grid().bin(j)).trace().real() > f.at(f.grid().bin(arg)).trace().real()) arg = j;
  }
  CHECK(std::abs(f.grid().spacing() * arg - best_w) < 0.1);
}

TEST_CASE("spectrum csv dump") {
  const auto dir = ts::scratch_dir("spectrum");
  const EpochSeries s(1, ts::white_noise(8, 2, 14));
  write_spectrum_csv(dir / "f.csv", estimate_spectral_matrix(s, Kernel::daniell(1)));
  std::ifstream in(dir / "f.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "omega,row,col,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8 * 4);
}
