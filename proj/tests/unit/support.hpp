#pragma once

// Test-side oracles. Nothing here calls into the library's numerics.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

constexpr double kPi = 3.14159265358979323846;

inline Eigen::MatrixXd white_noise(Eigen::Index t, Eigen::Index d, unsigned long long seed,
                                   double sd = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, sd);
  Eigen::MatrixXd x(t, d);
  for (Eigen::Index r = 0; r < t; ++r)
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = n(gen);
  return x;
}

// Independent AR(2) recursion per column, 500 burn-in.
inline Eigen::MatrixXd ar2(Eigen::Index t, Eigen::Index d, double phi1, double phi2,
                           unsigned long long seed) {
  const Eigen::Index burn = 500;
  Eigen::MatrixXd e = white_noise(t + burn, d, seed);
  for (Eigen::Index r = 1; r < t + burn; ++r) {
    e.row(r) += phi1 * e.row(r - 1);
    if (r >= 2) e.row(r) += phi2 * e.row(r - 2);
  }
  return e.bottomRows(t);
}

inline Eigen::MatrixXd ar1(Eigen::Index t, Eigen::Index d, double phi, unsigned long long seed) {
  return ar2(t, d, phi, 0.0, seed);
}

// sd^2 / (2 pi |1 - phi1 e^{-iw} - phi2 e^{-2iw}|^2), written out in reals.
inline double ar_spectrum(double phi1, double phi2, double w, double sd = 1.0) {
  const double re = 1.0 - phi1 * std::cos(w) - phi2 * std::cos(2 * w);
  const double im = phi1 * std::sin(w) + phi2 * std::sin(2 * w);
  return sd * sd / (2 * kPi * (re * re + im * im));
}

template <class F>
double trapezoid(F&& f, double a, double b, int n = 2000) {
  const double h = (b - a) / (n - 1);
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n - 1; ++i) s += f(a + i * h);
  return s * h;
}

// J(w_k) = (2 pi T)^-1/2 sum_{t=1..T} x_t e^{-i t w_k}, k = 0..T-1.
inline Eigen::MatrixXcd direct_dft(const Eigen::MatrixXd& x) {
  const Eigen::Index t = x.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(t, x.cols());
  const double scale = 1.0 / std::sqrt(2 * kPi * static_cast<double>(t));
  for (Eigen::Index k = 0; k < t; ++k) {
    const double w = 2 * kPi * static_cast<double>(k) / static_cast<double>(t);
    for (Eigen::Index s = 0; s < t; ++s) {
      const std::complex<double> ph = std::polar(1.0, -w * static_cast<double>(s + 1));
      for (Eigen::Index c = 0; c < x.cols(); ++c) out(k, c) += x(s, c) * ph;
    }
  }
  return out * scale;
}

inline Eigen::MatrixXd demeaned(Eigen::MatrixXd x) {
  x.rowwise() -= x.colwise().mean();
  return x;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("specband_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
