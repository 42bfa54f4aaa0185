#include "support.hpp"

#include <doctest.h>
#include <specband/core.hpp>

#include <fstream>

using namespace specband;
namespace ts = testsupport;

#define CHECK_KIND(expr, k)                       \
  do {                                            \
    try {                                         \
      (void)(expr);                               \
      FAIL("expected error " #k);                 \
    } catch (const Error& e) {                    \
      CHECK(e.kind() == ErrorKind::k);            \
    }                                             \
  } while (0)

TEST_CASE("epoch series validates shape and finiteness") {
  CHECK_KIND(EpochSeries(1, Eigen::MatrixXd::Zero(3, 2)), SeriesTooShort);
  CHECK_KIND(EpochSeries(1, Eigen::MatrixXd::Zero(10, 0)), InvalidArgument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(10, 2);
  bad(4, 1) = std::nan("");
  CHECK_KIND(EpochSeries(1, bad), NonFiniteValue);
  CHECK_KIND(EpochSeries(1, Eigen::MatrixXd::Ones(10, 2), -1.0), InvalidArgument);
}

TEST_CASE("demeaning removes column means and is idempotent") {
  Eigen::MatrixXd x = ts::white_noise(50, 3, 1);
  x.col(1).setConstant(5.0);
  const EpochSeries s(2, x);
  CHECK(s.demeaned());
  CHECK(s.data().col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.data().colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
  const EpochSeries again = s.demean();
  CHECK((again.data() - s.data()).cwiseAbs().maxCoeff() == 0.0);

  const EpochSeries raw(3, x, 1.0, false);
  CHECK_FALSE(raw.demeaned());
  CHECK((raw.demean().data() - s.data()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("band validation per unit") {
  CHECK_KIND(Band::radians(1.0, 0.5), InvalidBand);
  CHECK_KIND(Band::radians(-0.1, 0.5), InvalidBand);
  CHECK_KIND(Band::radians(0.0, 3.2), InvalidBand);
  CHECK_KIND(Band::cycles(0.1, 0.6), InvalidBand);
  CHECK_NOTHROW(Band::hertz(30, 600));
  CHECK_KIND(band_to_radians(Band::hertz(30, 600), 1000.0), NyquistExceeded);
}

TEST_CASE("band conversion") {
  const Band full = band_to_radians(Band::cycles(0.0, 0.5));
  CHECK(full.lo == 0.0);
  CHECK(full.hi == doctest::Approx(ts::kPi).epsilon(1e-15));
  CHECK(full.unit == FrequencyUnit::radians);

  const Band theta = band_to_radians(Band::hertz(4, 8), 1000.0);
  CHECK(theta.lo == doctest::Approx(2 * ts::kPi * 4 / 1000).epsilon(1e-15));
  CHECK(theta.hi == doctest::Approx(2 * ts::kPi * 8 / 1000).epsilon(1e-15));
  CHECK(theta.lo == doctest::Approx(0.0251).epsilon(2e-3));
  CHECK(theta.hi == doctest::Approx(0.0503).epsilon(2e-3));

  const Band b = band_to_radians(Band::cycles(0.08, 0.16));
  CHECK(b.lo == doctest::Approx(0.08 * 2 * ts::kPi).epsilon(1e-15));
  CHECK(b.hi == doctest::Approx(1.0053).epsilon(1e-4));
  CHECK(b.lo == doctest::Approx(0.5027).epsilon(1e-4));
}

TEST_CASE("round trip radians -> cycles -> radians") {
  for (double lo : {0.0, 0.1, 0.77, 2.0}) {
    const Band r = Band::radians(lo, lo + 1.0);
    const Band back = convert_band(convert_band(r, FrequencyUnit::cycles), FrequencyUnit::radians);
    CHECK(back.lo == doctest::Approx(r.lo).epsilon(1e-15));
    CHECK(back.hi == doctest::Approx(r.hi).epsilon(1e-15));
    const Band hz = convert_band(r, FrequencyUnit::hertz, 250.0);
    const Band back2 = convert_band(hz, FrequencyUnit::radians, 250.0);
    CHECK(back2.hi == doctest::Approx(r.hi).epsilon(1e-15));
  }
}

TEST_CASE("frequency grid matches FFT bin order") {
  for (Index t : {7, 8, 1000, 1001}) {
    const FrequencyGrid g(t);
    CHECK(g.size() == t);
    CHECK(g.max_harmonic() - g.min_harmonic() + 1 == t);
    for (Index k = 0; k < t; ++k) {
      const Index j = g.harmonic(k);
      CHECK(g.bin(j) == k);
      // e^{i w_j} agrees with the FFT bin frequency 2 pi k / T
      const double fft_w = 2 * ts::kPi * static_cast<double>(k) / static_cast<double>(t);
      CHECK(std::abs(std::remainder(g.omega(k) - fft_w, 2 * ts::kPi)) < 1e-12);
      if (j != 0 && -j >= g.min_harmonic()) CHECK(g.harmonic(g.mirror(k)) == -j);
    }
  }
}

TEST_CASE("band harmonics are half-open and snap to the grid") {
  const FrequencyGrid g(1000);
  const auto [a, b] = g.band_harmonics(band_to_radians(Band::cycles(0.08, 0.16)));
  CHECK(a == 81);
  CHECK(b == 160);
  const auto [c, d] = g.band_harmonics(band_to_radians(Band::cycles(0.0, 0.08)));
  CHECK(c == 1);
  CHECK(d == 80);
  const auto [e, f] = g.band_harmonics(Band::radians(0.0, ts::kPi));
  CHECK(e == 1);
  CHECK(f == 500);
  const auto [x, y] = g.band_harmonics(Band::radians(0.0001, 0.0002));
  CHECK(x > y);
}

TEST_CASE("kernels") {
  CHECK_KIND(Kernel::bartlett_priestley(0.0), InvalidKernel);
  CHECK_KIND(Kernel::daniell(-1), InvalidKernel);
  CHECK_KIND(parse_kernel_type("gauss"), InvalidKernel);
  CHECK(parse_kernel_type("bp") == KernelType::bartlett_priestley);

  const Kernel bp = Kernel::with_default_bandwidth(KernelType::bartlett_priestley, 1000);
  CHECK(bp.bandwidth(1000) == doctest::Approx(std::pow(1000.0, -0.4)));
  const Kernel dn = Kernel::with_default_bandwidth(KernelType::daniell, 1000);
  CHECK(dn.span() == 32);
  CHECK(dn.bandwidth(1000) == doctest::Approx(65.0 / 1000.0));

  // Both base densities integrate to one and vanish outside [-pi, pi].
  for (const Kernel& k : {bp, dn}) {
    CHECK(ts::trapezoid([&](double v) { return k.density(v); }, -ts::kPi, ts::kPi, 20001) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(k.density(3.2) == 0.0);
    CHECK(k.density(-0.7) == k.density(0.7));
  }
  CHECK(bp.density(0.0) == doctest::Approx(3.0 / (4 * ts::kPi)));
}

TEST_CASE("csv parsing errors") {
  const auto dir = ts::scratch_dir("csv");
  {
    std::ofstream(dir / "nan.csv") << "1,2\n3,NaN\n4,5\n6,7\n";
    std::ofstream(dir / "text.csv") << "1,2\n3,abc\n";
    std::ofstream(dir / "ragged.csv") << "1,2\n3\n";
    std::ofstream(dir / "quoted.csv") << "h1,h2\n\"1.5\",+2\n3,4e0\n";
  }
  try {
    read_numeric_csv(dir / "nan.csv");
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteValue);
    const std::string msg = e.what();
    CHECK(msg.find("row=2") != std::string::npos);
    CHECK(msg.find("col=2") != std::string::npos);
  }
  CHECK_KIND(read_numeric_csv(dir / "text.csv"), ParseError);
  CHECK_KIND(read_numeric_csv(dir / "ragged.csv"), InconsistentRows);
  CHECK_KIND(read_numeric_csv(dir / "absent.csv"), MissingFile);
  const Eigen::MatrixXd q = read_numeric_csv(dir / "quoted.csv", true);
  CHECK(q.rows() == 2);
  CHECK(q(0, 0) == 1.5);
  CHECK(q(0, 1) == 2.0);
  CHECK(q(1, 1) == 4.0);
}

TEST_CASE("dataset round trip with varying dimension") {
  const auto dir = ts::scratch_dir("dataset");
  std::vector<EpochSeries> epochs;
  epochs.emplace_back(1, ts::white_noise(1000, 4, 1), 1.0, false);
  epochs.emplace_back(2, ts::white_noise(1000, 7, 2), 1.0, false);
  epochs.emplace_back(3, ts::white_noise(1000, 4, 3), 1.0, false);
  save_epoch_dataset(dir, epochs, 1000.0);
  const EpochDataset data = load_epoch_dataset(dir / "manifest.json");
  REQUIRE(data.epochs.size() == 3);
  CHECK(data.sampling_rate_hz == 1000.0);
  CHECK(data.epochs[0].dimension() == 4);
  CHECK(data.epochs[1].dimension() == 7);
  CHECK(data.epochs[2].dimension() == 4);
  CHECK(data.epochs[1].epoch_id() == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(data.epochs[i].demeaned());
    const Eigen::MatrixXd expect = ts::demeaned(epochs[i].data());
    CHECK((data.epochs[i].data() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("manifest problems") {
  const auto dir = ts::scratch_dir("manifest");
  CHECK_KIND(load_epoch_dataset(dir / "none.json"), MissingFile);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_KIND(load_epoch_dataset(dir / "bad.json"), ParseError);
  std::ofstream(dir / "m.json")
      << R"({"sampling_rate_hz": 1, "epochs": [{"id": 1, "path": "gone.csv"}]})";
  CHECK_KIND(load_epoch_dataset(dir / "m.json"), MissingFile);
  std::ofstream(dir / "short.csv") << "1\n2\n3\n";
  std::ofstream(dir / "s.json")
      << R"({"sampling_rate_hz": 1, "epochs": [{"id": 1, "path": "short.csv"}]})";
  CHECK_KIND(load_epoch_dataset(dir / "s.json"), SeriesTooShort);
}
