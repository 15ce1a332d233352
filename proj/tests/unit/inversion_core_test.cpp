#include "mdat/inversion_core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mdat/metrics.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

namespace mdat {
namespace {

std::vector<double> random_energies(std::mt19937_64& rng, std::size_t bands) {
  std::lognormal_distribution<double> lognormal(0.0, 1.5);
  std::vector<double> e(bands);
  for (double& v : e) v = lognormal(rng);
  return e;
}

TEST(ThetaFromV2, Examples) {
  const std::vector<double> e{4.0, 4.0, 4.0, 0.0};
  const std::vector<double> ec{4.0, 0.0, 1.0, 0.0};
  const BandTheta t = theta_from_v2(e, ec);
  EXPECT_EQ(t.theta[0], 1.0);
  EXPECT_EQ(t.theta[1], 0.0);
  EXPECT_EQ(t.theta[2], 0.25);
  EXPECT_FALSE(t.active[3]);
  EXPECT_TRUE(t.active[2]);
  EXPECT_THROW(theta_from_v2(e, std::vector<double>(2)), Error);
}

TEST(QMatrix, RowStochasticAndDegenerate) {
  std::mt19937_64 rng(61);
  for (int rate : {16000, 44100}) {
    const SpreadingMatrix s(table_for(rate));
    const std::size_t bands = static_cast<std::size_t>(s.size()) + 1;
    const QMatrix q = q_matrix(random_energies(rng, bands), s);
    for (int i = 0; i < s.size(); ++i) {
      EXPECT_TRUE(q.row_active[static_cast<std::size_t>(i)]);
      EXPECT_NEAR(q.q.row(i).sum(), 1.0, 1e-12);
      EXPECT_GE(q.q.row(i).minCoeff(), 0.0);
    }
    const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(s.size(), 0.37);
    EXPECT_LT((q.q * gamma - gamma).cwiseAbs().maxCoeff(), 1e-12);

    std::vector<double> single(bands, 0.0);
    single[7] = 2.5;
    const QMatrix d = q_matrix(single, s);
    for (int i = 0; i < s.size(); ++i) {
      for (int j = 0; j < s.size(); ++j) EXPECT_EQ(d.q(i, j), j == 6 ? 1.0 : 0.0);
    }

    const QMatrix silent = q_matrix(std::vector<double>(bands, 0.0), s);
    for (bool active : silent.row_active) EXPECT_FALSE(active);
  }
}

TEST(ThetaFromV1, RecoversInteriorTheta) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const BandTable& table = table_for(16000);
  const SpreadingMatrix s(table);
  const std::size_t bands = table.bands().size();
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> e = random_energies(rng, bands);
    ThetaBounds bounds{std::vector<double>(bands), std::vector<double>(bands)};
    Eigen::VectorXd truth(s.size());
    for (std::size_t b = 0; b < bands; ++b) {
      const double lo = 0.4 * unit(rng);
      const double hi = 0.6 + 0.4 * unit(rng);
      bounds.lower[b] = lo;
      bounds.upper[b] = hi;
      if (b > 0) truth[static_cast<Eigen::Index>(b) - 1] = lo + (hi - lo) * (0.1 + 0.8 * unit(rng));
    }
    const Eigen::VectorXd cb_ac = q_matrix(e, s).q * truth;
    std::vector<double> cb(bands, 0.0);
    for (int b = 1; b <= s.size(); ++b) cb[static_cast<std::size_t>(b)] = cb_ac[b - 1];

    const ThetaRecovery r = theta_from_v1(e, cb, bounds, s);
    EXPECT_EQ(r.method, ThetaMethod::kBoxLeastSquares);
    EXPECT_LT(r.residual, 1e-8);
    for (int b = 1; b <= s.size(); ++b) {
      EXPECT_NEAR(r.theta[static_cast<std::size_t>(b)], truth[b - 1], 1e-6) << "band " << b;
    }
  }
}

TEST(ThetaFromV1, ConstantTargetAndInfeasibleTarget) {
  std::mt19937_64 rng(63);
  const BandTable& table = table_for(16000);
  const SpreadingMatrix s(table);
  const std::size_t bands = table.bands().size();
  const std::vector<double> e = random_energies(rng, bands);
  const ThetaBounds bounds{std::vector<double>(bands, 0.2), std::vector<double>(bands, 0.8)};

  const ThetaRecovery constant = theta_from_v1(e, std::vector<double>(bands, 0.5), bounds, s);
  EXPECT_LT(constant.residual, 1e-10);
  for (int b = 1; b <= s.size(); ++b) EXPECT_NEAR(constant.theta[static_cast<std::size_t>(b)], 0.5, 1e-6);

  const ThetaRecovery pinned = theta_from_v1(e, std::vector<double>(bands, 3.0), bounds, s);
  EXPECT_GT(pinned.residual, 0.0);
  for (int b = 1; b <= s.size(); ++b) EXPECT_EQ(pinned.theta[static_cast<std::size_t>(b)], 0.8);
}

TEST(ThetaDirect, IdentityRoundTripAndSingularity) {
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const SpreadingMatrix identity(Eigen::MatrixXd::Identity(4, 4));
  const std::vector<double> z{0.0, 0.1, 0.9, 0.4, 0.6};
  const std::vector<double> x = theta_direct(z, identity, std::vector<double>{1, 2, 3, 4, 5});
  for (std::size_t b = 1; b < z.size(); ++b) EXPECT_NEAR(x[b], z[b], 1e-15);

  const SpreadingMatrix s(table_for(16000));
  const std::size_t bands = static_cast<std::size_t>(s.size()) + 1;
  const std::vector<double> e = random_energies(rng, bands);
  Eigen::VectorXd truth(s.size());
  for (int b = 0; b < s.size(); ++b) truth[b] = unit(rng);
  const Eigen::VectorXd cb_ac = q_matrix(e, s).q * truth;
  std::vector<double> cb(bands, 0.0);
  for (int b = 1; b <= s.size(); ++b) cb[static_cast<std::size_t>(b)] = cb_ac[b - 1];
  const std::vector<double> theta = theta_direct(cb, s, e);
  for (int b = 1; b <= s.size(); ++b) EXPECT_NEAR(theta[static_cast<std::size_t>(b)], truth[b - 1], 1e-8);

  const SpreadingMatrix s44(table_for(44100));
  const std::vector<double> e44 = random_energies(rng, 42);
  try {
    theta_direct(std::vector<double>(42, 0.5), s44, e44);
    FAIL() << "expected a singular system";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::kNumerical);
    EXPECT_NE(std::string(err.what()).find("singular"), std::string::npos);
  }
}

TEST(ThetaDirect, UnboundedSolveCanGoNegative) {
  // Random search for a valid-looking cb whose exact inverse is not a valid theta.
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SpreadingMatrix s(table_for(16000));
  const std::size_t bands = static_cast<std::size_t>(s.size()) + 1;
  bool found = false;
  for (int trial = 0; trial < 1000 && !found; ++trial) {
    const std::vector<double> e = random_energies(rng, bands);
    std::vector<double> cb(bands, 0.0);
    for (std::size_t b = 1; b < bands; ++b) cb[b] = unit(rng);
    const std::vector<double> theta = theta_direct(cb, s, e);
    found = *std::min_element(theta.begin() + 1, theta.end()) < 0.0;
  }
  EXPECT_TRUE(found);
}

TEST(Weights, TwoBinExamples) {
  const std::vector<double> psi{0.0, 1.0};
  const WeightVector half = simple_weights(psi, 0.5);
  EXPECT_NEAR(half.rho[0], 0.5, 1e-15);
  EXPECT_NEAR(half.rho[1], 0.5, 1e-15);
  const WeightVector quarter = simple_weights(psi, 0.25);
  EXPECT_NEAR(quarter.rho[0], 0.75, 1e-15);
  EXPECT_NEAR(quarter.rho[1], 0.25, 1e-15);
  EXPECT_NEAR(quarter.w[0], std::sqrt(0.75), 1e-15);
  EXPECT_FALSE(quarter.clamped);
}

TEST(Weights, ParallelCaseIsUniform) {
  const std::vector<double> psi{0.7, 0.7, 0.7};
  for (double theta : {0.0, 0.7, 1.0}) {
    const WeightVector w = simple_weights(psi, theta);
    for (double r : w.rho) EXPECT_DOUBLE_EQ(r, 1.0 / 3.0);
  }
  EXPECT_EQ(simple_weights(std::vector<double>{0.3}, 0.3).rho[0], 1.0);
}

TEST(Weights, TwoBinMatchesLinearSolve) {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> psi{unit(rng), unit(rng)};
    if (std::abs(psi[0] - psi[1]) < 1e-3) continue;
    const double theta = std::min(psi[0], psi[1]) + unit(rng) * std::abs(psi[0] - psi[1]);
    Eigen::Matrix2d a;
    a << 1.0, 1.0, psi[0], psi[1];
    const Eigen::Vector2d ref = a.fullPivLu().solve(Eigen::Vector2d(1.0, theta));
    const std::vector<double> rho = two_dimensional_weights(psi, theta);
    EXPECT_NEAR(rho[0], ref[0], 1e-12);
    EXPECT_NEAR(rho[1], ref[1], 1e-12);
  }
}

TEST(Weights, ConstraintsHoldOrClampIsReported) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int clamped = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 12;
    std::vector<double> psi(n);
    for (double& p : psi) p = unit(rng);
    const auto [lo, hi] = std::minmax_element(psi.begin(), psi.end());
    const double theta = *lo + unit(rng) * (*hi - *lo);
    const WeightVector w = simple_weights(psi, theta);
    EXPECT_NEAR(std::accumulate(w.rho.begin(), w.rho.end(), 0.0), 1.0, 1e-10);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_GE(w.rho[k], 0.0);
      EXPECT_DOUBLE_EQ(w.w[k] * w.w[k], w.rho[k]);
    }
    if (w.clamped) {
      ++clamped;
    } else {
      EXPECT_NEAR(w.theta_achieved, theta, 1e-8);
    }
  }
  EXPECT_GT(clamped, 0);
}

TEST(Reconstruct, BandEnergiesPhasesAndEdges) {
  const BandTable& table = table_for(16000);
  const std::vector<double> s = testing::speech_like(16000, 0.2, 68);
  ForwardTransform forward(table);
  for (const Frame& frame : frames_of(s)) {
    const SpectralFrame x = dft(frame);
    const FrameRecord record = forward.push(x).record;
    std::vector<double> e = record.e;
    e[30] = 0.0;  // force a silent band
    const BandTheta theta = theta_from_v2(e, record.ec);
    FrameDiagnostics diag;
    const SpectralFrame y = reconstruct_spectrum(e, theta.theta, record.side, table, 0.0, &diag);

    EXPECT_EQ(y.bins[0], x.bins[0]);
    EXPECT_EQ(y.bins[kNyquistBin], x.bins[kNyquistBin]);
    for (std::size_t k = 1; k < kNyquistBin; ++k) EXPECT_EQ(y.bins[kFrameSize - k], std::conj(y.bins[k]));
    const std::vector<double> back = band_energy(y, table);
    for (const Band& band : table.bands()) {
      if (band.index == 0) continue;
      EXPECT_NEAR(back[band.index], e[band.index], 1e-8 * e[band.index]) << band.index;
      if (band.width == 1) EXPECT_DOUBLE_EQ(std::abs(y.bins[band.low_bin]), std::sqrt(e[band.index]));
    }
    for (int k = table.band(30).low_bin; k <= table.band(30).high_bin; ++k) EXPECT_EQ(y.bins[k], Complex(0.0, 0.0));
    for (std::size_t k = 1; k < kTableBins; ++k) {
      if (std::abs(y.bins[k]) > 0.0) {
        EXPECT_NEAR(std::remainder(std::arg(y.bins[k]) - record.side.phase[k], 2.0 * std::numbers::pi), 0.0, 1e-12);
      }
    }
    EXPECT_EQ(diag.active_bands, static_cast<std::size_t>(std::count_if(
                                     e.begin() + 1, e.end(), [](double v) { return v > 0.0; })));
  }
}

TEST(Invert, LengthAndBandEnergies) {
  for (int rate : {16000, 44100}) {
    const std::vector<double> s = testing::tone(rate, testing::band_center_hz(rate, 12), 0.11);
    const MdatPayload payload = analyze(s, rate);
    const std::vector<double> y = invert(payload);
    EXPECT_EQ(y.size(), s.size());
    const std::vector<FrameInversion> frames = invert_frames(payload);
    EXPECT_LT(band_energy_max_rel_error(payload, synthesize(frames)), 1e-8);
  }
}

TEST(Invert, V1AgreesWithV2OnForwardPayload) {
  const BandTable& table = table_for(16000);
  const SpreadingMatrix spread(table);
  const MdatPayload payload = analyze(testing::speech_like(16000, 0.25, 69), 16000);
  InversionOptions v1;
  v1.mode = InversionMode::kV1;
  InversionOptions v2;
  for (const FrameRecord& record : payload.frames) {
    const FrameInversion a = invert_frame(record, table, spread, v1);
    const FrameInversion b = invert_frame(record, table, spread, v2);
    EXPECT_FALSE(a.diagnostics.qp_failed);
    EXPECT_LT(a.diagnostics.qp_residual, 1e-8);
    for (int band = 1; band <= table.num_ac_bands(); ++band) {
      if (record.e[static_cast<std::size_t>(band)] > 0.0) {
        EXPECT_NEAR(a.theta[static_cast<std::size_t>(band)], b.theta[static_cast<std::size_t>(band)], 1e-6);
      }
    }
  }
}

TEST(Invert, PayloadIsIdempotent) {
  for (int rate : {16000, 44100}) {
    const std::vector<double> s = testing::speech_like(rate, 256.0 * 40 / rate, 70);
    ASSERT_EQ(s.size() % kFrameSize, 0U);
    const MdatPayload first = analyze(s, rate);
    for (double tau : {0.0, 2.0}) {
      InversionOptions options;
      options.tau = tau;
      const MdatPayload second = analyze(invert(first, options), rate);
      ASSERT_EQ(second.frames.size(), first.frames.size());
      for (std::size_t t = 0; t < first.frames.size(); ++t) {
        const auto& e1 = first.frames[t].e;
        const double peak = *std::max_element(e1.begin(), e1.end());
        for (std::size_t b = 0; b < e1.size(); ++b) {
          const double scale = std::max(e1[b], 1e-12 * peak);
          EXPECT_LE(std::abs(second.frames[t].e[b] - e1[b]), 1e-6 * scale) << t << ":" << b;
        }
      }
    }
  }
}

TEST(Invert, JobCountDoesNotChangeOutput) {
  const MdatPayload payload = analyze(testing::white_noise(16000, 0.3, 71), 16000);
  InversionOptions serial;
  serial.tau = 2.0;
  InversionOptions parallel = serial;
  parallel.jobs = 4;
  EXPECT_EQ(invert(payload, serial), invert(payload, parallel));
}

TEST(Invert, RejectsInconsistentPayload) {
  MdatPayload payload = analyze(testing::white_noise(16000, 0.05, 72), 16000);
  payload.frames[1].e.pop_back();
  EXPECT_THROW(validate_payload(payload), Error);
  EXPECT_THROW(invert(payload), Error);
}

}  // namespace
}  // namespace mdat
