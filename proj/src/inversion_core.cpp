#include "mdat/inversion_core.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <numeric>
#include <thread>

#include "mdat/spectral_smoother.hpp"

namespace mdat {
namespace {

void require_band_vector(std::span<const double> v, std::size_t bands, const char* name) {
  if (v.size() != bands) {
    throw Error(ErrorKind::kArgument, std::string(name) + " must have " + std::to_string(bands) +
                                          " entries, got " + std::to_string(v.size()));
  }
}

}  // namespace

BandTheta theta_from_v2(std::span<const double> e, std::span<const double> ec) {
  if (e.size() != ec.size()) throw Error(ErrorKind::kArgument, "e and ec sizes differ");
  BandTheta out{std::vector<double>(e.size(), 0.0), std::vector<bool>(e.size(), false)};
  for (std::size_t b = 0; b < e.size(); ++b) {
    if (e[b] > 0.0) {
      out.theta[b] = ec[b] / e[b];
      out.active[b] = true;
    }
  }
  return out;
}

QMatrix q_matrix(std::span<const double> e, const SpreadingMatrix& spread) {
  const int j = spread.size();
  require_band_vector(e, static_cast<std::size_t>(j) + 1, "e");
  const Eigen::MatrixXd& s = spread.matrix();
  QMatrix out{Eigen::MatrixXd::Zero(j, j), std::vector<bool>(static_cast<std::size_t>(j), false)};
  for (int row = 0; row < j; ++row) {
    double denom = 0.0;
    for (int col = 0; col < j; ++col) denom += e[col + 1] * s(col, row);
    if (!(denom > 0.0)) continue;
    out.row_active[static_cast<std::size_t>(row)] = true;
    for (int col = 0; col < j; ++col) out.q(row, col) = e[col + 1] * s(col, row) / denom;
  }
  return out;
}

ThetaBounds theta_bounds(std::span<const float> c, const BandTable& table) {
  if (c.size() != kTableBins) throw Error(ErrorKind::kArgument, "c must have 128 entries");
  ThetaBounds out{std::vector<double>(table.bands().size()), std::vector<double>(table.bands().size())};
  for (const Band& band : table.bands()) {
    const auto [lo, hi] = std::minmax_element(c.begin() + band.low_bin, c.begin() + band.high_bin + 1);
    out.lower[static_cast<std::size_t>(band.index)] = *lo;
    out.upper[static_cast<std::size_t>(band.index)] = *hi;
  }
  return out;
}

ThetaRecovery theta_from_v1(std::span<const double> e, std::span<const double> cb,
                            const ThetaBounds& bounds, const SpreadingMatrix& spread,
                            const BoxLeastSquaresOptions& options) {
  const int j = spread.size();
  const std::size_t bands = static_cast<std::size_t>(j) + 1;
  require_band_vector(cb, bands, "cb");
  require_band_vector(bounds.lower, bands, "lower bounds");
  require_band_vector(bounds.upper, bands, "upper bounds");
  const QMatrix q = q_matrix(e, spread);

  std::vector<int> rows;
  std::vector<int> cols;
  for (int b = 1; b <= j; ++b) {
    if (q.row_active[static_cast<std::size_t>(b - 1)]) rows.push_back(b);
    if (e[static_cast<std::size_t>(b)] > 0.0) cols.push_back(b);
  }

  ThetaRecovery out;
  out.method = ThetaMethod::kBoxLeastSquares;
  out.theta.assign(bands, 0.0);
  out.active.assign(bands, false);
  if (rows.empty() || cols.empty()) return out;

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd sub(m, n);
  Eigen::VectorXd rhs(m);
  Eigen::VectorXd lower(n);
  Eigen::VectorXd upper(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    rhs[r] = cb[static_cast<std::size_t>(rows[r])];
    for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = q.q(rows[r] - 1, cols[c] - 1);
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    lower[c] = bounds.lower[static_cast<std::size_t>(cols[c])];
    upper[c] = bounds.upper[static_cast<std::size_t>(cols[c])];
  }

  const BoxLeastSquaresResult solved = solve_box_least_squares(sub, rhs, lower, upper, options);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.theta[static_cast<std::size_t>(cols[c])] = solved.x[c];
    out.active[static_cast<std::size_t>(cols[c])] = true;
  }
  out.residual = solved.residual;
  out.projected_gradient = solved.projected_gradient;
  out.iterations = solved.iterations;
  if (!solved.converged) {
    throw ThetaRecoveryError("theta recovery did not converge after " +
                                 std::to_string(solved.iterations) + " iterations (residual " +
                                 std::to_string(solved.residual) + ")",
                             out);
  }
  return out;
}

std::vector<double> theta_direct(std::span<const double> cb, const SpreadingMatrix& spread,
                                 std::span<const double> e) {
  const int j = spread.size();
  const std::size_t bands = static_cast<std::size_t>(j) + 1;
  require_band_vector(cb, bands, "cb");
  require_band_vector(e, bands, "e");
  const Eigen::MatrixXd st = spread.matrix().transpose();

  Eigen::VectorXd energy(j);
  for (int b = 0; b < j; ++b) energy[b] = e[static_cast<std::size_t>(b) + 1];
  const Eigen::VectorXd ecb = st * energy;
  Eigen::VectorXd z(j);
  for (int b = 0; b < j; ++b) z[b] = cb[static_cast<std::size_t>(b) + 1] * ecb[b];

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(st);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kNumerical, "spreading matrix is singular (rank " +
                                           std::to_string(lu.rank()) + " of " + std::to_string(j) + ")");
  }
  const Eigen::VectorXd x = lu.solve(z);
  std::vector<double> theta(bands, 0.0);
  for (int b = 0; b < j; ++b) {
    if (energy[b] > 0.0) theta[static_cast<std::size_t>(b) + 1] = x[b] / energy[b];
  }
  return theta;
}

std::vector<double> two_dimensional_weights(std::span<const double> psi, double theta) {
  const std::size_t n = psi.size();
  if (n == 0) throw Error(ErrorKind::kArgument, "empty band");
  const double nd = static_cast<double>(n);
  std::vector<double> rho(n, 1.0 / nd);

  const double sum = std::accumulate(psi.begin(), psi.end(), 0.0);
  const auto [lo, hi] = std::minmax_element(psi.begin(), psi.end());
  // psi parallel to (1, ..., 1): the theta constraint is implied by the unit sum.
  if (n == 1 || sum <= 0.0 || *hi - *lo <= 1e-15 * std::max(1.0, *hi)) return rho;

  const double ratio = nd / sum;  // e.e / e.psi
  std::vector<double> v(n);
  double v_norm2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = 1.0 - ratio * psi[k];
    v_norm2 += v[k] * v[k];
  }
  const double along_v = (1.0 - ratio * theta) / v_norm2;
  for (std::size_t k = 0; k < n; ++k) rho[k] += along_v * v[k];
  return rho;
}

WeightVector finalize_weights(std::vector<double> rho, std::span<const double> psi) {
  if (rho.size() != psi.size()) throw Error(ErrorKind::kArgument, "rho and psi sizes differ");
  WeightVector out;
  double sum = 0.0;
  for (double& r : rho) {
    if (r < -1e-12) out.clamped = true;
    r = std::max(r, 0.0);
    sum += r;
  }
  if (out.clamped) {
    if (sum > 0.0) {
      for (double& r : rho) r /= sum;
    } else {
      std::fill(rho.begin(), rho.end(), 1.0 / static_cast<double>(rho.size()));
    }
  }
  out.w.resize(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    out.w[k] = std::sqrt(rho[k]);
    out.theta_achieved += rho[k] * psi[k];
  }
  out.rho = std::move(rho);
  return out;
}

WeightVector simple_weights(std::span<const double> psi, double theta) {
  return finalize_weights(two_dimensional_weights(psi, theta), psi);
}

SpectralFrame reconstruct_spectrum(std::span<const double> e, std::span<const double> theta,
                                   const SideInfo& side, const BandTable& table, double tau,
                                   FrameDiagnostics* diagnostics) {
  const std::size_t bands = table.bands().size();
  require_band_vector(e, bands, "e");
  require_band_vector(theta, bands, "theta");

  BinArray c{};
  for (std::size_t k = 0; k < kTableBins; ++k) c[k] = side.c[k];

  std::vector<bool> active(bands, false);
  BinArray rho{};
  for (const Band& band : table.bands()) {
    const auto b = static_cast<std::size_t>(band.index);
    active[b] = band.index > 0 && e[b] > 0.0;
    const std::span<const double> psi(c.data() + band.low_bin, static_cast<std::size_t>(band.width));
    const std::vector<double> raw =
        active[b] ? two_dimensional_weights(psi, theta[b])
                  : std::vector<double>(psi.size(), 1.0 / static_cast<double>(psi.size()));
    std::copy(raw.begin(), raw.end(), rho.begin() + band.low_bin);
  }
  if (tau > 0.0) rho = smooth_weights(rho, c, theta, active, table, tau);

  FrameDiagnostics diag;
  SpectralFrame out;
  out.bins[0] = side.dc;
  out.bins[kNyquistBin] = side.nyquist;
  for (const Band& band : table.bands()) {
    const auto b = static_cast<std::size_t>(band.index);
    if (!active[b]) continue;
    ++diag.active_bands;
    const std::span<const double> psi(c.data() + band.low_bin, static_cast<std::size_t>(band.width));
    const WeightVector weights =
        finalize_weights({rho.begin() + band.low_bin, rho.begin() + band.high_bin + 1}, psi);
    if (weights.clamped) {
      ++diag.clamped_bands;
      diag.max_theta_deviation =
          std::max(diag.max_theta_deviation, std::abs(weights.theta_achieved - theta[b]));
    }
    const double amplitude = std::sqrt(e[b]);
    for (int k = band.low_bin; k <= band.high_bin; ++k) {
      out.bins[static_cast<std::size_t>(k)] =
          std::polar(weights.w[static_cast<std::size_t>(k - band.low_bin)] * amplitude,
                     static_cast<double>(side.phase[static_cast<std::size_t>(k)]));
    }
  }
  for (std::size_t k = 1; k < kNyquistBin; ++k) out.bins[kFrameSize - k] = std::conj(out.bins[k]);
  if (diagnostics != nullptr) *diagnostics = diag;
  return out;
}

FrameInversion invert_frame(const FrameRecord& record, const BandTable& table,
                            const SpreadingMatrix& spread, const InversionOptions& options) {
  FrameInversion out;
  bool qp_failed = false;
  double qp_residual = 0.0;
  if (options.mode == InversionMode::kV2) {
    out.theta = theta_from_v2(record.e, record.ec).theta;
  } else {
    const PerceptionVector perception = perceive(record.e, record.ec, spread);
    const ThetaBounds bounds = theta_bounds(record.side.c, table);
    try {
      const ThetaRecovery recovered = theta_from_v1(record.e, perception.cb, bounds, spread, options.qp);
      out.theta = recovered.theta;
      qp_residual = recovered.residual;
    } catch (const ThetaRecoveryError& failure) {
      out.theta = failure.best().theta;
      qp_residual = failure.best().residual;
      qp_failed = true;
    }
  }
  out.spectrum = reconstruct_spectrum(record.e, out.theta, record.side, table, options.tau,
                                      &out.diagnostics);
  out.diagnostics.qp_failed = qp_failed;
  out.diagnostics.qp_residual = qp_residual;
  return out;
}

void validate_payload(const MdatPayload& payload) {
  if (!is_supported_rate(payload.sample_rate)) {
    throw Error(ErrorKind::kFormat, "payload has unsupported sample rate " +
                                        std::to_string(payload.sample_rate));
  }
  const BandTable& table = table_for(payload.sample_rate);
  if (payload.num_ac_bands != table.num_ac_bands()) {
    throw Error(ErrorKind::kFormat, "payload band count does not match the table");
  }
  const std::uint64_t expected = (payload.original_length + kFrameSize - 1) / kFrameSize;
  if (payload.original_length == 0 || payload.frames.size() != expected) {
    throw Error(ErrorKind::kFormat, "frame count inconsistent with original length");
  }
  const std::size_t bands = table.bands().size();
  for (const FrameRecord& frame : payload.frames) {
    if (frame.e.size() != bands || frame.ec.size() != bands) {
      throw Error(ErrorKind::kFormat, "frame record has the wrong number of bands");
    }
    for (std::size_t b = 0; b < bands; ++b) {
      if (!(frame.e[b] >= 0.0) || !(frame.ec[b] >= 0.0) || !std::isfinite(frame.e[b]) ||
          !std::isfinite(frame.ec[b])) {
        throw Error(ErrorKind::kFormat, "frame record has negative or non-finite energy");
      }
    }
  }
}

std::vector<FrameInversion> invert_frames(const MdatPayload& payload, const InversionOptions& options,
                                          InversionDiagnostics* diagnostics) {
  validate_payload(payload);
  if (!(options.tau >= 0.0)) throw Error(ErrorKind::kArgument, "tau must be >= 0");
  const BandTable& table = table_for(payload.sample_rate);
  const SpreadingMatrix spread(table);

  const std::size_t count = payload.frames.size();
  std::vector<FrameInversion> frames(count);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t t = begin; t < count; t += stride) {
      frames[t] = invert_frame(payload.frames[t], table, spread, options);
      frames[t].spectrum.index = t;
    }
  };

  const std::size_t jobs =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(options.jobs, 1)), count);
  if (jobs <= 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> workers;
      for (std::size_t j = 0; j < jobs; ++j) {
        workers.emplace_back([&, j] {
          try {
            work(j, jobs);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        });
      }
    }
    for (const auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }

  if (diagnostics != nullptr) {
    InversionDiagnostics total;
    total.frames = count;
    for (const FrameInversion& f : frames) {
      const FrameDiagnostics& d = f.diagnostics;
      total.active_bands += d.active_bands;
      total.clamped_bands += d.clamped_bands;
      total.max_theta_deviation = std::max(total.max_theta_deviation, d.max_theta_deviation);
      total.max_qp_residual = std::max(total.max_qp_residual, d.qp_residual);
      total.qp_failures += d.qp_failed ? 1 : 0;
    }
    *diagnostics = total;
  }
  return frames;
}

std::vector<double> synthesize(std::span<const FrameInversion> frames) {
  std::vector<double> signal(frames.size() * kFrameSize, 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame frame = idft(frames[t].spectrum);
    std::copy(frame.samples.begin(), frame.samples.end(),
              signal.begin() + static_cast<std::ptrdiff_t>(t * kFrameSize));
  }
  return signal;
}

std::vector<double> invert(const MdatPayload& payload, const InversionOptions& options,
                           InversionDiagnostics* diagnostics) {
  std::vector<double> signal = synthesize(invert_frames(payload, options, diagnostics));
  signal.resize(static_cast<std::size_t>(payload.original_length));
  return signal;
}

}  // namespace mdat
