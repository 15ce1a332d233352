#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdat/band_tables.hpp"
#include "mdat/box_least_squares.hpp"
#include "mdat/error.hpp"
#include "mdat/forward_transform.hpp"
#include "mdat/spectral_frontend.hpp"

namespace mdat {

/// Per-band targets theta_b = <w^b>^2_c, indexed by band 0..J. Inactive bands
/// (e(b) = 0) carry theta 0 and are reconstructed as silence.
struct BandTheta {
  std::vector<double> theta;
  std::vector<bool> active;
};

/// theta = ec / e.
BandTheta theta_from_v2(std::span<const double> e, std::span<const double> ec);

/// Row-stochastic mixing matrix over the AC bands: entry (i, j) is
/// e(j+1) S(j+1, i+1) / sum_j e(j+1) S(j+1, i+1). Rows with a zero denominator are
/// zero and flagged inactive.
struct QMatrix {
  Eigen::MatrixXd q;
  std::vector<bool> row_active;
};

QMatrix q_matrix(std::span<const double> e, const SpreadingMatrix& spread);

enum class ThetaMethod { kDirectSolve, kBoxLeastSquares, kFromV2 };

struct ThetaRecovery {
  std::vector<double> theta;  // band 0..J
  std::vector<bool> active;
  double residual = 0.0;  // ||cb - Q theta||_2 over active rows
  double projected_gradient = 0.0;
  int iterations = 0;
  ThetaMethod method = ThetaMethod::kBoxLeastSquares;
};

/// Raised when the box-constrained solve does not converge; carries the best iterate.
class ThetaRecoveryError : public Error {
 public:
  ThetaRecoveryError(const std::string& what, ThetaRecovery best)
      : Error(ErrorKind::kNumerical, what), best_(std::move(best)) {}

  const ThetaRecovery& best() const noexcept { return best_; }

 private:
  ThetaRecovery best_;
};

/// Per-band min and max of c over the band's bins (band 0..J).
struct ThetaBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

ThetaBounds theta_bounds(std::span<const float> c, const BandTable& table);

/// Recovers theta from (e, cb): minimizes ||cb - Q theta||_2 with
/// lower <= theta <= upper over the active bands.
ThetaRecovery theta_from_v1(std::span<const double> e, std::span<const double> cb,
                            const ThetaBounds& bounds, const SpreadingMatrix& spread,
                            const BoxLeastSquaresOptions& options = {});

/// Solves S^T x = z with z(b) = cb(b) ecb(b) and x(b') = e(b') theta(b'), without
/// bounds. Components may come out negative. Throws Error(kNumerical) if the
/// system is singular (always the case for the 44.1 kHz table, whose top four
/// bands share one bark value).
std::vector<double> theta_direct(std::span<const double> cb, const SpreadingMatrix& spread,
                                 std::span<const double> e);

/// Squared weights satisfying sum rho = 1 and psi . rho = theta with the fewest
/// degrees of freedom: uniform when psi is constant, otherwise the component along
/// v = 1 - (N / sum psi) psi is fixed and all others are zero. May be negative.
std::vector<double> two_dimensional_weights(std::span<const double> psi, double theta);

struct WeightVector {
  std::vector<double> rho;  // squared weights, nonnegative, sum 1
  std::vector<double> w;    // +sqrt(rho)
  bool clamped = false;     // a negative component was zeroed
  double theta_achieved = 0.0;
};

/// Zeroes negative components, renormalizes to unit sum and takes square roots.
WeightVector finalize_weights(std::vector<double> rho, std::span<const double> psi);

/// two_dimensional_weights followed by finalize_weights.
WeightVector simple_weights(std::span<const double> psi, double theta);

struct FrameDiagnostics {
  std::size_t active_bands = 0;
  std::size_t clamped_bands = 0;
  double max_theta_deviation = 0.0;  // over clamped bands
  double qp_residual = 0.0;
  bool qp_failed = false;
};

/// Assembles a conjugate-symmetric spectrum: a_k = w_k sqrt(e(b)) exp(i phase_k),
/// DC and Nyquist bins from side info. tau > 0 smooths the wide bands first.
SpectralFrame reconstruct_spectrum(std::span<const double> e, std::span<const double> theta,
                                   const SideInfo& side, const BandTable& table, double tau = 0.0,
                                   FrameDiagnostics* diagnostics = nullptr);

enum class InversionMode { kV1, kV2 };

struct InversionOptions {
  InversionMode mode = InversionMode::kV2;
  double tau = 0.0;
  int jobs = 1;
  BoxLeastSquaresOptions qp{};
};

struct FrameInversion {
  SpectralFrame spectrum;
  std::vector<double> theta;
  FrameDiagnostics diagnostics;
};

/// Inverts one frame record. v1 mode first rebuilds cb from (e, ec) and recovers
/// theta by box-constrained least squares; a non-converged solve falls back to its
/// best iterate and sets qp_failed.
FrameInversion invert_frame(const FrameRecord& record, const BandTable& table,
                            const SpreadingMatrix& spread, const InversionOptions& options);

struct InversionDiagnostics {
  std::size_t frames = 0;
  std::size_t active_bands = 0;
  std::size_t clamped_bands = 0;
  double max_theta_deviation = 0.0;
  double max_qp_residual = 0.0;
  std::size_t qp_failures = 0;
};

/// Inverts every frame, in parallel when options.jobs > 1. Output is independent
/// of the job count.
std::vector<FrameInversion> invert_frames(const MdatPayload& payload,
                                          const InversionOptions& options = {},
                                          InversionDiagnostics* diagnostics = nullptr);

/// Concatenates the inverse DFTs of the frames (untrimmed).
std::vector<double> synthesize(std::span<const FrameInversion> frames);

/// Reconstructs the time signal, trimmed to the original length.
std::vector<double> invert(const MdatPayload& payload, const InversionOptions& options = {},
                           InversionDiagnostics* diagnostics = nullptr);

/// Throws Error(kFormat) if the payload is internally inconsistent.
void validate_payload(const MdatPayload& payload);

}  // namespace mdat
