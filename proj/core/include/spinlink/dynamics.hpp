#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinlink/gaussian.hpp"
#include "spinlink/network.hpp"

namespace spinlink {

inline constexpr double kLyapunovTolerance = 1e-10;

/// max |Aσ + σAᵀ + D|.
double lyapunov_residual(const DriftDiffusion& dd, const Eigen::MatrixXd& sigma);

/// Solves Aσ + σAᵀ + D = 0 by a dense Kronecker solve with iterative
/// refinement. Throws InstabilityError if A is not Hurwitz and NumericError if
/// the residual exceeds 1e-10·max(1, max|D|).
CovarianceMatrix steady_state_covariance(const DriftDiffusion& dd);

/// σ(t) = E σ₀ Eᵀ + ∫₀ᵗ E(s) D E(s)ᵀ ds with E(s) = exp(As).
CovarianceMatrix evolve_covariance(const CovarianceMatrix& sigma0, const DriftDiffusion& dd,
                                   double t);

/// A named linear combination of quadratures; `row` has width 2M.
struct Observable {
  std::string name;
  Eigen::RowVectorXd row;
};

/// Var(q_i) for one mode.
Observable quadrature_observable(std::size_t n_modes, std::size_t mode, Quadrature q,
                                 const std::string& name);
/// (q_i ± q_j)/√2.
Observable joint_observable(std::size_t n_modes, const ModePair& pair, Sign sign, Quadrature q,
                            const std::string& name);

enum class SpectrumKind {
  /// Detected output field: the reflected vacuum input plus the emitted
  /// system field, so a decoupled port reads exactly 1 (0 dB).
  output,
  /// Spectral density of the internal quadratures; integrates to σ.
  internal,
};

/// Cross-spectral matrix C S(ω) Cᵀ at one angular frequency.
Eigen::MatrixXcd spectral_density_matrix(const DriftDiffusion& dd, const Eigen::MatrixXd& observables,
                                         double omega, SpectrumKind kind = SpectrumKind::output);

struct SpectrumResult {
  std::vector<double> frequencies;                 // rad/s, strictly increasing
  std::vector<std::string> names;                  // one per observable
  std::vector<std::vector<double>> psd;            // psd[observable][frequency]
  std::vector<std::vector<double>> db_rel_shot;    // 10 log10(psd)
};

SpectrumResult noise_spectrum(const DriftDiffusion& dd, const std::vector<Observable>& observables,
                              const std::vector<double>& omega_grid,
                              SpectrumKind kind = SpectrumKind::output);

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spectrum);

/// Symmetric uniform grid of `points` samples on [center − half_span, center + half_span].
std::vector<double> uniform_grid(double center, double half_span, std::size_t points);

struct EnsembleOptions {
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t n_trajectories = 2000;
  std::uint64_t seed = 0;
  /// Initial state for every trajectory; zero if empty.
  Eigen::VectorXd initial_state;
  /// Sample every `stride` steps in the averaging window.
  std::size_t stride = 1;
};

struct EnsembleEstimate {
  CovarianceMatrix covariance;
  Eigen::MatrixXd standard_error;
  Eigen::VectorXd mean_final;  // ensemble mean of the final state
  std::size_t steps = 0;
};

/// Largest stable Euler–Maruyama step accepted by trajectory_ensemble.
double max_ensemble_step(const Eigen::MatrixXd& drift);

/// Euler–Maruyama ensemble of dr = A r dt + √D dW. The covariance is averaged
/// over the second half of the horizon, per trajectory; standard errors come
/// from the spread of the per-trajectory estimates. Trajectory k draws its
/// noise from a Philox stream keyed by (seed, k), so results do not depend on
/// evaluation order.
EnsembleEstimate trajectory_ensemble(const DriftDiffusion& dd, const EnsembleOptions& options);

}  // namespace spinlink
