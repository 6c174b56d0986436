#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spinlink/dynamics.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/philox.hpp"

namespace spinlink {

namespace {

Eigen::MatrixXd noise_gain(const Eigen::MatrixXd& d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (d + d.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double max_ensemble_step(const Eigen::MatrixXd& drift) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(drift, false);
  const double largest = solver.eigenvalues().cwiseAbs().maxCoeff();
  return largest > 0.0 ? 0.1 / largest : std::numeric_limits<double>::infinity();
}

EnsembleEstimate trajectory_ensemble(const DriftDiffusion& dd, const EnsembleOptions& options) {
  const auto n = dd.drift.rows();
  if (n == 0 || dd.drift.cols() != n || dd.diffusion.rows() != n || dd.diffusion.cols() != n) {
    throw StructuralError("trajectory_ensemble: drift and diffusion must be square and equal size");
  }
  if (options.n_trajectories < 100) {
    throw DomainError("trajectory_ensemble: need at least 100 trajectories");
  }
  if (!(options.dt > 0.0) || !(options.horizon > options.dt) || options.stride == 0) {
    throw DomainError("trajectory_ensemble: need 0 < dt < horizon and a positive stride");
  }
  const double dt_max = max_ensemble_step(dd.drift);
  if (options.dt > dt_max) {
    std::ostringstream msg;
    msg << "trajectory_ensemble: dt = " << options.dt << " is unstable; use dt <= " << dt_max;
    throw DomainError(msg.str());
  }
  if (options.initial_state.size() != 0 && options.initial_state.size() != n) {
    throw StructuralError("trajectory_ensemble: initial state has the wrong size");
  }

  const auto steps = static_cast<std::size_t>(std::llround(options.horizon / options.dt));
  const std::size_t window_start = steps / 2;
  const Eigen::MatrixXd step_matrix = Eigen::MatrixXd::Identity(n, n) + options.dt * dd.drift;
  const Eigen::MatrixXd gain = std::sqrt(options.dt) * noise_gain(dd.diffusion);
  const bool diagonal_gain = gain.isDiagonal();
  const Eigen::VectorXd gain_diag = gain.diagonal();

  const std::size_t n_traj = options.n_trajectories;
  std::vector<Eigen::MatrixXd> moments(n_traj);
  Eigen::VectorXd mean_final = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd x(n), next(n), w(n);
  Eigen::MatrixXd acc(n, n);
  for (std::size_t k = 0; k < n_traj; ++k) {
    Philox4x32 engine(options.seed, k);
    std::normal_distribution<double> normal;
    x = options.initial_state.size() ? options.initial_state : Eigen::VectorXd::Zero(n);
    acc.setZero();
    std::size_t samples = 0;
    for (std::size_t s = 1; s <= steps; ++s) {
      for (Eigen::Index r = 0; r < n; ++r) w(r) = normal(engine);
      next.noalias() = step_matrix * x;
      if (diagonal_gain) {
        next += gain_diag.cwiseProduct(w);
      } else {
        next.noalias() += gain * w;
      }
      x.swap(next);
      if (s > window_start && (s - window_start) % options.stride == 0) {
        acc.selfadjointView<Eigen::Lower>().rankUpdate(x);
        ++samples;
      }
    }
    acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
    moments[k] = acc / static_cast<double>(samples);
    mean_final += x;
  }

  // Reduce in trajectory order so the result is independent of scheduling.
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : moments) mean += m;
  mean /= static_cast<double>(n_traj);
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : moments) var += (m - mean).cwiseAbs2();
  var /= static_cast<double>(n_traj - 1);

  EnsembleEstimate out{CovarianceMatrix(mean), (var / static_cast<double>(n_traj)).cwiseSqrt(),
                       mean_final / static_cast<double>(n_traj), steps};
  return out;
}

}  // namespace spinlink
