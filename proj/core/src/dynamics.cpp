#include "spinlink/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

using cd = std::complex<double>;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_shapes(const DriftDiffusion& dd) {
  const auto n = dd.drift.rows();
  if (n == 0 || dd.drift.cols() != n || dd.diffusion.rows() != n || dd.diffusion.cols() != n) {
    throw StructuralError("drift and diffusion must be square matrices of equal size");
  }
  if (!dd.drift.allFinite() || !dd.diffusion.allFinite()) {
    throw NumericError("drift/diffusion contain non-finite entries");
  }
}

void require_hurwitz(const Eigen::MatrixXd& drift, const char* who) {
  const auto report = hurwitz_check(drift);
  if (!report.stable) {
    std::ostringstream msg;
    msg << who << ": drift is not Hurwitz; eigenvalue " << report.critical_eigenvalue.real()
        << (report.critical_eigenvalue.imag() < 0 ? " - " : " + ")
        << std::abs(report.critical_eigenvalue.imag()) << "i has non-negative real part";
    throw InstabilityError(msg.str(), report.critical_eigenvalue);
  }
}

Eigen::MatrixXd lyapunov_operator_apply(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x) {
  return a * x + x * a.transpose();
}

// Symmetric square root of a PSD matrix.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& d) {
  if (d.isDiagonal()) {
    return d.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (d + d.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double lyapunov_residual(const DriftDiffusion& dd, const Eigen::MatrixXd& sigma) {
  return (lyapunov_operator_apply(dd.drift, sigma) + dd.diffusion).cwiseAbs().maxCoeff();
}

CovarianceMatrix steady_state_covariance(const DriftDiffusion& dd) {
  require_shapes(dd);
  require_hurwitz(dd.drift, "steady_state_covariance");

  const auto n = dd.drift.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  // vec(AX + XAᵀ) = (I ⊗ A + A ⊗ I) vec(X), column-major.
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index c = 0; c < n; ++c) {
    kron.block(c * n, c * n, n, n) += dd.drift;
    for (Eigen::Index r = 0; r < n; ++r) {
      kron.block(r * n, c * n, n, n) += dd.drift(r, c) * eye;
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kron);

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = -dd.diffusion;
  for (int pass = 0; pass < 3; ++pass) {
    const Eigen::VectorXd vec_rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n);
    const Eigen::VectorXd step = lu.solve(vec_rhs);
    sigma += Eigen::Map<const Eigen::MatrixXd>(step.data(), n, n);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    rhs = -dd.diffusion - lyapunov_operator_apply(dd.drift, sigma);
  }

  const double residual = lyapunov_residual(dd, sigma);
  const double bound = kLyapunovTolerance * std::max(1.0, dd.diffusion.cwiseAbs().maxCoeff());
  if (!(residual <= bound)) {
    std::ostringstream msg;
    msg << "steady_state_covariance: Lyapunov residual " << residual << " exceeds " << bound;
    throw NumericError(msg.str());
  }
  return CovarianceMatrix(std::move(sigma));
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& sigma0, const DriftDiffusion& dd, double t) {
  require_shapes(dd);
  if (sigma0.dimension() != static_cast<std::size_t>(dd.drift.rows())) {
    throw StructuralError("evolve_covariance: covariance and drift sizes differ");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("evolve_covariance: time must be finite and non-negative");
  }
  if (t == 0.0) {
    return sigma0;
  }
  const auto n = dd.drift.rows();
  if (hurwitz_check(dd.drift).stable) {
    // σ(t) − σ_ss obeys the homogeneous equation.
    const auto steady = steady_state_covariance(dd);
    const Eigen::MatrixXd e = (dd.drift * t).exp();
    Eigen::MatrixXd out = steady.matrix() + e * (sigma0.matrix() - steady.matrix()) * e.transpose();
    return CovarianceMatrix(0.5 * (out + out.transpose()));
  }
  // Van Loan: exp([[-A, D], [0, Aᵀ]] t) = [[·, F12], [0, F22]], with
  // F22 = exp(A t)ᵀ and F22ᵀ F12 = ∫ E D Eᵀ ds.
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -dd.drift;
  block.topRightCorner(n, n) = dd.diffusion;
  block.bottomRightCorner(n, n) = dd.drift.transpose();
  const Eigen::MatrixXd f = (block * t).exp();
  const Eigen::MatrixXd e = f.bottomRightCorner(n, n).transpose();
  const Eigen::MatrixXd noise = e * f.topRightCorner(n, n);
  Eigen::MatrixXd out = e * sigma0.matrix() * e.transpose() + noise;
  return CovarianceMatrix(0.5 * (out + out.transpose()));
}

Observable quadrature_observable(std::size_t n_modes, std::size_t mode, Quadrature q,
                                 const std::string& name) {
  if (mode >= n_modes) {
    throw StructuralError("observable mode index out of range");
  }
  Observable obs{name, Eigen::RowVectorXd::Zero(idx(2 * n_modes))};
  obs.row(idx(2 * mode + (q == Quadrature::x ? 0 : 1))) = 1.0;
  return obs;
}

Observable joint_observable(std::size_t n_modes, const ModePair& pair, Sign sign, Quadrature q,
                            const std::string& name) {
  if (pair.second() >= n_modes) {
    throw StructuralError("observable mode index out of range");
  }
  const std::size_t offset = q == Quadrature::x ? 0 : 1;
  Observable obs{name, Eigen::RowVectorXd::Zero(idx(2 * n_modes))};
  obs.row(idx(2 * pair.first() + offset)) = M_SQRT1_2;
  obs.row(idx(2 * pair.second() + offset)) = sign == Sign::plus ? M_SQRT1_2 : -M_SQRT1_2;
  return obs;
}

Eigen::MatrixXcd spectral_density_matrix(const DriftDiffusion& dd, const Eigen::MatrixXd& observables,
                                         double omega, SpectrumKind kind) {
  require_shapes(dd);
  const auto n = dd.drift.rows();
  if (observables.cols() != n) {
    throw StructuralError("observable rows must have width 2M");
  }
  if (!std::isfinite(omega)) {
    throw NumericError("spectral_density_matrix: non-finite frequency");
  }
  Eigen::MatrixXcd m = dd.drift.cast<cd>();
  m.diagonal().array() += cd(0.0, omega);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const Eigen::MatrixXcd c = observables.cast<cd>();

  if (kind == SpectrumKind::internal) {
    // C (A + iω)^{-1} D (Aᵀ − iω)^{-1} Cᵀ
    const Eigen::MatrixXcd g_ct = lu.solve(Eigen::MatrixXcd::Identity(n, n));
    const Eigen::MatrixXcd cg = c * g_ct;
    return cg * dd.diffusion.cast<cd>() * cg.adjoint();
  }
  // Output y = ξ − Bᵀ r gives y(ω) = [I + Bᵀ (A + iω)^{-1} B] ξ(ω).
  const Eigen::MatrixXcd b = psd_sqrt(dd.diffusion).cast<cd>();
  const Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(n, n) + b.transpose() * lu.solve(b);
  const Eigen::MatrixXcd ct = c * t;
  return ct * ct.adjoint();
}

std::vector<double> uniform_grid(double center, double half_span, std::size_t points) {
  if (points < 2 || !(half_span > 0.0) || !std::isfinite(center) || !std::isfinite(half_span)) {
    throw DomainError("uniform_grid: need at least two points and a positive finite span");
  }
  std::vector<double> grid(points);
  const double step = 2.0 * half_span / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = center - half_span + step * static_cast<double>(k);
  }
  return grid;
}

SpectrumResult noise_spectrum(const DriftDiffusion& dd, const std::vector<Observable>& observables,
                              const std::vector<double>& omega_grid, SpectrumKind kind) {
  require_shapes(dd);
  require_hurwitz(dd.drift, "noise_spectrum");
  if (omega_grid.empty()) {
    throw StructuralError("noise_spectrum: empty frequency grid");
  }
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    if (!std::isfinite(omega_grid[k])) {
      throw NumericError("noise_spectrum: non-finite frequency in grid");
    }
    if (k > 0 && !(omega_grid[k] > omega_grid[k - 1])) {
      throw StructuralError("noise_spectrum: frequency grid must be strictly increasing");
    }
  }
  const auto n = dd.drift.rows();
  Eigen::MatrixXd c(idx(observables.size()), n);
  SpectrumResult result;
  for (std::size_t o = 0; o < observables.size(); ++o) {
    if (observables[o].row.size() != n) {
      throw StructuralError("noise_spectrum: observable '" + observables[o].name +
                            "' has the wrong width");
    }
    c.row(idx(o)) = observables[o].row;
    result.names.push_back(observables[o].name);
  }
  result.frequencies = omega_grid;
  result.psd.assign(observables.size(), std::vector<double>(omega_grid.size()));
  result.db_rel_shot.assign(observables.size(), std::vector<double>(omega_grid.size()));
  for (std::size_t k = 0; k < omega_grid.size(); ++k) {
    const Eigen::MatrixXcd s = spectral_density_matrix(dd, c, omega_grid[k], kind);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const double value = s(idx(o), idx(o)).real();
      result.psd[o][k] = value;
      result.db_rel_shot[o][k] = 10.0 * std::log10(std::max(value, 1e-300));
    }
  }
  return result;
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spectrum) {
  out << "omega_rad_s";
  for (const auto& name : spectrum.names) {
    out << ',' << name << "_psd," << name << "_db";
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
    out << spectrum.frequencies[k];
    for (std::size_t o = 0; o < spectrum.names.size(); ++o) {
      out << ',' << spectrum.psd[o][k] << ',' << spectrum.db_rel_shot[o][k];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spinlink
