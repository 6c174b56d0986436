#include "spinlink/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericError(std::string(what) + ": non-finite matrix entries");
  }
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw StructuralError("covariance matrix must be square");
  }
  if (entries_.rows() == 0 || entries_.rows() % 2 != 0) {
    throw StructuralError("covariance matrix dimension must be even and non-zero, got " +
                          std::to_string(entries_.rows()));
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
  return CovarianceMatrix(Eigen::MatrixXd::Identity(idx(2 * n_modes), idx(2 * n_modes)));
}

CovarianceMatrix CovarianceMatrix::thermal(std::size_t n_modes, double mean_occupation) {
  if (mean_occupation < 0.0) {
    throw DomainError("thermal occupation must be non-negative");
  }
  return CovarianceMatrix((2.0 * mean_occupation + 1.0) *
                          Eigen::MatrixXd::Identity(idx(2 * n_modes), idx(2 * n_modes)));
}

CovarianceMatrix CovarianceMatrix::two_mode_squeezed(double r) {
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m.diagonal().setConstant(c);
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return CovarianceMatrix(std::move(m));
}

ModePair::ModePair(std::size_t i, std::size_t j) : first_(std::min(i, j)), second_(std::max(i, j)) {
  if (i == j) {
    throw StructuralError("mode pair requires distinct indices, got " + std::to_string(i) + " twice");
  }
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(idx(2 * n_modes), idx(2 * n_modes));
  for (std::size_t k = 0; k < n_modes; ++k) {
    omega(idx(2 * k), idx(2 * k + 1)) = 1.0;
    omega(idx(2 * k + 1), idx(2 * k)) = -1.0;
  }
  return omega;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
  require_finite(sigma.matrix(), "symplectic_eigenvalues");
  const Eigen::MatrixXd sym = 0.5 * (sigma.matrix() + sigma.matrix().transpose());
  const Eigen::MatrixXd m = symplectic_form(sigma.n_modes()) * sym;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symplectic_eigenvalues: eigen-decomposition failed");
  }
  std::vector<double> magnitudes;
  magnitudes.reserve(sigma.dimension());
  for (const auto& lambda : solver.eigenvalues()) {
    magnitudes.push_back(std::abs(lambda));
  }
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
  // Eigenvalues of Ωσ come in ±iν pairs; keep one of each.
  std::vector<double> nu;
  nu.reserve(sigma.n_modes());
  for (std::size_t k = 0; k < magnitudes.size(); k += 2) {
    nu.push_back(0.5 * (magnitudes[k] + magnitudes[k + 1]));
  }
  return nu;
}

ValidityReport validate_covariance(const CovarianceMatrix& sigma) {
  ValidityReport report;
  report.asymmetry = (sigma.matrix() - sigma.matrix().transpose()).cwiseAbs().maxCoeff();
  const auto nu = symplectic_eigenvalues(sigma);
  report.min_symplectic_eigenvalue = nu.back();

  // ν >= 1 alone admits indefinite matrices whose Ωσ spectrum happens to sit
  // outside the unit circle, so positivity is checked separately.
  const Eigen::MatrixXd sym = 0.5 * (sigma.matrix() + sigma.matrix().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const bool positive = eig.eigenvalues().minCoeff() > 0.0;

  report.valid = report.asymmetry <= kSymmetryTolerance && positive &&
                 report.min_symplectic_eigenvalue >= 1.0 - kPhysicalityTolerance;
  return report;
}

CovarianceMatrix reduce(const CovarianceMatrix& sigma, const std::vector<std::size_t>& modes) {
  if (modes.empty()) {
    throw StructuralError("reduce: mode list is empty");
  }
  std::vector<std::size_t> seen;
  for (auto m : modes) {
    if (m >= sigma.n_modes()) {
      throw StructuralError("reduce: mode index " + std::to_string(m) + " out of range for " +
                            std::to_string(sigma.n_modes()) + " modes");
    }
    if (std::find(seen.begin(), seen.end(), m) != seen.end()) {
      throw StructuralError("reduce: duplicate mode index " + std::to_string(m));
    }
    seen.push_back(m);
  }
  const auto n = modes.size();
  Eigen::MatrixXd out(idx(2 * n), idx(2 * n));
  for (std::size_t a = 0; a < 2 * n; ++a) {
    const auto ra = 2 * modes[a / 2] + a % 2;
    for (std::size_t b = 0; b < 2 * n; ++b) {
      const auto rb = 2 * modes[b / 2] + b % 2;
      out(idx(a), idx(b)) = sigma(ra, rb);
    }
  }
  return CovarianceMatrix(std::move(out));
}

double joint_quadrature_variance(const CovarianceMatrix& sigma, const ModePair& pair, Sign sign,
                                 Quadrature quadrature) {
  if (pair.second() >= sigma.n_modes()) {
    throw StructuralError("joint_quadrature_variance: mode index out of range");
  }
  const std::size_t offset = quadrature == Quadrature::x ? 0 : 1;
  const auto i = 2 * pair.first() + offset;
  const auto j = 2 * pair.second() + offset;
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  return 0.5 * (sigma(i, i) + sigma(j, j) + s * (sigma(i, j) + sigma(j, i)));
}

double entropy_kernel(double nu) {
  if (!(nu >= 1.0)) {
    return 0.0;  // ν < 1 only arises from rounding on pure modes
  }
  return plogp(0.5 * (nu + 1.0)) - plogp(0.5 * (nu - 1.0));
}

double gaussian_discord(const CovarianceMatrix& sigma2) {
  if (sigma2.n_modes() != 2) {
    throw StructuralError("gaussian_discord: expected a two-mode state, got " +
                          std::to_string(sigma2.n_modes()) + " modes");
  }
  const auto report = validate_covariance(sigma2);
  if (!report.valid) {
    throw DomainError("gaussian_discord: unphysical covariance (min symplectic eigenvalue " +
                      std::to_string(report.min_symplectic_eigenvalue) + ")");
  }
  const Eigen::MatrixXd s = 0.5 * (sigma2.matrix() + sigma2.matrix().transpose());
  const double a = s.block<2, 2>(0, 0).determinant();
  const double b = s.block<2, 2>(2, 2).determinant();
  const double c = s.block<2, 2>(0, 2).determinant();
  const double d = s.determinant();

  // Symplectic spectrum from the invariants: ν±² = (Δ ± sqrt(Δ² - 4D)) / 2.
  const double delta = a + b + 2.0 * c;
  const double disc = std::sqrt(std::max(0.0, delta * delta - 4.0 * d));
  const double nu_plus = std::sqrt(std::max(0.0, 0.5 * (delta + disc)));
  const double nu_minus = std::sqrt(std::max(0.0, 0.5 * (delta - disc)));

  // Minimal conditional determinant over single-mode Gaussian measurements on B.
  double e_min;
  const double bm1 = b - 1.0;
  const double lhs = (d - a * b) * (d - a * b);
  const double rhs = (1.0 + b) * c * c * (a + d);
  if (lhs <= rhs && bm1 > 1e-12) {
    const double root = std::sqrt(std::max(0.0, c * c + bm1 * (d - a)));
    e_min = (2.0 * c * c + bm1 * (d - a) + 2.0 * std::abs(c) * root) / (bm1 * bm1);
  } else {
    const double inner = c * c * c * c + (d - a * b) * (d - a * b) - 2.0 * c * c * (a * b + d);
    e_min = (a * b - c * c + d - std::sqrt(std::max(0.0, inner))) / (2.0 * b);
  }

  const double value = entropy_kernel(std::sqrt(b)) - entropy_kernel(nu_minus) -
                       entropy_kernel(nu_plus) + entropy_kernel(std::sqrt(std::max(1.0, e_min)));
  if (value < 0.0 && value >= -kDiscordClamp) {
    return 0.0;
  }
  return value;
}

CovarianceMatrix rotate_mode(const CovarianceMatrix& sigma, std::size_t mode, double angle) {
  if (mode >= sigma.n_modes()) {
    throw StructuralError("rotate_mode: mode index out of range");
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(idx(sigma.dimension()), idx(sigma.dimension()));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const auto k = idx(2 * mode);
  r(k, k) = c;
  r(k, k + 1) = s;
  r(k + 1, k) = -s;
  r(k + 1, k + 1) = c;
  return CovarianceMatrix(r * sigma.matrix() * r.transpose());
}

}  // namespace spinlink
