#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinlink {

/// Quadrature covariance matrix of an N-mode Gaussian state.
///
/// Ordering is (x_1, p_1, ..., x_N, p_N) and the vacuum has unit variance in
/// every quadrature, so the vacuum covariance is the identity and physical
/// states have all symplectic eigenvalues >= 1. The constructor only enforces
/// shape (square, even, non-empty); symmetry and physicality are reported by
/// validate_covariance().
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd entries);

  static CovarianceMatrix vacuum(std::size_t n_modes);
  static CovarianceMatrix thermal(std::size_t n_modes, double mean_occupation);
  /// Two-mode squeezed vacuum with squeezing parameter r.
  static CovarianceMatrix two_mode_squeezed(double r);

  std::size_t n_modes() const { return static_cast<std::size_t>(entries_.rows() / 2); }
  std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(std::size_t row, std::size_t col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  // Quadrature row/column indices of a mode.
  static std::size_t x_index(std::size_t mode) { return 2 * mode; }
  static std::size_t p_index(std::size_t mode) { return 2 * mode + 1; }

 private:
  Eigen::MatrixXd entries_;
};

/// Unordered pair of distinct mode indices, stored with first < second.
class ModePair {
 public:
  ModePair(std::size_t i, std::size_t j);

  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

struct ValidityReport {
  bool valid = false;
  double min_symplectic_eigenvalue = 0.0;
  double asymmetry = 0.0;  // max |σ - σᵀ|
};

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPhysicalityTolerance = 1e-9;
inline constexpr double kDiscordClamp = 1e-12;

/// Canonical symplectic form Ω for n modes in (x, p) interleaved ordering.
Eigen::MatrixXd symplectic_form(std::size_t n_modes);

ValidityReport validate_covariance(const CovarianceMatrix& sigma);

/// Symplectic eigenvalues, one per mode, in descending order.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma);

/// Principal submatrix on the listed modes, in the listed order.
CovarianceMatrix reduce(const CovarianceMatrix& sigma, const std::vector<std::size_t>& modes);

enum class Quadrature { x, p };
enum class Sign { plus, minus };

/// Var((q_i ± q_j)/√2) for the chosen quadrature.
double joint_quadrature_variance(const CovarianceMatrix& sigma, const ModePair& pair, Sign sign,
                                 Quadrature quadrature = Quadrature::x);

/// Von Neumann entropy kernel f(ν) in bits for a mode with symplectic eigenvalue ν.
double entropy_kernel(double nu);

/// Gaussian quantum discord of a two-mode state, measurement on the second mode.
double gaussian_discord(const CovarianceMatrix& sigma2);

/// Phase-space rotation (x, p) -> (x cos a + p sin a, -x sin a + p cos a) on one mode.
CovarianceMatrix rotate_mode(const CovarianceMatrix& sigma, std::size_t mode, double angle);

// CSV form: header `n_modes,<N>` then 2N rows of 2N values at 17 significant digits.
void write_covariance_csv(std::ostream& out, const CovarianceMatrix& sigma);
CovarianceMatrix read_covariance_csv(std::istream& in);

}  // namespace spinlink
