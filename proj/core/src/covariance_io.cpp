#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <iomanip>

#include "spinlink/errors.hpp"
#include "spinlink/gaussian.hpp"

namespace spinlink {

void write_covariance_csv(std::ostream& out, const CovarianceMatrix& sigma) {
  const auto n = sigma.dimension();
  out << "n_modes," << sigma.n_modes() << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) out << ',';
      out << sigma(r, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

CovarianceMatrix read_covariance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw StructuralError("covariance csv: missing header");
  }
  const std::string prefix = "n_modes,";
  if (line.rfind(prefix, 0) != 0) {
    throw StructuralError("covariance csv: header must be `n_modes,<N>`");
  }
  std::size_t n_modes = 0;
  try {
    n_modes = std::stoul(line.substr(prefix.size()));
  } catch (const std::exception&) {
    throw StructuralError("covariance csv: bad mode count in header");
  }
  if (n_modes == 0) {
    throw StructuralError("covariance csv: mode count must be positive");
  }
  const auto n = 2 * n_modes;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!std::getline(in, line)) {
      throw StructuralError("covariance csv: expected " + std::to_string(n) + " rows");
    }
    std::stringstream row(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(row, cell, ',')) {
      if (c >= n) {
        throw StructuralError("covariance csv: row " + std::to_string(r) + " has too many columns");
      }
      try {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::stod(cell);
      } catch (const std::exception&) {
        throw StructuralError("covariance csv: bad value '" + cell + "'");
      }
      ++c;
    }
    if (c != n) {
      throw StructuralError("covariance csv: row " + std::to_string(r) + " has " +
                            std::to_string(c) + " columns, expected " + std::to_string(n));
    }
  }
  return CovarianceMatrix(std::move(m));
}

}  // namespace spinlink
