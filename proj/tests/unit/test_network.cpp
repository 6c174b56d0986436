#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include <doctest.h>

#include "spinlink/dynamics.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/network.hpp"
#include "support/generators.hpp"

using namespace spinlink;
using std::numbers::pi;

namespace {

ChannelConfig channel(int id, Polarization pol = Polarization::normal, double psi_c = 0.0,
                      double psi_p = 0.0) {
  ChannelConfig c;
  c.id = id;
  c.control_phase = psi_c;
  c.probe_phase = psi_p;
  c.polarization = pol;
  return c;
}

ReservoirConfig unit_reservoir(double gamma_c, int memory_modes = 1, double delta = 0.0) {
  ReservoirConfig r;
  r.spin_decay = 1.0;
  r.exchange_rate = gamma_c;
  r.optical_decay = 1e6;
  r.two_photon_detuning = delta;
  r.memory_modes = memory_modes;
  return r;
}

// Relabels quadrature rows/columns: new mode k is old mode perm[k].
Eigen::MatrixXd permute(const Eigen::MatrixXd& m, const std::vector<int>& perm) {
  Eigen::VectorXi idx(2 * static_cast<Eigen::Index>(perm.size()));
  for (std::size_t k = 0; k < perm.size(); ++k) {
    idx(2 * static_cast<Eigen::Index>(k)) = 2 * perm[k];
    idx(2 * static_cast<Eigen::Index>(k) + 1) = 2 * perm[k] + 1;
  }
  return m(idx, idx);
}

bool all_beam_splitter(const CoupledModeNetwork& net) {
  for (const auto& e : net.edges) {
    if (e.type != Interaction::beam_splitter) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("local spin phase") {
  CHECK(local_spin_phase(channel(0, Polarization::normal, 0.0, 0.0)) == 0.0);
  CHECK(local_spin_phase(channel(0, Polarization::normal, pi, 0.0)) == doctest::Approx(pi));
  CHECK(local_spin_phase(channel(0, Polarization::normal, 0.0, 1.5 * pi)) ==
        doctest::Approx(pi / 2));
  CHECK(local_spin_phase(channel(0, Polarization::normal, -pi, 0.0)) == doctest::Approx(pi));
  CHECK_THROWS_AS(
      local_spin_phase(channel(0, Polarization::normal, std::numeric_limits<double>::infinity())),
      DomainError);
}

TEST_CASE("transferred probe phase") {
  CHECK(transferred_probe_phase(channel(0), channel(1)) == 0.0);
  // θ_i = π/2 (ψ_c = π/2, ψ_p = 0), ψ_c^(j) = π.
  CHECK(transferred_probe_phase(channel(0, Polarization::normal, pi / 2),
                                channel(1, Polarization::normal, pi)) == doctest::Approx(pi / 2));
  CHECK_THROWS_AS(transferred_probe_phase(channel(2), channel(2)), StructuralError);
}

TEST_CASE("transferred light from Ch0 and Ch1 interferes as 1 + cos θ0 in Ch2") {
  const auto c1 = channel(1);
  const auto c2 = channel(2);
  for (double theta0 : {0.0, 0.4, pi / 2, 2.0, pi, 4.5}) {
    const auto c0 = channel(0, Polarization::normal, theta0, 0.0);
    const double dphi = transferred_probe_phase(c0, c2) - transferred_probe_phase(c1, c2);
    CHECK(std::cos(dphi) == doctest::Approx(std::cos(theta0)));
    const double intensity =
        std::norm(std::polar(1.0, transferred_probe_phase(c0, c2)) +
                  std::polar(1.0, transferred_probe_phase(c1, c2)));
    CHECK(intensity == doctest::Approx(2.0 * (1.0 + std::cos(theta0))));
  }
}

TEST_CASE("interaction type") {
  using P = Polarization;
  CHECK(interaction_type(P::normal, P::normal) == Interaction::beam_splitter);
  CHECK(interaction_type(P::normal, P::reversed) == Interaction::two_mode_squeezing);
  CHECK(interaction_type(P::reversed, P::normal) == Interaction::two_mode_squeezing);
  CHECK(interaction_type(P::reversed, P::reversed) == Interaction::beam_splitter);
}

TEST_CASE("build_network shapes") {
  const auto res = unit_reservoir(0.1);
  const auto single = build_network({channel(0)}, res);
  CHECK(single.n_modes() == 2);
  CHECK(single.edges.size() == 1);

  const auto normal = build_network({channel(0), channel(1), channel(2)}, res);
  CHECK(normal.n_modes() == 4);
  CHECK(normal.edges.size() == 6);
  CHECK(all_beam_splitter(normal));

  const auto reversed =
      build_network({channel(0, Polarization::reversed), channel(1), channel(2)}, res);
  for (const auto& e : reversed.edges) {
    const bool touches_ch0 = e.i == reversed.channel_mode(0) || e.j == reversed.channel_mode(0);
    CHECK(e.type == (touches_ch0 ? Interaction::two_mode_squeezing : Interaction::beam_splitter));
    CHECK(e.i != e.j);
    CHECK(e.rate >= 0.0);
  }

  CHECK(build_network({channel(1), channel(2)}, unit_reservoir(0.1, 0)).n_modes() == 2);
  const auto chain = build_network({channel(1), channel(2)}, unit_reservoir(0.1, 3));
  CHECK(chain.n_modes() == 5);
  CHECK(chain.edges.size() == 1 + 2 + 2);
}

TEST_CASE("build_network errors") {
  const auto res = unit_reservoir(0.1);
  CHECK_THROWS_AS(build_network({channel(1), channel(1)}, res), StructuralError);
  CHECK_THROWS_AS(build_network({}, res), StructuralError);
  CHECK_THROWS_AS(build_network({channel(0), channel(1), channel(2), channel(3)}, res),
                  StructuralError);
  CHECK_THROWS_AS(build_network({channel(0)}, unit_reservoir(0.0)), DomainError);
  auto bad = res;
  bad.spin_decay = -1.0;
  CHECK_THROWS_AS(build_network({channel(0)}, bad), DomainError);
  auto ch = channel(0);
  ch.control_rabi = 0.0;
  CHECK_THROWS_AS(build_network({ch}, res), DomainError);
}

TEST_CASE("reservoir validation warns when the optical coherence is not fast") {
  auto res = unit_reservoir(0.1);
  CHECK(validate(res).empty());
  res.optical_decay = 100.0;
  CHECK_FALSE(validate(res).empty());
}

TEST_CASE("edge rate overrides apply to the named pair only") {
  auto res = unit_reservoir(0.1, 0);
  res.edge_rates[{0, 2}] = 0.03;
  const auto net = build_network({channel(0), channel(1), channel(2)}, res);
  for (const auto& e : net.edges) {
    const bool is02 = net.modes[e.i].channel_id == 0 && net.modes[e.j].channel_id == 2;
    CHECK(e.rate == doctest::Approx(is02 ? 0.03 : 0.1));
  }
}

TEST_CASE("decoupled single mode compiles to a textbook damped oscillator") {
  const double gamma = 2.5, delta = 0.7;
  auto res = unit_reservoir(0.1, 0, delta);
  res.spin_decay = gamma;
  const auto dd = drift_diffusion(build_network({channel(0)}, res));
  Eigen::Matrix2d expected;
  expected << -gamma / 2, delta, -delta, -gamma / 2;
  CHECK(dd.drift.isApprox(expected));
  CHECK(dd.diffusion.isApprox(gamma * Eigen::Matrix2d::Identity()));
}

TEST_CASE("two BS-coupled modes at zero phase") {
  const auto dd = drift_diffusion(build_network({channel(1), channel(2)}, unit_reservoir(0.2, 0)));
  const Eigen::Matrix2d off = dd.drift.block(0, 2, 2, 2);
  CHECK((off + off.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(off.cwiseAbs().maxCoeff() == doctest::Approx(0.2));
  const auto sigma = steady_state_covariance(dd);
  CHECK((sigma.matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("TMS threshold at Γc = Γs/2") {
  const std::vector<ChannelConfig> pair{channel(0, Polarization::reversed), channel(1)};
  CHECK(hurwitz_check(drift_diffusion(build_network(pair, unit_reservoir(0.49, 0))).drift).stable);
  CHECK_FALSE(hurwitz_check(drift_diffusion(build_network(pair, unit_reservoir(0.5, 0))).drift).stable);
  CHECK_FALSE(hurwitz_check(drift_diffusion(build_network(pair, unit_reservoir(0.51, 0))).drift).stable);
}

TEST_CASE("hurwitz check") {
  CHECK(hurwitz_check(-Eigen::MatrixXd::Identity(4, 4)).stable);
  const auto zero = hurwitz_check(Eigen::MatrixXd::Zero(2, 2));
  CHECK_FALSE(zero.stable);
  CHECK(zero.max_real_part == 0.0);
  const auto defaults = build_network({channel(0), channel(1), channel(2)}, ReservoirConfig{});
  CHECK(hurwitz_check(drift_diffusion(defaults).drift).stable);
  Eigen::MatrixXd nan = -Eigen::MatrixXd::Identity(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hurwitz_check(nan), NumericError);
}

TEST_CASE("beam-splitter ratio") {
  CHECK(beam_splitter_ratio(unit_reservoir(1.0)) == doctest::Approx(0.5));
  CHECK(beam_splitter_ratio(unit_reservoir(1.0 / 9.0)) == doctest::Approx(0.1));
}

TEST_CASE("all-BS networks have the vacuum as steady state") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    auto net = spinlink::testing::random_network(rng);
    for (auto& c : net.channels) c.polarization = Polarization::normal;
    const auto dd = drift_diffusion(build_network(net.channels, net.reservoir));
    const auto sigma = steady_state_covariance(dd);
    CHECK((sigma.matrix() - Eigen::MatrixXd::Identity(dd.drift.rows(), dd.drift.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("diffusion is symmetric positive semidefinite") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = spinlink::testing::random_network(rng);
    const auto dd = drift_diffusion(build_network(net.channels, net.reservoir));
    CHECK((dd.diffusion - dd.diffusion.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dd.diffusion);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("channel relabeling permutes the compiled matrices") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    auto net = spinlink::testing::random_network(rng);
    net.reservoir.edge_rates.clear();
    const auto n_ch = static_cast<int>(net.channels.size());
    if (n_ch < 2) continue;
    auto swapped = net.channels;
    std::swap(swapped.front(), swapped.back());
    const auto a = drift_diffusion(build_network(net.channels, net.reservoir));
    const auto b = drift_diffusion(build_network(swapped, net.reservoir));
    std::vector<int> perm(static_cast<std::size_t>(a.n_modes()));
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    std::swap(perm.front(), perm[static_cast<std::size_t>(n_ch - 1)]);
    CHECK((permute(a.drift, perm) - b.drift).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((permute(a.diffusion, perm) - b.diffusion).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("a common phase shift leaves the drift unchanged") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const auto net = spinlink::testing::random_network(rng);
    auto shifted = net.channels;
    const double shift = spinlink::testing::uniform(rng, -10.0, 10.0);
    for (auto& c : shifted) {
      c.control_phase += shift;
      c.probe_phase += shift;
    }
    const auto a = drift_diffusion(build_network(net.channels, net.reservoir)).drift;
    const auto b = drift_diffusion(build_network(shifted, net.reservoir)).drift;
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

}  // TEST_SUITE
