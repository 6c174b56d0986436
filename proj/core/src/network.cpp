#include "spinlink/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include <Eigen/Eigenvalues>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// Detuning sign of a mode: a reversed channel maps onto the conjugate spin
// coherence, so the common Larmor precession appears with opposite sign.
double detuning_sign(Polarization p) { return p == Polarization::normal ? 1.0 : -1.0; }

}  // namespace

std::string to_string(Polarization p) {
  return p == Polarization::normal ? "normal" : "reversed";
}

std::string to_string(Interaction i) {
  return i == Interaction::beam_splitter ? "BS" : "TMS";
}

void validate(const ChannelConfig& channel) {
  if (!std::isfinite(channel.control_phase) || !std::isfinite(channel.probe_phase)) {
    throw DomainError("channel " + std::to_string(channel.id) + ": phases must be finite");
  }
  if (!std::isfinite(channel.control_rabi) || channel.control_rabi <= 0.0) {
    throw DomainError("channel " + std::to_string(channel.id) + ": control Rabi frequency must be > 0");
  }
  if (!std::isfinite(channel.probe_rabi) || channel.probe_rabi < 0.0) {
    throw DomainError("channel " + std::to_string(channel.id) + ": probe Rabi frequency must be >= 0");
  }
}

std::vector<std::string> validate(const ReservoirConfig& reservoir) {
  require_positive(reservoir.spin_decay, "spin decay rate");
  require_positive(reservoir.exchange_rate, "exchange rate");
  require_positive(reservoir.optical_decay, "optical decay rate");
  require_positive(reservoir.larmor_frequency, "Larmor frequency");
  if (!std::isfinite(reservoir.two_photon_detuning)) {
    throw DomainError("two-photon detuning must be finite");
  }
  if (reservoir.memory_modes < 0) {
    throw DomainError("memory mode count must be non-negative");
  }
  for (const auto& [pair, rate] : reservoir.edge_rates) {
    if (!std::isfinite(rate) || rate < 0.0) {
      throw DomainError("edge rate override must be non-negative");
    }
  }
  std::vector<std::string> warnings;
  const double slowest = std::max(reservoir.spin_decay, reservoir.exchange_rate);
  if (reservoir.optical_decay < ReservoirConfig::kAdiabaticRatio * slowest) {
    warnings.push_back("optical decay is less than 1e3 times the spin rates; "
                       "adiabatic elimination of the optical coherence is questionable");
  }
  return warnings;
}

double wrap_phase(double angle) {
  if (!std::isfinite(angle)) {
    throw DomainError("phase must be finite");
  }
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double local_spin_phase(const ChannelConfig& channel) {
  return wrap_phase(channel.control_phase - channel.probe_phase);
}

double transferred_probe_phase(const ChannelConfig& from, const ChannelConfig& to) {
  if (from.id == to.id) {
    throw StructuralError("transferred_probe_phase: source and target are the same channel (" +
                          std::to_string(from.id) + ")");
  }
  return wrap_phase(to.control_phase - local_spin_phase(from));
}

Interaction interaction_type(Polarization a, Polarization b) {
  return a == b ? Interaction::beam_splitter : Interaction::two_mode_squeezing;
}

double beam_splitter_ratio(const ReservoirConfig& reservoir) {
  return reservoir.exchange_rate / (reservoir.exchange_rate + reservoir.spin_decay);
}

std::size_t CoupledModeNetwork::channel_mode(int id) const {
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k].kind == ModeKind::channel && modes[k].channel_id == id) return k;
  }
  throw StructuralError("network has no channel with id " + std::to_string(id));
}

CoupledModeNetwork build_network(const std::vector<ChannelConfig>& channels,
                                 const ReservoirConfig& reservoir) {
  if (channels.empty() || channels.size() > 3) {
    throw StructuralError("build_network: expected 1 to 3 channels, got " +
                          std::to_string(channels.size()));
  }
  std::set<int> ids;
  for (const auto& c : channels) {
    validate(c);
    if (!ids.insert(c.id).second) {
      throw StructuralError("build_network: duplicate channel id " + std::to_string(c.id));
    }
  }
  validate(reservoir);

  CoupledModeNetwork net;
  net.decay = reservoir.spin_decay;
  net.detuning = reservoir.two_photon_detuning;

  for (const auto& c : channels) {
    net.modes.push_back({ModeKind::channel, c.id, c.polarization, local_spin_phase(c),
                         "ch" + std::to_string(c.id)});
  }
  for (int k = 0; k < reservoir.memory_modes; ++k) {
    net.modes.push_back({ModeKind::memory, -1, Polarization::normal, 0.0, "mem" + std::to_string(k)});
  }

  auto rate_for = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    const auto it = reservoir.edge_rates.find(key);
    return it == reservoir.edge_rates.end() ? reservoir.exchange_rate : it->second;
  };

  for (std::size_t a = 0; a < channels.size(); ++a) {
    for (std::size_t b = a + 1; b < channels.size(); ++b) {
      const auto& ca = channels[a];
      const auto& cb = channels[b];
      Edge e{a, b, interaction_type(ca.polarization, cb.polarization), rate_for(ca.id, cb.id), 0.0};
      if (e.type == Interaction::beam_splitter) {
        // Light leaving a arrives in b at ψ_p^{a→b}; relative to b's own probe
        // frame that is θ_b − θ_a.
        e.phase = wrap_phase(transferred_probe_phase(ca, cb) - cb.probe_phase);
      } else {
        // Pair phase ψ_c^a + ψ_c^b − θ_a − θ_b, expressed in the probe frames.
        const double lab = ca.control_phase + cb.control_phase - local_spin_phase(ca) -
                           local_spin_phase(cb);
        e.phase = wrap_phase(lab - ca.probe_phase - cb.probe_phase);
      }
      net.edges.push_back(e);
    }
  }

  if (reservoir.memory_modes > 0) {
    const std::size_t first_memory = channels.size();
    for (std::size_t a = 0; a < channels.size(); ++a) {
      const auto& ca = channels[a];
      Edge e{a, first_memory, interaction_type(ca.polarization, Polarization::normal),
             reservoir.exchange_rate, 0.0};
      if (e.type == Interaction::beam_splitter) {
        e.phase = wrap_phase(-local_spin_phase(ca));
      }
      net.edges.push_back(e);
    }
    for (std::size_t k = first_memory; k + 1 < net.modes.size(); ++k) {
      net.edges.push_back({k, k + 1, Interaction::beam_splitter, reservoir.exchange_rate, 0.0});
    }
  }
  return net;
}

DriftDiffusion drift_diffusion(const CoupledModeNetwork& network) {
  const auto n = network.n_modes();
  // Complex mode equations da/dt = K a + L a† + noise.
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(idx(n), idx(n));
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(idx(n), idx(n));
  const cd i1(0.0, 1.0);

  for (std::size_t m = 0; m < n; ++m) {
    const double delta = detuning_sign(network.modes[m].polarization) * network.detuning;
    k(idx(m), idx(m)) = cd(-0.5 * network.decay, -delta);
  }
  for (const auto& e : network.edges) {
    if (e.i == e.j || e.i >= n || e.j >= n) {
      throw StructuralError("drift_diffusion: invalid edge");
    }
    const cd phasor = std::polar(1.0, e.phase);
    if (e.type == Interaction::beam_splitter) {
      // H = Γ (e^{iφ} a_j† a_i + h.c.)
      k(idx(e.j), idx(e.i)) += -i1 * e.rate * phasor;
      k(idx(e.i), idx(e.j)) += -i1 * e.rate * std::conj(phasor);
    } else {
      // H = iΓ (e^{iφ} a_i† a_j† − h.c.)
      l(idx(e.i), idx(e.j)) += e.rate * phasor;
      l(idx(e.j), idx(e.i)) += e.rate * phasor;
    }
  }

  DriftDiffusion dd;
  dd.drift = Eigen::MatrixXd::Zero(idx(2 * n), idx(2 * n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const cd kk = k(idx(r), idx(c));
      const cd ll = l(idx(r), idx(c));
      auto block = dd.drift.block<2, 2>(idx(2 * r), idx(2 * c));
      block(0, 0) = kk.real() + ll.real();
      block(0, 1) = -kk.imag() + ll.imag();
      block(1, 0) = kk.imag() + ll.imag();
      block(1, 1) = kk.real() - ll.real();
    }
  }
  dd.diffusion = network.decay * Eigen::MatrixXd::Identity(idx(2 * n), idx(2 * n));
  return dd;
}

HurwitzReport hurwitz_check(const Eigen::MatrixXd& drift) {
  if (drift.rows() != drift.cols() || drift.rows() == 0) {
    throw StructuralError("hurwitz_check: drift matrix must be square and non-empty");
  }
  if (!drift.allFinite()) {
    throw NumericError("hurwitz_check: non-finite drift entries");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(drift, false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hurwitz_check: eigenvalue computation failed");
  }
  HurwitzReport report;
  const auto& ev = solver.eigenvalues();
  Eigen::Index arg = 0;
  ev.real().maxCoeff(&arg);
  report.critical_eigenvalue = ev(arg);
  report.max_real_part = ev(arg).real();
  report.stable = report.max_real_part < -kHurwitzMargin;
  return report;
}

}  // namespace spinlink
