#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spinlink {

enum class Polarization { normal, reversed };
enum class Interaction { beam_splitter, two_mode_squeezing };

std::string to_string(Polarization p);
std::string to_string(Interaction i);

/// One optical channel: control and probe fields driving a Λ-type EIT
/// interaction. Phases in radians, Rabi frequencies in rad/s.
struct ChannelConfig {
  int id = 0;
  double control_phase = 0.0;
  double probe_phase = 0.0;
  double control_rabi = 1.0e7;
  double probe_rabi = 4.0e6;
  bool probe_on = true;
  Polarization polarization = Polarization::normal;
};

/// Atomic-spin reservoir shared by all channels. Rates in 1/s, frequencies in rad/s.
struct ReservoirConfig {
  double spin_decay = 1.0 / 30e-3;
  double exchange_rate = 0.1 / 30e-3;
  double optical_decay = 1.0 / 20e-9;
  double two_photon_detuning = 0.0;
  double larmor_frequency = 2.0 * std::numbers::pi * 352e3;
  /// Length of the auxiliary memory chain; 0 couples channels directly only.
  int memory_modes = 1;
  /// Optional per-pair exchange-rate overrides keyed by (lower id, higher id).
  std::map<std::pair<int, int>, double> edge_rates;

  /// Ratio of optical decay to the slowest of the other rates must reach this
  /// for adiabatic elimination of the optical coherence to hold.
  static constexpr double kAdiabaticRatio = 1e3;
};

/// Throws DomainError on non-finite phases or out-of-range Rabi frequencies.
void validate(const ChannelConfig& channel);
/// Throws DomainError on non-positive rates; returns human-readable warnings.
std::vector<std::string> validate(const ReservoirConfig& reservoir);

/// Wrap an angle into (-π, π].
double wrap_phase(double angle);

/// θ = ψ_c − ψ_p, wrapped.
double local_spin_phase(const ChannelConfig& channel);

/// Phase of light written into `from`'s spin wave and read out in `to`:
/// ψ_c(to) − θ(from), wrapped.
double transferred_probe_phase(const ChannelConfig& from, const ChannelConfig& to);

/// Same polarization couples as a beam splitter, opposite as a two-mode squeezer.
Interaction interaction_type(Polarization a, Polarization b);

/// Beam-splitter ratio Γ_c / (Γ_c + Γ_s).
double beam_splitter_ratio(const ReservoirConfig& reservoir);

enum class ModeKind { channel, memory };

struct Mode {
  ModeKind kind = ModeKind::channel;
  int channel_id = -1;  // -1 for memory modes
  Polarization polarization = Polarization::normal;
  double spin_phase = 0.0;  // θ of the channel; memory modes carry 0
  std::string label;
};

/// Coupling between modes i < j. For a beam splitter `phase` is the phase
/// picked up transferring i -> j; for a two-mode squeezer it is the pair phase.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  Interaction type = Interaction::beam_splitter;
  double rate = 0.0;
  double phase = 0.0;
};

/// One mode per channel (in input order) followed by the memory chain.
/// Each mode is expressed in the frame of its own probe field.
struct CoupledModeNetwork {
  std::vector<Mode> modes;
  std::vector<Edge> edges;
  double decay = 0.0;     // local amplitude-damping rate Γ_s for every mode
  double detuning = 0.0;  // δ_B

  std::size_t n_modes() const { return modes.size(); }
  /// Index of the mode for channel `id`; throws StructuralError if absent.
  std::size_t channel_mode(int id) const;
};

CoupledModeNetwork build_network(const std::vector<ChannelConfig>& channels,
                                 const ReservoirConfig& reservoir);

/// Linear quadrature dynamics dr = A r dt + √D dW in (x_1, p_1, ...) ordering.
struct DriftDiffusion {
  Eigen::MatrixXd drift;
  Eigen::MatrixXd diffusion;

  std::size_t n_modes() const { return static_cast<std::size_t>(drift.rows() / 2); }
};

DriftDiffusion drift_diffusion(const CoupledModeNetwork& network);

struct HurwitzReport {
  bool stable = false;
  double max_real_part = 0.0;
  std::complex<double> critical_eigenvalue;
};

inline constexpr double kHurwitzMargin = 1e-12;

HurwitzReport hurwitz_check(const Eigen::MatrixXd& drift);

}  // namespace spinlink
