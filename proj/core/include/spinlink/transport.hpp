#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "spinlink/network.hpp"

namespace spinlink {

/// Power-broadened EIT half-width Γ_s + Ω_c²/Γ_opt.
double eit_linewidth(double control_rabi, double optical_decay, double spin_decay);

/// Lorentzian EIT window T₀ w²/(w² + δ²).
double eit_transmission(double detuning, double control_rabi, double optical_decay,
                        double spin_decay, double peak = 1.0);

/// Output probe intensity of every channel from the coherent superposition of
/// its transmitted local probe, weight (1 − β), and the light transferred from
/// every other illuminated channel, weight β, at the phases ψ_p^{i→j}.
/// `visibility` scales the interference terms. Unnormalized; in channel order.
std::vector<double> channel_intensities(const std::vector<ChannelConfig>& channels, double beta,
                                        double visibility = 1.0);

struct PhaseSweepResult {
  std::vector<double> theta0;
  std::vector<double> i1;
  std::vector<double> i2;
};

/// Sweeps θ₀ by moving the Ch0 control phase; channels 0, 1 and 2 must all be
/// present. Intensities of Ch1 and Ch2 are normalized to a peak of 1 (an
/// all-zero trace stays zero).
PhaseSweepResult phase_sweep(const std::vector<ChannelConfig>& channels,
                             const ReservoirConfig& reservoir, const std::vector<double>& theta0_grid,
                             double visibility = 1.0);

struct TransportPair {
  double t12 = 0.0;
  double t21 = 0.0;
};

/// Resonant transported power between Ch1 and Ch2 with Ch0 illuminated, all
/// probes of equal amplitude: β² |e^{iψ_p^{in→out}} + e^{iψ_p^{0→out}}|² · peak.
TransportPair transport_matrix(double theta0, double theta1, double theta2, double beta,
                               double visibility = 1.0, double peak = 1.0);

struct TransportOptions {
  double visibility = 1.0;
  double peak_transmission = 1.0;
  /// Isolation floor as a fraction of the forward resonant transmission.
  double floor_fraction = 1.0 / 79.4;
  /// Absolute floor; overrides floor_fraction when set.
  std::optional<double> floor;
};

/// Transported power spectrum from `input` into `output` (whose probe must be
/// off), normalized to the input probe power.
std::vector<double> directional_transport(int input, int output,
                                          const std::vector<ChannelConfig>& channels,
                                          const ReservoirConfig& reservoir,
                                          const std::vector<double>& detuning_grid,
                                          const TransportOptions& options = {});

struct TransportResult {
  std::vector<double> detunings;
  std::vector<double> t12;
  std::vector<double> t21;
  double floor = 0.0;
  double isolation_db = 0.0;  // at δ_B = 0
};

/// Both directions between Ch1 and Ch2: for T12 the Ch1 probe is switched on
/// and the Ch2 probe off, and vice versa. Other channels keep their config.
TransportResult transport_spectrum(const std::vector<ChannelConfig>& channels,
                                   const ReservoirConfig& reservoir,
                                   const std::vector<double>& detuning_grid,
                                   const TransportOptions& options = {});

/// 10 log10((T12 + floor)/(T21 + floor)).
double isolation_db(double t12, double t21, double floor);

void write_phase_sweep_csv(std::ostream& out, const PhaseSweepResult& sweep);
void write_transport_csv(std::ostream& out, const TransportResult& result);

}  // namespace spinlink
