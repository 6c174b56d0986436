#include "spinlink/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "spinlink/errors.hpp"

namespace spinlink {

namespace {

using cd = std::complex<double>;

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

double superpose(const std::vector<cd>& terms, double visibility) {
  cd sum = 0.0;
  double incoherent = 0.0;
  for (const auto& t : terms) {
    sum += t;
    incoherent += std::norm(t);
  }
  return visibility * std::norm(sum) + (1.0 - visibility) * incoherent;
}

void require_visibility(double v) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw DomainError("visibility must lie in (0, 1]");
  }
}

const ChannelConfig& find_channel(const std::vector<ChannelConfig>& channels, int id) {
  for (const auto& c : channels) {
    if (c.id == id) return c;
  }
  throw StructuralError("channel " + std::to_string(id) + " is not configured");
}

bool illuminated(const ChannelConfig& c) { return c.probe_on && c.probe_rabi > 0.0; }

}  // namespace

double eit_linewidth(double control_rabi, double optical_decay, double spin_decay) {
  require_positive(control_rabi, "control Rabi frequency");
  require_positive(optical_decay, "optical decay rate");
  require_positive(spin_decay, "spin decay rate");
  return spin_decay + control_rabi * control_rabi / optical_decay;
}

double eit_transmission(double detuning, double control_rabi, double optical_decay,
                        double spin_decay, double peak) {
  const double w = eit_linewidth(control_rabi, optical_decay, spin_decay);
  return peak * w * w / (w * w + detuning * detuning);
}

std::vector<double> channel_intensities(const std::vector<ChannelConfig>& channels, double beta,
                                        double visibility) {
  require_visibility(visibility);
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw DomainError("beam-splitter ratio must lie in [0, 1)");
  }
  std::vector<double> out;
  out.reserve(channels.size());
  for (const auto& target : channels) {
    std::vector<cd> terms;
    if (illuminated(target)) {
      terms.push_back((1.0 - beta) * std::polar(target.probe_rabi, target.probe_phase));
    }
    for (const auto& source : channels) {
      if (source.id == target.id || !illuminated(source)) continue;
      terms.push_back(beta * std::polar(source.probe_rabi, transferred_probe_phase(source, target)));
    }
    out.push_back(superpose(terms, visibility));
  }
  return out;
}

PhaseSweepResult phase_sweep(const std::vector<ChannelConfig>& channels,
                             const ReservoirConfig& reservoir, const std::vector<double>& theta0_grid,
                             double visibility) {
  validate(reservoir);
  for (int id : {0, 1, 2}) find_channel(channels, id);
  const double beta = beam_splitter_ratio(reservoir);

  std::vector<ChannelConfig> work = channels;
  std::size_t ch0 = 0, ch1 = 0, ch2 = 0;
  for (std::size_t k = 0; k < work.size(); ++k) {
    if (work[k].id == 0) ch0 = k;
    if (work[k].id == 1) ch1 = k;
    if (work[k].id == 2) ch2 = k;
  }

  PhaseSweepResult result;
  result.theta0 = theta0_grid;
  for (double theta0 : theta0_grid) {
    work[ch0].control_phase = theta0 + work[ch0].probe_phase;
    const auto intensity = channel_intensities(work, beta, visibility);
    result.i1.push_back(intensity[ch1]);
    result.i2.push_back(intensity[ch2]);
  }
  for (auto* trace : {&result.i1, &result.i2}) {
    const double peak = trace->empty() ? 0.0 : *std::max_element(trace->begin(), trace->end());
    if (peak > 0.0) {
      for (auto& v : *trace) v /= peak;
    }
  }
  return result;
}

TransportPair transport_matrix(double theta0, double theta1, double theta2, double beta,
                               double visibility, double peak) {
  require_visibility(visibility);
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw DomainError("beam-splitter ratio must lie in [0, 1)");
  }
  // With every control phase at zero, ψ_p^{i→j} = −θ_i.
  auto transported = [&](double theta_in) {
    return beta * beta * peak *
           superpose({std::polar(1.0, -theta_in), std::polar(1.0, -theta0)}, visibility);
  };
  return {transported(theta1), transported(theta2)};
}

std::vector<double> directional_transport(int input, int output,
                                          const std::vector<ChannelConfig>& channels,
                                          const ReservoirConfig& reservoir,
                                          const std::vector<double>& detuning_grid,
                                          const TransportOptions& options) {
  if (input == output) {
    throw StructuralError("transport: input and output channel are both " + std::to_string(input));
  }
  validate(reservoir);
  require_visibility(options.visibility);
  const auto& in = find_channel(channels, input);
  const auto& out = find_channel(channels, output);
  if (out.probe_on) {
    throw DomainError("transport: the probe of output channel " + std::to_string(output) +
                      " must be off");
  }
  if (!illuminated(in)) {
    throw DomainError("transport: the probe of input channel " + std::to_string(input) +
                      " must be on");
  }
  const double beta = beam_splitter_ratio(reservoir);
  std::vector<cd> terms;
  for (const auto& source : channels) {
    if (source.id == output || !illuminated(source)) continue;
    terms.push_back(beta * std::polar(source.probe_rabi / in.probe_rabi,
                                      transferred_probe_phase(source, out)));
  }
  const double resonant = superpose(terms, options.visibility);

  std::vector<double> spectrum;
  spectrum.reserve(detuning_grid.size());
  for (std::size_t k = 0; k < detuning_grid.size(); ++k) {
    if (!std::isfinite(detuning_grid[k]) || (k > 0 && !(detuning_grid[k] > detuning_grid[k - 1]))) {
      throw StructuralError("transport: detuning grid must be finite and strictly increasing");
    }
    spectrum.push_back(resonant * eit_transmission(detuning_grid[k], out.control_rabi,
                                                   reservoir.optical_decay, reservoir.spin_decay,
                                                   options.peak_transmission));
  }
  return spectrum;
}

TransportResult transport_spectrum(const std::vector<ChannelConfig>& channels,
                                   const ReservoirConfig& reservoir,
                                   const std::vector<double>& detuning_grid,
                                   const TransportOptions& options) {
  auto configure = [&](int on, int off) {
    std::vector<ChannelConfig> work = channels;
    for (auto& c : work) {
      if (c.id == on) c.probe_on = true;
      if (c.id == off) c.probe_on = false;
    }
    return work;
  };
  const auto forward = configure(1, 2);
  const auto backward = configure(2, 1);

  TransportResult result;
  result.detunings = detuning_grid;
  result.t12 = directional_transport(1, 2, forward, reservoir, detuning_grid, options);
  result.t21 = directional_transport(2, 1, backward, reservoir, detuning_grid, options);

  const double t12_peak = directional_transport(1, 2, forward, reservoir, {0.0}, options).front();
  const double t21_peak = directional_transport(2, 1, backward, reservoir, {0.0}, options).front();
  if (options.floor) {
    result.floor = *options.floor;
  } else {
    const double reference = std::max(t12_peak, t21_peak);
    result.floor = options.floor_fraction * (reference > 0.0 ? reference : 1.0);
  }
  result.isolation_db = isolation_db(t12_peak, t21_peak, result.floor);
  return result;
}

double isolation_db(double t12, double t21, double floor) {
  if (!(floor > 0.0) || !std::isfinite(floor)) {
    throw DomainError("isolation floor must be positive");
  }
  return 10.0 * std::log10((t12 + floor) / (t21 + floor));
}

void write_phase_sweep_csv(std::ostream& out, const PhaseSweepResult& sweep) {
  out << "theta0_rad,i1,i2\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < sweep.theta0.size(); ++k) {
    out << sweep.theta0[k] << ',' << sweep.i1[k] << ',' << sweep.i2[k] << '\n';
  }
  out.precision(old_precision);
}

void write_transport_csv(std::ostream& out, const TransportResult& result) {
  out << "delta_b_rad_s,t12,t21\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < result.detunings.size(); ++k) {
    out << result.detunings[k] << ',' << result.t12[k] << ',' << result.t21[k] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spinlink
