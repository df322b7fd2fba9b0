#include "sitesel/selection.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sitesel/errors.hpp"
#include "sitesel/rng.hpp"

namespace sitesel {

namespace {

constexpr std::uint64_t kPulseStream = stream_id("selection/pulse");
constexpr std::uint64_t kBlowAwayStream = stream_id("selection/blow-away");
constexpr std::uint64_t kRepumpStream = stream_id("selection/repump");

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void PulseSpec::validate() const {
  if (!(rabi_frequency > 0.0) || !std::isfinite(rabi_frequency))
    throw InvalidArgument("microwave Rabi frequency must be positive");
  if (!(peak_stark_shift >= 0.0) || !std::isfinite(peak_stark_shift))
    throw InvalidArgument("peak Stark shift must be non-negative");
  if (!std::isfinite(microwave_detuning))
    throw InvalidArgument("microwave detuning must be finite");
}

double PulseSpec::duration() const { return pi / rabi_frequency; }

double PulseSpec::resonant_fraction() const {
  if (peak_stark_shift == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return microwave_detuning / peak_stark_shift;
}

double PulseSpec::window_width() const {
  if (peak_stark_shift == 0.0) return std::numeric_limits<double>::infinity();
  return rabi_frequency / peak_stark_shift;
}

void SelectionSequence::validate() const {
  if (pulses.empty()) throw InvalidArgument("a selection sequence needs at least one pulse");
  for (const auto& p : pulses) p.validate();
  check_probability(blow_away_survival, "blow_away_survival");
  check_probability(repump_loss, "repump_loss");
}

double rabi_flip_probability(double rabi, double detuning) {
  if (!(rabi > 0.0)) throw InvalidArgument("Rabi frequency must be positive");
  const double x = detuning / rabi;
  const double g2 = 1.0 + x * x;
  const double s = std::sin(0.5 * pi * std::sqrt(g2));
  return s * s / g2;
}

double transfer_probability(double eta_c, double eta, double rabi, double stark) {
  if (!(rabi > 0.0)) throw InvalidArgument("Rabi frequency must be positive");
  if (stark < 0.0) throw InvalidArgument("peak Stark shift must be non-negative");
  return rabi_flip_probability(rabi, (eta_c - eta) * stark);
}

double pulse_flip_probability(const PulseSpec& pulse, double stark_fraction) {
  return rabi_flip_probability(pulse.rabi_frequency,
                               pulse.microwave_detuning - pulse.peak_stark_shift * stark_fraction);
}

AtomEnsemble apply_pulse(const AtomEnsemble& ens, const PulseSpec& pulse,
                         const CavityGeometry& geo, std::uint64_t seed,
                         std::size_t pulse_index) {
  pulse.validate();
  AtomEnsemble out = ens;
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    Atom& a = out.atoms[i];
    if (a.spin == Spin::removed) continue;
    if (a.spin == Spin::down) {
      std::ostringstream msg;
      msg << "atom " << i << " is in the lower state; repump before the next pulse";
      throw PreconditionViolation(msg.str());
    }
    const double p = pulse_flip_probability(pulse, stark_fraction(a.z, geo));
    if (unit_uniform(derive_seed(seed, kPulseStream, pulse_index, i)) < p) a.spin = Spin::down;
  }
  return out;
}

AtomEnsemble blow_away(const AtomEnsemble& ens, double survival, std::uint64_t seed,
                       std::size_t pulse_index) {
  check_probability(survival, "blow_away_survival");
  AtomEnsemble out = ens;
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    Atom& a = out.atoms[i];
    if (a.spin != Spin::up) continue;
    const bool survives =
        survival > 0.0 &&
        unit_uniform(derive_seed(seed, kBlowAwayStream, pulse_index, i)) < survival;
    if (!survives) a.spin = Spin::removed;
  }
  return out;
}

AtomEnsemble repump(const AtomEnsemble& ens, double loss, std::uint64_t seed,
                    std::size_t pulse_index) {
  check_probability(loss, "repump_loss");
  AtomEnsemble out = ens;
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    Atom& a = out.atoms[i];
    if (a.spin == Spin::removed) continue;
    if (loss > 0.0 && unit_uniform(derive_seed(seed, kRepumpStream, pulse_index, i)) < loss)
      a.spin = Spin::removed;
    else
      a.spin = Spin::up;
  }
  return out;
}

AtomEnsemble run_sequence(const AtomEnsemble& ens, const SelectionSequence& seq,
                          const CavityGeometry& geo, std::uint64_t seed) {
  seq.validate();
  AtomEnsemble cur = ens;
  for (std::size_t k = 0; k < seq.pulses.size(); ++k) {
    cur = apply_pulse(cur, seq.pulses[k], geo, seed, k);
    cur = blow_away(cur, seq.blow_away_survival, seed, k);
    // Survivors are in the lower state; bring them back up so the next pulse
    // (and the caller) sees a spin-up ensemble.
    if (seq.repump_between || k + 1 == seq.pulses.size())
      cur = repump(cur, seq.repump_loss, seed, k);
  }
  return cur;
}

double round_survival(const PulseSpec& pulse, const SelectionSequence& seq, double s) {
  const double flip = pulse_flip_probability(pulse, s);
  const double kept = flip + (1.0 - flip) * seq.blow_away_survival;
  return kept * (1.0 - seq.repump_loss);
}

DensitySelection select_density(const CouplingDensity& prior, const SelectionSequence& seq,
                                double floor) {
  seq.validate();
  const double before = prior.mass();
  if (!(before > 0.0)) throw DegenerateSelection("prior density carries no mass");
  CouplingDensity cur = prior;
  for (const auto& pulse : seq.pulses) {
    const double width = std::isfinite(pulse.window_width()) ? pulse.window_width() : 1.0;
    cur = cur.with_factor(
        [pulse, seq](double, double s) { return round_survival(pulse, seq, s); }, width);
  }
  const double fraction = cur.mass() / before;
  if (!(fraction >= floor)) {
    std::ostringstream msg;
    msg << "retained fraction " << fraction << " is below the floor " << floor;
    throw DegenerateSelection(msg.str());
  }
  return {std::move(cur), fraction};
}

}  // namespace sitesel
