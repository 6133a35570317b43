#include "qlink/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qlink {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void validate_qubit(const QubitParams& q, const char* name) {
  require_positive(q.omega_idle_ghz, "qubit idle frequency");
  require_positive(q.t1_int_us, "qubit T1");
  require_positive(q.t2_ramsey_us, "qubit T2 Ramsey");
  require_positive(q.t2_echo_us, "qubit T2 echo");
  require_positive(q.lq_nh, "qubit inductance");
  require_probability(q.readout_f_g, name);
  require_probability(q.readout_f_e, name);
}

}  // namespace

void DeviceParams::validate() const {
  validate_qubit(q1, "qubit 1 readout fidelity");
  validate_qubit(q2, "qubit 2 readout fidelity");
  require_positive(channel.z0_ohm, "channel impedance");
  require_positive(channel.alpha_db_per_m, "channel attenuation");
  require_positive(channel.inductance_nh_per_m, "channel inductance per length");
  require_positive(channel.length_m, "channel length");
  require_positive(channel.fsr_mhz, "free spectral range");
  require_positive(channel.mode_freq_ghz, "operating mode frequency");
  require_positive(channel.t1r_int_ns, "intrinsic mode lifetime");
  require_positive(coupler.cq_ff, "qubit capacitance");
  require_positive(coupler.lt_nh, "coupler junction inductance");
  require_positive(coupler.lg_nh, "coupler grounding inductance");
  require_positive(coupler.ls_nh, "stub inductance");
}

HamiltonianModel make_hamiltonian_model(const SpaceLayout& layout,
                                        double fsr_rad_per_ns, Schedule schedule,
                                        double detuning_q1, double detuning_q2) {
  HamiltonianModel m;
  m.layout = layout;
  m.detuning_q1 = detuning_q1;
  m.detuning_q2 = detuning_q2;
  const int n_side = layout.n_side_modes();
  m.mode_detunings.reserve(layout.n_modes());
  for (int n = -n_side; n <= n_side; ++n) m.mode_detunings.push_back(n * fsr_rad_per_ns);
  m.schedule = schedule;
  return m;
}

HamiltonianTerms hamiltonian_terms(const HamiltonianModel& model) {
  const SpaceLayout& layout = model.layout;
  const int n_side = layout.n_side_modes();
  const std::int64_t dim = layout.dimension();
  if (static_cast<int>(model.mode_detunings.size()) != layout.n_modes())
    throw std::invalid_argument("mode detuning list does not match layout");

  HamiltonianTerms terms;
  terms.detuning_diag = model.detuning_q1 * q1_number_diagonal(layout) +
                        model.detuning_q2 * q2_number_diagonal(layout);
  for (int n = -n_side; n <= n_side; ++n)
    terms.detuning_diag += model.mode_detunings[n + n_side] *
                           mode_number_diagonal(layout, n);

  std::vector<Eigen::Triplet<double>> t1, t2;
  if (layout.kind() == LayoutKind::SingleExcitation) {
    for (int n = -n_side; n <= n_side; ++n) {
      const int m = layout.mode_excited_index(n);
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      t1.emplace_back(layout.q1_excited_index(), m, 1.0);
      t1.emplace_back(m, layout.q1_excited_index(), 1.0);
      t2.emplace_back(layout.q2_excited_index(), m, parity);
      t2.emplace_back(m, layout.q2_excited_index(), parity);
    }
  } else {
    const int kq1 = layout.subsystem_index(SubsystemRole::Qubit1);
    const int kq2 = layout.subsystem_index(SubsystemRole::Qubit2);
    const int n_sub = layout.subsystem_count();
    const auto stride = [&](int k) { return std::int64_t{1} << (n_sub - 1 - k); };
    const std::int64_t sq1 = stride(kq1), sq2 = stride(kq2);
    for (int n = -n_side; n <= n_side; ++n) {
      const std::int64_t sm = stride(layout.subsystem_index(SubsystemRole::ChannelMode, n));
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      for (std::int64_t i = 0; i < dim; ++i) {
        // sigma a+ moves |.., e, .., 0, ..> to |.., g, .., 1, ..>.
        if ((i & sq1) && !(i & sm)) {
          const std::int64_t j = (i & ~sq1) | sm;
          t1.emplace_back(j, i, 1.0);
          t1.emplace_back(i, j, 1.0);
        }
        if ((i & sq2) && !(i & sm)) {
          const std::int64_t j = (i & ~sq2) | sm;
          t2.emplace_back(j, i, parity);
          t2.emplace_back(i, j, parity);
        }
      }
    }
  }
  terms.v1.resize(dim, dim);
  terms.v2.resize(dim, dim);
  terms.v1.setFromTriplets(t1.begin(), t1.end());
  terms.v2.setFromTriplets(t2.begin(), t2.end());
  return terms;
}

Operator build_hamiltonian(const HamiltonianModel& model, double t) {
  const double duration = model.schedule.duration();
  if (t < -1e-9 || t > duration + 1e-9)
    throw std::out_of_range("time outside schedule duration");
  const std::int64_t dim = model.layout.dimension();
  if (dim > kMaxDenseDimension)
    throw std::length_error("dense Hamiltonian too large for this layout");

  const HamiltonianTerms terms = hamiltonian_terms(model);
  const Couplings c = model.schedule.at(std::clamp(t, 0.0, duration));
  Matrix h = Matrix::Zero(dim, dim);
  h += (c.g1 * terms.v1).cast<Complex>();
  h += (c.g2 * terms.v2).cast<Complex>();
  h += terms.detuning_diag.cast<Complex>().asDiagonal();
  return {model.layout, std::move(h)};
}

Matrix single_excitation_hamiltonian(double g1, double g2) {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 1) = g1;
  h(1, 0) = g1;
  h(1, 2) = g2;
  h(2, 1) = g2;
  return h;
}

Vector dark_state(double theta) {
  Vector d(3);
  d << std::cos(theta), 0.0, -std::sin(theta);
  return d;
}

EigenStructure eigen_splitting(double g1, double g2) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(single_excitation_hamiltonian(g1, g2));
  EigenStructure out;
  out.energies = es.eigenvalues();
  out.states = es.eigenvectors();
  out.mixing_angle = std::atan2(g1, g2);
  out.gbar = std::hypot(g1, g2);
  return out;
}

}  // namespace qlink
