#include "tmach/bogoliubov.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tmach {

namespace {

void check_mode(int mode) {
  if (mode != 1 && mode != 2) throw std::invalid_argument("mode must be 1 or 2");
}

Eigen::Matrix2d coupling(const BogoSystem& s) {
  Eigen::Matrix2d b;
  b << 0.0, s.alpha, s.beta, 0.0;
  return b;
}

}  // namespace

double BogoSystem::omega(int mode) const {
  check_mode(mode);
  return mode == 1 ? omega1 : omega2;
}

Eigen::Matrix2d BogoSystem::matrix(int mode) const {
  const double d = omega(mode) - g;
  Eigen::Matrix2d a;
  a << d, -alpha, -beta, d;
  return a;
}

BogoSystem build_system(const ModelParams& p, double omega1, double omega2) {
  return {omega1, omega2, p.alpha, p.beta, p.g};
}

std::array<cdouble, 2> stationary_omegas(const ModelParams& p) {
  const cdouble s = std::sqrt(cdouble(p.alpha * p.beta));
  return {p.g + s, p.g - s};
}

std::array<cdouble, 2> eigenvalues_closed_form(const BogoSystem& s, int mode) {
  const cdouble root = std::sqrt(cdouble(s.alpha * s.beta));
  const double d = s.omega(mode) - s.g;
  return {d - root, d + root};
}

std::array<cdouble, 2> eigenvalues(const BogoSystem& s, int mode) {
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(s.matrix(mode).cast<cdouble>(), false);
  std::array<cdouble, 2> ev{es.eigenvalues()(0), es.eigenvalues()(1)};
  std::sort(ev.begin(), ev.end(), [](cdouble a, cdouble b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

Eigen::Matrix2cd propagator(const BogoSystem& s, int mode, double t) {
  const cdouble root = std::sqrt(cdouble(s.alpha * s.beta));
  const cdouble x = root * t;
  cdouble c;
  cdouble t_sinc;  // sin(s t)/s
  if (std::abs(x) < 1e-4) {
    const cdouble x2 = x * x;
    c = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
    t_sinc = t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
  } else {
    c = std::cos(x);
    t_sinc = std::sin(x) / root;
  }
  const cdouble phase = std::exp(cdouble(0.0, -(s.omega(mode) - s.g) * t));
  const cdouble i(0.0, 1.0);
  return phase * (c * Eigen::Matrix2cd::Identity() + i * t_sinc * coupling(s).cast<cdouble>());
}

std::vector<double> TimeGrid::points() const {
  if (steps < 1 || !(t_max >= 0.0)) throw std::invalid_argument("time grid needs steps >= 1 and t_max >= 0");
  std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) ts[static_cast<std::size_t>(k)] = t_max * k / steps;
  return ts;
}

Eigen::Vector2cd BogoSolution::row(int mode, double t) const {
  return propagator(system, mode, t) * initial[static_cast<std::size_t>(mode - 1)];
}

Eigen::Vector2cd BogoSolution::derivative(int mode, double t) const {
  return cdouble(0.0, -1.0) * (system.matrix(mode).cast<cdouble>() * row(mode, t));
}

BogoSolution solve(const BogoSystem& s, const TimeGrid& grid, const std::array<Eigen::Vector2cd, 2>& initial) {
  BogoSolution sol{s, initial, {}};
  for (double t : grid.points()) sol.samples.push_back({t, {sol.row(1, t), sol.row(2, t)}});
  return sol;
}

Eigen::Matrix2d creator_dynamics(const ModelParams& p, int mode) {
  check_mode(mode);
  const Hamiltonian h = build_hamiltonian(p.N, p.flags());
  // Basis shifts: mode 1 uses a2+(t-T), mode 2 uses a1+(t+T).
  const std::array<ModeOp, 2> basis =
      mode == 1 ? std::array<ModeOp, 2>{creator(1, 0), creator(2, -1)}
                : std::array<ModeOp, 2>{creator(1, 1), creator(2, 0)};
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int j = 0; j < 2; ++j) {
    const ModeOp& op = basis[static_cast<std::size_t>(j)];
    // Equations are time-translation invariant: shift the unshifted equation.
    for (const auto& term : heisenberg_eom(creator(op.region, 0), h).term_list()) {
      if (term.factors.size() != 1 || !term.deltas.empty()) {
        throw std::logic_error("creator equation of motion is not linear in single modes");
      }
      ModeOp f = term.factors[0];
      f.shift += op.shift;
      const auto* hit = std::find(basis.begin(), basis.end(), f);
      if (hit == basis.end()) throw std::logic_error("creator equation of motion leaves the mode basis");
      c(j, hit - basis.begin()) += term.coeff.evaluate(p.values()).real();
    }
  }
  return c;
}

double normal_mode_residual(const BogoSolution& sol, const ModelParams& p, int mode, double omega) {
  const Eigen::Matrix2cd ct = creator_dynamics(p, mode).transpose().cast<cdouble>();
  const cdouble i(0.0, 1.0);
  double worst = 0.0;
  for (const auto& smp : sol.samples) {
    const Eigen::Vector2cd u = smp.rows[static_cast<std::size_t>(mode - 1)];
    // d/dt (u . X) = (u' - i C^T u) . X for i X' = C X.
    const Eigen::Vector2cd r = sol.derivative(mode, smp.t) - i * (ct * u) + i * omega * u;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double HermiticityGap::gap() const {
  double g = 0.0;
  for (const auto& m : modes) g = std::max({g, m.coefficient_distance, m.energy_gap});
  return g;
}

HermiticityGap hermiticity_gap(const BogoSolution& sol, const ModelParams& p) {
  HermiticityGap out;
  out.complex_regime = sol.system.complex_regime();
  const Hamiltonian h = build_hamiltonian(p.N, p.flags());
  for (int mode = 1; mode <= 2; ++mode) {
    ModeGap& m = out.modes[static_cast<std::size_t>(mode - 1)];
    const Eigen::Vector2cd e = mode == 1 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
    for (const auto& smp : sol.samples) {
      m.coefficient_distance = std::max(m.coefficient_distance, (smp.rows[static_cast<std::size_t>(mode - 1)] - e).norm());
    }
    // i a_i' = E a_i implies i (a_i+)' = -E a_i+ for real couplings.
    const double energy = heisenberg_eom(annihilator(mode), h).coeff({annihilator(mode)}).evaluate(p.values()).real();
    m.conjugate_energy = -energy;
    const double w = sol.system.omega(mode);
    m.energy_gap = std::abs(w - m.conjugate_energy);
    m.printed_gaps = {std::abs(w + (p.alpha + p.g)), std::abs(w + (p.beta + p.g))};
  }
  return out;
}

std::string trajectory_csv(const BogoSolution& sol) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,re_U11,im_U11,re_U12,im_U12,re_U21,im_U21,re_U22,im_U22\n";
  for (const auto& s : sol.samples) {
    os << s.t;
    for (const auto& r : s.rows) {
      for (int k = 0; k < 2; ++k) os << ',' << r(k).real() << ',' << r(k).imag();
    }
    os << '\n';
  }
  return os.str();
}

namespace {

ojson complex_json(cdouble z) { return {{"re", z.real()}, {"im", z.imag()}}; }

ojson matrix_json(const Eigen::Matrix2d& m) {
  return ojson::array({ojson::array({m(0, 0), m(0, 1)}), ojson::array({m(1, 0), m(1, 1)})});
}

}  // namespace

ojson to_json(const BogoSystem& s) {
  ojson j;
  j["omega1"] = s.omega1;
  j["omega2"] = s.omega2;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["g"] = s.g;
  j["A1"] = matrix_json(s.matrix(1));
  j["A2"] = matrix_json(s.matrix(2));
  j["defective"] = s.defective();
  j["complex_regime"] = s.complex_regime();
  return j;
}

ojson to_json(const HermiticityGap& g) {
  ojson j;
  ojson modes = ojson::array();
  for (const auto& m : g.modes) {
    modes.push_back({{"coefficient_distance", m.coefficient_distance},
                     {"conjugate_energy", m.conjugate_energy},
                     {"energy_gap", m.energy_gap},
                     {"printed_gaps", ojson::array({m.printed_gaps[0], m.printed_gaps[1]})}});
  }
  j["modes"] = modes;
  j["gap"] = g.gap();
  j["complex_regime"] = g.complex_regime;
  return j;
}

ojson bogo_report(const BogoSolution& sol, const ModelParams& p) {
  ojson j;
  j["system"] = to_json(sol.system);
  ojson ev;
  for (int mode = 1; mode <= 2; ++mode) {
    ojson e = ojson::array();
    for (auto z : eigenvalues(sol.system, mode)) e.push_back(complex_json(z));
    ev["A" + std::to_string(mode)] = e;
  }
  j["eigenvalues"] = ev;
  const auto st = stationary_omegas(p);
  j["stationary_omegas"] = ojson::array({complex_json(st[0]), complex_json(st[1])});
  if (!sol.samples.empty()) {
    j["grid"] = {{"t_max", sol.samples.back().t}, {"steps", sol.samples.size() - 1}};
  }
  j["residual"] = {{"mode1", normal_mode_residual(sol, p, 1, sol.system.omega1)},
                   {"mode2", normal_mode_residual(sol, p, 2, sol.system.omega2)}};
  j["hermiticity_gap"] = to_json(hermiticity_gap(sol, p));
  if (sol.system.complex_regime()) {
    j["note"] = "alpha*beta < 0: complex eigenvalues, outside the regime of real energies";
  }
  return j;
}

}  // namespace tmach
