#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmach/hammat.h"
#include "tmach/json_io.h"

namespace tmach {

using cdouble = std::complex<double>;

/// Row equations i d/dt (U_i1, U_i2) = A_i (U_i1, U_i2) with
/// A_i = [[w_i - g, -alpha], [-beta, w_i - g]]. No time shift appears.
struct BogoSystem {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double g = 0.0;

  [[nodiscard]] double omega(int mode) const;
  [[nodiscard]] Eigen::Matrix2d matrix(int mode) const;
  /// alpha*beta == 0 with alpha != beta: A_i is a single Jordan block.
  [[nodiscard]] bool defective() const { return alpha * beta == 0.0 && alpha != beta; }
  /// alpha*beta < 0: complex eigenvalues.
  [[nodiscard]] bool complex_regime() const { return alpha * beta < 0.0; }
};

BogoSystem build_system(const ModelParams& p, double omega1, double omega2);

/// g + sqrt(alpha beta) and g - sqrt(alpha beta): the omegas for which A_i is singular,
/// so that a constant row solves the equations.
std::array<cdouble, 2> stationary_omegas(const ModelParams& p);

/// Closed form: (w_i - g) -/+ sqrt(alpha beta).
std::array<cdouble, 2> eigenvalues_closed_form(const BogoSystem& s, int mode);
/// Numerical eigenvalues of A_i, sorted by real part.
std::array<cdouble, 2> eigenvalues(const BogoSystem& s, int mode);

/// exp(-i A_i t). With B = [[0, alpha], [beta, 0]], B^2 = alpha beta I, so
/// exp(-i A t) = e^{-i(w-g)t} (cos(st) I + i t sinc(st) B), s = sqrt(alpha beta);
/// at s = 0 this is the Jordan-block exponential I + i t B.
Eigen::Matrix2cd propagator(const BogoSystem& s, int mode, double t);

struct TimeGrid {
  double t_max = 10.0;
  int steps = 200;
  [[nodiscard]] std::vector<double> points() const;
};

struct BogoSample {
  double t = 0.0;
  std::array<Eigen::Vector2cd, 2> rows;
};

struct BogoSolution {
  BogoSystem system;
  std::array<Eigen::Vector2cd, 2> initial;
  std::vector<BogoSample> samples;

  [[nodiscard]] Eigen::Vector2cd row(int mode, double t) const;
  /// d/dt of row(mode, t), from the closed form.
  [[nodiscard]] Eigen::Vector2cd derivative(int mode, double t) const;
};

/// Default initial rows are b_i^dagger(0) = a_i^dagger(0): (1,0) and (0,1).
BogoSolution solve(const BogoSystem& s, const TimeGrid& grid = {},
                   const std::array<Eigen::Vector2cd, 2>& initial = {Eigen::Vector2cd(1, 0),
                                                                     Eigen::Vector2cd(0, 1)});

/// Coefficients of the creator dynamics in the basis of mode i:
/// mode 1: (a1+(t), a2+(t-T)); mode 2: (a1+(t+T), a2+(t)). Row j gives
/// i d/dt basis_j = sum_k C_jk basis_k. Derived from the operator equations of motion.
Eigen::Matrix2d creator_dynamics(const ModelParams& p, int mode);

/// max over the grid of |d/dt b_i+ + i w b_i+| as a coefficient vector.
double normal_mode_residual(const BogoSolution& sol, const ModelParams& p, int mode, double omega);

struct ModeGap {
  double coefficient_distance = 0.0;  // max_t |(U_i1, U_i2)(t) - e_i|
  double conjugate_energy = 0.0;      // energy (a_i)+ carries as the adjoint of a_i
  double energy_gap = 0.0;            // |w_i - conjugate_energy|
  std::array<double, 2> printed_gaps{};  // |w_i + (alpha+g)|, |w_i + (beta+g)|
};

struct HermiticityGap {
  std::array<ModeGap, 2> modes;
  bool complex_regime = false;
  [[nodiscard]] double gap() const;
};

HermiticityGap hermiticity_gap(const BogoSolution& sol, const ModelParams& p);

/// t, re/im of U11, U12, U21, U22.
std::string trajectory_csv(const BogoSolution& sol);
ojson to_json(const BogoSystem& s);
ojson to_json(const HermiticityGap& g);
/// System, eigenvalues, residuals per mode and the hermiticity gap.
ojson bogo_report(const BogoSolution& sol, const ModelParams& p);

}  // namespace tmach
