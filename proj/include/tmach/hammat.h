#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "tmach/json_io.h"
#include "tmach/opalg.h"

namespace tmach {

/// Shape of the smeared delta. Both profiles are even.
struct DeltaProfile {
  enum class Kind { kronecker, gaussian };
  Kind kind = Kind::kronecker;
  double sigma = 0.0;

  static DeltaProfile kronecker() { return {}; }
  static DeltaProfile gaussian(double sigma);
  /// "kronecker" or "gaussian:<sigma>".
  static DeltaProfile parse(const std::string& text);

  /// Value at a time argument x (not in units of T). Kronecker fires only at exactly 0.
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] std::string name() const;
};

struct ModelParams {
  double alpha = 0.3;
  double beta = 0.3;
  double g = 1.0;
  double T = 1.0;
  int N = 3;
  int n_max = 1;
  int M = 4;
  DeltaProfile delta;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
  [[nodiscard]] ParamValues values() const { return {alpha, beta, g}; }
  /// Parameters that are exactly zero are switched off symbolically.
  [[nodiscard]] HamiltonianFlags flags() const { return {alpha != 0.0, beta != 0.0, g != 0.0}; }
};

ojson to_json(const ModelParams& p);

struct FockIndex {
  std::vector<int> n;
  friend auto operator<=>(const FockIndex&, const FockIndex&) = default;
};

std::string to_string(const FockIndex& f);

/// Occupation basis in lexicographic order, region 1 most significant.
class Basis {
 public:
  static constexpr std::size_t max_states = 1'000'000;

  Basis(int regions, int n_max);

  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] int regions() const { return regions_; }
  [[nodiscard]] int n_max() const { return n_max_; }
  [[nodiscard]] const FockIndex& operator[](std::size_t i) const { return states_[i]; }
  [[nodiscard]] const std::vector<FockIndex>& states() const { return states_; }
  /// Throws std::out_of_range for occupations outside the truncated space.
  [[nodiscard]] std::size_t index_of(const FockIndex& f) const;

 private:
  int regions_;
  int n_max_;
  std::vector<FockIndex> states_;
};

Basis enumerate_basis(const ModelParams& params);

/// Time-offset profile of one matrix element: m (t' - t = m*T) -> value.
using DeltaKernel = std::map<int, std::complex<double>>;

struct TruncationReport {
  long dropped_contributions = 0;
};

/// Sparse <n, t| O |n', t'>: (bra index, ket index) -> DeltaKernel.
struct MatrixElementKernel {
  std::map<std::pair<std::size_t, std::size_t>, DeltaKernel> entries;
  TruncationReport truncation;

  [[nodiscard]] std::complex<double> at(std::size_t bra, std::size_t ket, int m) const;
  [[nodiscard]] int max_offset() const;
};

/// Evaluates a normal-ordered sum on the basis. A term's time offset is the sum of its
/// creator shifts minus the sum of its annihilator shifts; its delta factors are
/// evaluated with params.delta at that offset.
MatrixElementKernel kernel_of(const OperatorSum& sum, const ModelParams& params, const Basis& basis);

/// Sum of rational multiples of square roots, keyed by square-free radicand.
class SurdScalar {
 public:
  void add(const Scalar& coeff, std::uint64_t radicand);
  [[nodiscard]] bool is_zero() const { return parts_.empty(); }
  [[nodiscard]] const std::map<std::uint64_t, Scalar>& parts() const { return parts_; }
  [[nodiscard]] std::complex<double> evaluate(const ParamValues& v) const;
  SurdScalar& operator+=(const SurdScalar& o);
  friend bool operator==(const SurdScalar&, const SurdScalar&) = default;

 private:
  std::map<std::uint64_t, Scalar> parts_;
};

std::string to_string(const SurdScalar& s);

/// (bra, ket, offset) -> exact amplitude.
using ExactKernel = std::map<std::tuple<std::size_t, std::size_t, int>, SurdScalar>;

/// Exact counterpart of kernel_of under the lattice Kronecker profile; coefficients
/// keep their parameter monomials.
ExactKernel exact_kernel_of(const OperatorSum& sum, const Basis& basis, TruncationReport* truncation = nullptr);

struct BoundaryReport {
  long dropped_entries = 0;
};

/// Truncated e^{-i H dt} on the joint (occupation x time slot) space, slots -M..M.
/// Joint index = (slot + M) * basis_size + basis index.
struct EvolutionMatrix {
  Eigen::MatrixXcd U;
  std::size_t basis_size = 0;
  int M = 0;
  int order = 0;
  double dt = 0.0;
  BoundaryReport boundary;
  /// max_j ||H^j||_1^{1/j} on the joint space. Exceeds ||H||_1 on a truncated basis,
  /// where the kernel of H^j is not the j-th power of the kernel of H.
  double effective_norm = 0.0;
  /// e^x - sum_{j<=K} x^j/j! with x = dt * effective_norm.
  double remainder_estimate = 0.0;

  [[nodiscard]] std::size_t joint(std::size_t state, int slot) const {
    return static_cast<std::size_t>(slot + M) * basis_size + state;
  }
  [[nodiscard]] int slots() const { return 2 * M + 1; }
};

/// Places a kernel on the joint space: entry (n, n', m) links bra slot s to ket slot s + m.
/// Entries leaving the window are dropped and counted.
Eigen::MatrixXcd joint_matrix(const MatrixElementKernel& kernel, std::size_t basis_size, int M,
                              BoundaryReport* boundary = nullptr);

/// powers[j-1] is the kernel of H^j; uses the first `order` of them.
EvolutionMatrix evolution_series(std::span<const MatrixElementKernel> powers, std::size_t basis_size, int M,
                                 double dt, int order);

/// Kernels of H^1..H^order for the given model.
std::vector<MatrixElementKernel> hamiltonian_kernels(const ModelParams& params, const Basis& basis, int order);

/// Convenience: builds H, its powers, their kernels and the series in one go.
EvolutionMatrix evolve(const ModelParams& params, int order, double dt);

enum class NormKind { frobenius, spectral };

/// ||U^+U - I|| over interior slots |s| <= M - K, or |s| <= interior when given (at most M - K).
/// Throws std::invalid_argument if M < K.
double unitarity_defect(const EvolutionMatrix& U, NormKind norm = NormKind::frobenius,
                        std::optional<int> interior = std::nullopt);

struct InitialAmplitude {
  FockIndex state;
  int slot = 0;
  std::complex<double> amplitude{1.0, 0.0};
};

struct FluxReport {
  std::vector<double> before;  // E[n_i] per region
  std::vector<double> after;   // after renormalizing the evolved vector
  std::vector<double> change;
  double total_change = 0.0;
  /// ||U psi||^2 - ||psi||^2.
  double probability_leak = 0.0;
};

FluxReport flux_asymmetry(const EvolutionMatrix& U, const Basis& basis, std::span<const InitialAmplitude> initial);

/// (n, n', m) with K(n,n')(m) != conj(K(n',n)(-m)) beyond `tol`, if any.
struct HermiticityWitness {
  std::size_t bra;
  std::size_t ket;
  int offset;
  std::complex<double> value;
  std::complex<double> mirror;
};
std::optional<HermiticityWitness> hermiticity_witness(const MatrixElementKernel& k, double tol = 1e-12);

/// CSV "row,col,offset,re,im" for kernels and "row,col,re,im" for matrices (nonzero entries).
std::string kernel_csv(const MatrixElementKernel& k);
std::string matrix_csv(const Eigen::MatrixXcd& m);
ojson to_json(const MatrixElementKernel& k);
ojson to_json(const FluxReport& r);

}  // namespace tmach
