#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aqs {

using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Seeded generator over std::mt19937_64.
///
/// Draws are derived from raw 64-bit words with fixed arithmetic so the
/// stream is identical on every platform; the std distributions are
/// implementation-defined and are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer in [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  bool coin() { return (next_u64() >> 63) != 0; }

  /// Independent child stream; same (seed, stream) always yields the same child.
  Rng derive(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Normalized single-qubit pure state alpha|0> + beta|1>.
class Qubit {
 public:
  /// Throws kInvalidArgument unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  Qubit(Amplitude alpha, Amplitude beta);

  Amplitude alpha() const noexcept { return alpha_; }
  Amplitude beta() const noexcept { return beta_; }

  /// Label of the standard state whose amplitudes match exactly (within the
  /// norm tolerance, global phase included), if any.
  std::optional<std::string_view> exact_label() const;

  /// "|0>", "|+>", ... for standard states, amplitude pair otherwise.
  std::string to_string() const;

 private:
  Amplitude alpha_;
  Amplitude beta_;
};

using QubitSeq = std::vector<Qubit>;

enum class Basis { kZ, kX };

/// 2x2 unitary, row-major. Construction rejects non-unitary matrices.
class Unitary2 {
 public:
  Unitary2(Amplitude u00, Amplitude u01, Amplitude u10, Amplitude u11);

  static Unitary2 identity();
  static Unitary2 pauli_x();
  static Unitary2 pauli_y();
  static Unitary2 pauli_z();
  static Unitary2 hadamard();
  /// Haar-distributed via a random unit quaternion plus global phase.
  static Unitary2 random(Rng& rng);

  Amplitude at(int row, int col) const { return m_[row * 2 + col]; }
  Unitary2 adjoint() const;

 private:
  struct Unchecked {};
  Unitary2(Unchecked, std::array<Amplitude, 4> m) : m_(m) {}

  std::array<Amplitude, 4> m_;
};

bool is_standard_label(std::string_view label);

/// "0", "1", "+", "-"; anything else throws kInvalidArgument.
Qubit standard_state(std::string_view label);

/// Basis whose eigenvectors include the labelled state, and the bit that
/// vector encodes (Z: 0->0, 1->1; X: + ->0, - ->1).
Basis basis_of(std::string_view label);
int expected_bit(std::string_view label);

Qubit apply_unitary(const Unitary2& u, const Qubit& q);

struct Measurement {
  int bit;
  Qubit post;
};

/// Projective measurement; outcome 0 corresponds to |0> (Z) or |+> (X).
Measurement measure(const Qubit& q, Basis basis, Rng& rng);

/// Probability of outcome 0 when measuring q in the given basis.
double born_probability_zero(const Qubit& q, Basis basis);

/// |<a|b>|^2, clamped to [0, 1].
double fidelity(const Qubit& a, const Qubit& b);

/// Idealized equality oracle: fidelity >= 1 - epsilon. epsilon in (0, 0.5).
bool ideal_compare(const Qubit& a, const Qubit& b, double epsilon);

/// m repeated SWAP tests; each passes with probability (1 + F) / 2.
/// Returns true ("equal") iff every test passes.
bool swap_test_compare(const Qubit& a, const Qubit& b, std::uint32_t repetitions, Rng& rng);

/// Comparator selection used wherever the protocol compares states.
struct Comparator {
  enum class Kind { kIdeal, kSwapTest };

  Kind kind = Kind::kIdeal;
  double epsilon = 1e-9;
  std::uint32_t repetitions = 1;

  static Comparator ideal(double epsilon = 1e-9);
  static Comparator swap_test(std::uint32_t repetitions);

  bool equal(const Qubit& a, const Qubit& b, Rng& rng) const;
};

}  // namespace aqs
