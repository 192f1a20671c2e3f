#include "aqs/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "aqs/error.hpp"

namespace aqs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Born probabilities this close to 0 or 1 are treated as exact so
// eigenstates measure deterministically despite rounding.
double snap_probability(double p) {
  if (p < kNormTolerance) return 0.0;
  if (p > 1.0 - kNormTolerance) return 1.0;
  return p;
}

double gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

// ---------------------------------------------------------------- Rng

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) fail(ErrorCode::kInvalidArgument, "uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return next_u64();
  const std::uint64_t range = span + 1;
  // Reject the top partial bucket.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + x % range;
}

Rng Rng::derive(std::uint64_t stream) const {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

// ---------------------------------------------------------------- Qubit

Qubit::Qubit(Amplitude alpha, Amplitude beta) : alpha_(alpha), beta_(beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "qubit not normalized: |alpha|^2 + |beta|^2 = " << norm;
    fail(ErrorCode::kInvalidArgument, os.str());
  }
}

std::optional<std::string_view> Qubit::exact_label() const {
  static constexpr std::string_view kLabels[] = {"0", "1", "+", "-"};
  for (auto label : kLabels) {
    const Qubit s = standard_state(label);
    if (std::abs(alpha_ - s.alpha()) <= kNormTolerance &&
        std::abs(beta_ - s.beta()) <= kNormTolerance) {
      return label;
    }
  }
  return std::nullopt;
}

std::string Qubit::to_string() const {
  if (auto label = exact_label()) return "|" + std::string(*label) + ">";
  std::ostringstream os;
  os << "(" << alpha_.real() << (alpha_.imag() < 0 ? "-" : "+") << std::abs(alpha_.imag())
     << "i, " << beta_.real() << (beta_.imag() < 0 ? "-" : "+") << std::abs(beta_.imag())
     << "i)";
  return os.str();
}

// ---------------------------------------------------------------- Unitary2

Unitary2::Unitary2(Amplitude u00, Amplitude u01, Amplitude u10, Amplitude u11)
    : m_{u00, u01, u10, u11} {
  // U U^dagger = I, entry by entry.
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      Amplitude sum = 0;
      for (int k = 0; k < 2; ++k) sum += at(r, k) * std::conj(at(c, k));
      const Amplitude want = (r == c) ? 1.0 : 0.0;
      if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()) ||
          std::abs(sum - want) > kUnitaryTolerance) {
        fail(ErrorCode::kInvalidArgument, "matrix is not unitary");
      }
    }
  }
}

Unitary2 Unitary2::identity() { return Unitary2(Unchecked{}, {1.0, 0.0, 0.0, 1.0}); }
Unitary2 Unitary2::pauli_x() { return Unitary2(Unchecked{}, {0.0, 1.0, 1.0, 0.0}); }
Unitary2 Unitary2::pauli_y() {
  return Unitary2(Unchecked{}, {0.0, Amplitude(0, -1), Amplitude(0, 1), 0.0});
}
Unitary2 Unitary2::pauli_z() { return Unitary2(Unchecked{}, {1.0, 0.0, 0.0, -1.0}); }
Unitary2 Unitary2::hadamard() {
  return Unitary2(Unchecked{}, {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2});
}

Unitary2 Unitary2::random(Rng& rng) {
  double q[4];
  double norm = 0;
  do {
    norm = 0;
    for (double& x : q) {
      x = gaussian(rng);
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  const Amplitude a(q[0] / norm, q[1] / norm);
  const Amplitude b(q[2] / norm, q[3] / norm);
  const Amplitude phase = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
  return Unitary2(phase * a, -phase * std::conj(b), phase * b, phase * std::conj(a));
}

Unitary2 Unitary2::adjoint() const {
  return Unitary2(Unchecked{},
                  {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])});
}

// ---------------------------------------------------------------- states

bool is_standard_label(std::string_view label) {
  return label == "0" || label == "1" || label == "+" || label == "-";
}

Qubit standard_state(std::string_view label) {
  if (label == "0") return Qubit(1.0, 0.0);
  if (label == "1") return Qubit(0.0, 1.0);
  if (label == "+") return Qubit(kInvSqrt2, kInvSqrt2);
  if (label == "-") return Qubit(kInvSqrt2, -kInvSqrt2);
  fail(ErrorCode::kInvalidArgument, "unknown state label '" + std::string(label) + "'");
}

Basis basis_of(std::string_view label) {
  if (label == "0" || label == "1") return Basis::kZ;
  if (label == "+" || label == "-") return Basis::kX;
  fail(ErrorCode::kInvalidArgument, "unknown state label '" + std::string(label) + "'");
}

int expected_bit(std::string_view label) {
  if (label == "0" || label == "+") return 0;
  if (label == "1" || label == "-") return 1;
  fail(ErrorCode::kInvalidArgument, "unknown state label '" + std::string(label) + "'");
}

Qubit apply_unitary(const Unitary2& u, const Qubit& q) {
  Amplitude a = u.at(0, 0) * q.alpha() + u.at(0, 1) * q.beta();
  Amplitude b = u.at(1, 0) * q.alpha() + u.at(1, 1) * q.beta();
  // Remove accumulated rounding so the norm invariant holds across long op chains.
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  return Qubit(a / norm, b / norm);
}

double born_probability_zero(const Qubit& q, Basis basis) {
  if (basis == Basis::kZ) return snap_probability(std::norm(q.alpha()));
  return snap_probability(std::norm((q.alpha() + q.beta()) * kInvSqrt2));
}

Measurement measure(const Qubit& q, Basis basis, Rng& rng) {
  const double p0 = born_probability_zero(q, basis);
  const int bit = rng.uniform() < p0 ? 0 : 1;
  const char* label = basis == Basis::kZ ? (bit == 0 ? "0" : "1") : (bit == 0 ? "+" : "-");
  return Measurement{bit, standard_state(label)};
}

double fidelity(const Qubit& a, const Qubit& b) {
  const Amplitude overlap = std::conj(a.alpha()) * b.alpha() + std::conj(a.beta()) * b.beta();
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

bool ideal_compare(const Qubit& a, const Qubit& b, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    fail(ErrorCode::kInvalidArgument, "ideal_compare: epsilon must lie in (0, 0.5)");
  }
  return fidelity(a, b) >= 1.0 - epsilon;
}

bool swap_test_compare(const Qubit& a, const Qubit& b, std::uint32_t repetitions, Rng& rng) {
  if (repetitions == 0) fail(ErrorCode::kInvalidArgument, "swap_test_compare: m must be >= 1");
  const double pass = snap_probability((1.0 + fidelity(a, b)) / 2.0);
  bool all_passed = true;
  // Always draw m values so the stream position does not depend on outcomes.
  for (std::uint32_t i = 0; i < repetitions; ++i) {
    if (!(rng.uniform() < pass)) all_passed = false;
  }
  return all_passed;
}

Comparator Comparator::ideal(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    fail(ErrorCode::kInvalidArgument, "ideal comparator: epsilon must lie in (0, 0.5)");
  }
  Comparator c;
  c.kind = Kind::kIdeal;
  c.epsilon = epsilon;
  return c;
}

Comparator Comparator::swap_test(std::uint32_t repetitions) {
  if (repetitions == 0) fail(ErrorCode::kInvalidArgument, "swap-test comparator: m must be >= 1");
  Comparator c;
  c.kind = Kind::kSwapTest;
  c.repetitions = repetitions;
  return c;
}

bool Comparator::equal(const Qubit& a, const Qubit& b, Rng& rng) const {
  if (kind == Kind::kIdeal) return ideal_compare(a, b, epsilon);
  return swap_test_compare(a, b, repetitions, rng);
}

}  // namespace aqs
