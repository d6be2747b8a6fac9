#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace reann {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad arity, unparseable value, empty file).
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Schema problems: unknown class labels, duplicate names, bad fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller (dimension mismatch and friends).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Training diverged or the architecture cannot be trained.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Rule extraction could not complete (missing cluster explanations, DNF blow-up).
class ExtractionError : public Error {
 public:
  using Error::Error;
};

/// Versioned file has the wrong format tag or a missing field.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

/// SplitMix64 stream. Used instead of <random> distributions so weight
/// initialization is bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [low, high].
  double uniform(double low, double high) { return low + (high - low) * unit(); }

  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

 private:
  std::uint64_t state_;
};

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace reann
