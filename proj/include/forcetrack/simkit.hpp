#pragma once

// Ground-truth simulation of the discrete system with seeded Gaussian noise.
//
// Every random quantity is drawn from its own sub-stream. A sub-stream is a
// std::mt19937_64 seeded with splitmix64(seed, run, channel), so run i of a
// Monte Carlo ensemble is reproducible in isolation and independent of how
// runs are scheduled across threads.

#include <cstdint>
#include <filesystem>
#include <random>
#include <variant>
#include <vector>

#include "forcetrack/discretize.hpp"
#include "forcetrack/matkernel.hpp"

namespace forcetrack {

enum class Channel : std::uint64_t {
  kProcessNoise = 1,
  kMeasurementNoise = 2,
  kForce = 3,
};

/// splitmix64-based mix of (seed, run, channel) into a 64-bit stream seed.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t run, Channel channel);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t run, Channel channel);

  double standard_normal() { return normal_(engine_); }
  Vector standard_normal(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Draws N(0, Sigma) through a symmetric square root that tolerates singular
// Sigma: eigenvalues down to -1e-12 * ||Sigma|| are treated as zero, so null
// directions receive exactly zero noise.
class GaussianSampler {
 public:
  /// Throws DefinitenessError when Sigma is not symmetric PSD within tolerance.
  explicit GaussianSampler(const Matrix& covariance);

  Vector draw(RandomStream& stream) const;
  const Matrix& factor() const { return factor_; }

 private:
  Matrix factor_;
};

namespace force {

struct Constant {
  double value = 0.0;
};

// amplitude * sin(angular_frequency * t + phase), t = k * dt.
struct Sinusoid {
  double amplitude = 1.0;
  double angular_frequency = 0.0;  // rad/s
  double phase = 0.0;
};

struct GaussianIid {
  double mean = 0.0;
  double variance = 0.0;
};

struct Segment {
  long start = 0;
  double value = 0.0;
};

// Holds segments[i].value from segments[i].start up to the next start.
// Steps before the first start are zero.
struct Piecewise {
  std::vector<Segment> segments;
};

// One line per step; each line holds m whitespace-separated values.
struct FromFile {
  std::filesystem::path path;
  std::vector<std::vector<double>> values;
};

}  // namespace force

using ForceSignal =
    std::variant<force::Constant, force::Sinusoid, force::GaussianIid, force::Piecewise,
                 force::FromFile>;

/// Checks variance >= 0 and strictly increasing piecewise starts; throws DomainError.
void validate_force(const ForceSignal& signal);

/// Reads a force file. Throws IoError when unreadable and ConfigError on a
/// malformed line.
force::FromFile load_force_file(const std::filesystem::path& path);

/// Force at step k as an m-vector; scalar variants fill every component.
/// Gaussian draws consume `stream`. Throws ExhaustionError when a file runs short.
Vector sample_force(const ForceSignal& signal, long k, double dt, Eigen::Index m,
                    RandomStream& stream);

struct TrajectoryRecord {
  long k = 0;
  double t = 0.0;
  Vector x_true;
  Vector y;
  Vector f_true;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
};

/// x_{k+1} = A x_k + B f_k + w_k, y_k = H x_k + v_k for k = 0 .. steps-1.
Trajectory simulate(const DiscreteModel& dm, const ForceSignal& signal, const Vector& x0,
                    long steps, std::uint64_t seed, std::uint64_t run = 0);

}  // namespace forcetrack
