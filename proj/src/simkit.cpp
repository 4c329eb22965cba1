#include "forcetrack/simkit.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t run, Channel channel) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ run);
  h = splitmix64(h ^ static_cast<std::uint64_t>(channel));
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t run, Channel channel)
    : engine_(derive_stream_seed(seed, run, channel)) {}

Vector RandomStream::standard_normal(Eigen::Index n) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal_(engine_);
  return z;
}

GaussianSampler::GaussianSampler(const Matrix& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw DimensionError("covariance must be square");
  }
  require_finite(covariance, "covariance");
  if (!is_symmetric(covariance, 1e-10)) {
    throw DefinitenessError("covariance not symmetric");
  }
  const Eigen::Index n = covariance.rows();
  if (covariance.isZero(0.0)) {
    factor_ = Matrix::Zero(n, n);
    return;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(covariance));
  if (eig.info() != Eigen::Success) {
    throw DefinitenessError("covariance eigen-decomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  const double norm = lambda.cwiseAbs().maxCoeff();
  Vector root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda(i) < -1e-12 * norm) {
      throw DefinitenessError("covariance not positive semi-definite");
    }
    root(i) = lambda(i) > 0.0 ? std::sqrt(lambda(i)) : 0.0;
  }
  factor_ = eig.eigenvectors() * root.asDiagonal();
}

Vector GaussianSampler::draw(RandomStream& stream) const {
  return factor_ * stream.standard_normal(factor_.cols());
}

void validate_force(const ForceSignal& signal) {
  std::visit(Overloaded{
                 [](const force::GaussianIid& g) {
                   if (!(g.variance >= 0.0)) throw DomainError("force variance must be >= 0");
                 },
                 [](const force::Piecewise& p) {
                   for (std::size_t i = 1; i < p.segments.size(); ++i) {
                     if (p.segments[i].start <= p.segments[i - 1].start) {
                       throw DomainError("piecewise force steps must be strictly increasing");
                     }
                   }
                 },
                 [](const auto&) {},
             },
             signal);
}

force::FromFile load_force_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open force file " + path.string());
  }
  force::FromFile file;
  file.path = path;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof() || row.empty()) {
      throw ConfigError("force file " + path.string() + " line " + std::to_string(line_no) +
                        ": not a number");
    }
    file.values.push_back(std::move(row));
  }
  return file;
}

Vector sample_force(const ForceSignal& signal, long k, double dt, Eigen::Index m,
                    RandomStream& stream) {
  return std::visit(
      Overloaded{
          [&](const force::Constant& c) -> Vector { return Vector::Constant(m, c.value); },
          [&](const force::Sinusoid& s) -> Vector {
            const double t = static_cast<double>(k) * dt;
            return Vector::Constant(m, s.amplitude * std::sin(s.angular_frequency * t + s.phase));
          },
          [&](const force::GaussianIid& g) -> Vector {
            const double sd = std::sqrt(g.variance);
            Vector f(m);
            for (Eigen::Index i = 0; i < m; ++i) f(i) = g.mean + sd * stream.standard_normal();
            return f;
          },
          [&](const force::Piecewise& p) -> Vector {
            double value = 0.0;
            for (const auto& seg : p.segments) {
              if (seg.start > k) break;
              value = seg.value;
            }
            return Vector::Constant(m, value);
          },
          [&](const force::FromFile& f) -> Vector {
            if (k < 0 || static_cast<std::size_t>(k) >= f.values.size()) {
              throw ExhaustionError("force file " + f.path.string() + " has no value for step " +
                                    std::to_string(k));
            }
            const auto& row = f.values[static_cast<std::size_t>(k)];
            if (static_cast<Eigen::Index>(row.size()) == m) {
              return Eigen::Map<const Vector>(row.data(), m);
            }
            if (row.size() == 1) return Vector::Constant(m, row.front());
            throw DimensionError("force file row " + std::to_string(k) + " has " +
                                 std::to_string(row.size()) + " values, expected " +
                                 std::to_string(m));
          },
      },
      signal);
}

Trajectory simulate(const DiscreteModel& dm, const ForceSignal& signal, const Vector& x0,
                    long steps, std::uint64_t seed, std::uint64_t run) {
  if (steps < 1) throw DomainError("steps must be >= 1");
  if (x0.size() != dm.states()) throw DimensionError("x0 has wrong length");
  validate_force(signal);

  const GaussianSampler process(dm.q);
  const GaussianSampler measurement(dm.r);
  if (psd_check(dm.r).min_eigenvalue <= 0.0) {
    throw DefinitenessError("R not positive definite");
  }

  RandomStream w_stream(seed, run, Channel::kProcessNoise);
  RandomStream v_stream(seed, run, Channel::kMeasurementNoise);
  RandomStream f_stream(seed, run, Channel::kForce);

  Trajectory traj;
  traj.seed = seed;
  traj.run = run;
  traj.records.reserve(static_cast<std::size_t>(steps));

  Vector x = x0;
  for (long k = 0; k < steps; ++k) {
    TrajectoryRecord rec;
    rec.k = k;
    rec.t = static_cast<double>(k) * dm.dt;
    rec.f_true = sample_force(signal, k, dm.dt, dm.inputs(), f_stream);
    rec.y = dm.h * x + measurement.draw(v_stream);
    rec.x_true = x;
    x = dm.a * x + dm.b * rec.f_true + process.draw(w_stream);
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace forcetrack
