#include "simmatch/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "simmatch/csv.hpp"
#include "simmatch/errors.hpp"

namespace simmatch {

void SpectrumSpec::validate() const {
  if (tail_count < 0) throw InvalidInput("spectrum spec: tail_count must be >= 0");
  if (tail_low > tail_high) throw InvalidInput("spectrum spec: tail range low > high");
  if (tail_count > 0 && tail_low < 0.0) throw InvalidInput("spectrum spec: negative tail range");
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (!std::isfinite(head[i]) || head[i] < 0.0) {
      throw InvalidInput("spectrum spec: head eigenvalues must be finite and >= 0");
    }
    if (i > 0 && head[i] > head[i - 1]) {
      throw InvalidInput("spectrum spec: head eigenvalues must be descending");
    }
  }
  if (size() < 1) throw InvalidInput("spectrum spec: no eigenvalues");
}

void StreamSchedule::validate() const {
  base.validate();
  if (dim != base.size()) {
    throw InvalidInput("stream schedule: dim " + std::to_string(dim) + " != head + tail count " +
                       std::to_string(base.size()));
  }
  if (segments.empty() || segments.front().start != 0) {
    throw InvalidInput("stream schedule: first segment must start at 0");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].scale > 0.0) || !std::isfinite(segments[i].scale)) {
      throw InvalidInput("stream schedule: segment scales must be positive");
    }
    if (i > 0 && segments[i].start <= segments[i - 1].start) {
      throw InvalidInput("stream schedule: segment starts must be strictly increasing");
    }
  }
}

double StreamSchedule::scale_at(std::int64_t t) const {
  double scale = 1.0;
  for (const auto& seg : segments) {
    if (seg.start > t) break;
    scale = seg.scale;
  }
  return scale;
}

Covariance realize_covariance(const SpectrumSpec& spec, int dim, SeededRng& rng) {
  spec.validate();
  if (spec.size() != dim) {
    throw InvalidInput("realize_covariance: spectrum has " + std::to_string(spec.size()) +
                       " eigenvalues for dimension " + std::to_string(dim));
  }
  std::vector<double> tail(spec.tail_count);
  for (double& v : tail) v = rng.uniform(spec.tail_low, spec.tail_high);
  std::sort(tail.begin(), tail.end(), std::greater<>());

  Eigen::VectorXd lambda(dim);
  int i = 0;
  for (double v : spec.head) lambda(i++) = v;
  for (double v : tail) lambda(i++) = v;
  // Keep the full list descending even if the tail overlaps the head.
  std::stable_sort(lambda.data(), lambda.data() + dim, std::greater<>());

  Eigen::MatrixXd q = random_orthonormal(dim, rng);
  SymMatrix c(q * lambda.asDiagonal() * q.transpose());
  return Covariance{std::move(c), SymmetricSpectrum{lambda, q}};
}

StreamGenerator::StreamGenerator(const StreamSchedule& schedule)
    : schedule_((schedule.validate(), schedule)),
      rng_(schedule.seed),
      covariance_(realize_covariance(schedule.base, schedule.dim, rng_)),
      sqrt_eigenvalues_(covariance_.spectrum.eigenvalues.cwiseSqrt()) {}

Sample StreamGenerator::next() {
  const double amplitude = std::sqrt(schedule_.scale_at(next_t_));
  Eigen::VectorXd z(schedule_.dim);
  for (int i = 0; i < schedule_.dim; ++i) z(i) = rng_.gaussian();
  Sample s;
  s.t = next_t_++;
  s.x = covariance_.spectrum.eigenvectors * (amplitude * sqrt_eigenvalues_.cwiseProduct(z));
  return s;
}

std::vector<Sample> StreamGenerator::take(std::int64_t count) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(next());
  return out;
}

Sample next_sample(StreamGenerator& generator, std::int64_t t) {
  if (t != generator.position()) {
    throw InvalidInput("next_sample: samples must be drawn in order (expected t=" +
                       std::to_string(generator.position()) + ", got " + std::to_string(t) + ")");
  }
  return generator.next();
}

void write_stream_csv(std::ostream& out, const std::vector<Sample>& samples) {
  const int n = samples.empty() ? 0 : static_cast<int>(samples.front().x.size());
  out << 't';
  for (int j = 1; j <= n; ++j) out << ",x" << j;
  out << '\n';
  for (const auto& s : samples) {
    if (s.x.size() != n) throw InvalidInput("write_stream_csv: ragged sample dimensions");
    out << s.t;
    for (int j = 0; j < n; ++j) out << ',' << csv::format(s.x(j));
    out << '\n';
  }
}

std::vector<Sample> read_stream_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("stream csv: missing header");
  const auto header = csv::split(line);
  if (header.empty() || header.front() != "t") throw InvalidInput("stream csv: header must start with 't'");
  const int n = static_cast<int>(header.size()) - 1;
  for (int j = 1; j <= n; ++j) {
    if (header[j] != "x" + std::to_string(j)) throw InvalidInput("stream csv: header column " + std::to_string(j) + " must be 'x" + std::to_string(j) + "'");
  }
  std::vector<Sample> out;
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw InvalidInput("stream csv: row " + std::to_string(row) + " has " +
                         std::to_string(fields.size()) + " fields, expected " + std::to_string(n + 1));
    }
    Sample s;
    s.t = static_cast<std::int64_t>(csv::parse_double(fields[0]));
    s.x.resize(n);
    for (int j = 0; j < n; ++j) s.x(j) = csv::parse_double(fields[j + 1]);
    if (!s.x.allFinite()) throw InvalidInput("stream csv: non-finite value in row " + std::to_string(row));
    if (!out.empty() && s.t <= out.back().t) throw InvalidInput("stream csv: t must increase");
    out.push_back(std::move(s));
    ++row;
  }
  return out;
}

}  // namespace simmatch
