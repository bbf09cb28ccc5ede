#include "simmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "simmatch/constants.hpp"
#include "simmatch/csv.hpp"
#include "simmatch/errors.hpp"

namespace simmatch {

double eigenvalue_error(const Eigen::VectorXd& output_spectrum, const Eigen::VectorXd& optimal_spectrum) {
  const Eigen::Index n = std::max(output_spectrum.size(), optimal_spectrum.size());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.head(output_spectrum.size()) = output_spectrum;
  b.head(optimal_spectrum.size()) = optimal_spectrum;
  std::sort(a.data(), a.data() + n, std::greater<>());
  std::sort(b.data(), b.data() + n, std::greater<>());
  return (a - b).squaredNorm();
}

double subspace_error(const Eigen::MatrixXd& learned_basis, const Eigen::MatrixXd& true_basis) {
  if (learned_basis.rows() != true_basis.rows()) {
    throw InvalidInput("subspace_error: ambient dimensions differ (" + std::to_string(learned_basis.rows()) +
                       " vs " + std::to_string(true_basis.rows()) + ")");
  }
  if (learned_basis.cols() != true_basis.cols()) {
    throw InvalidInput("subspace_error: bases have different column counts; truncate to the smaller rank first");
  }
  if (learned_basis.cols() == 0) return 0.0;
  const Eigen::MatrixXd diff =
      learned_basis * learned_basis.transpose() - true_basis * true_basis.transpose();
  return diff.squaredNorm();
}

namespace {

WindowedSpectrum spectrum_of(const Eigen::MatrixXd& second_moment, std::int64_t count, bool partial) {
  WindowedSpectrum w;
  w.count = count;
  w.partial = partial;
  w.eigenvalues = count == 0 ? Eigen::VectorXd::Zero(second_moment.rows())
                             : sym_eigenvalues(SymMatrix(second_moment));
  return w;
}

}  // namespace

WindowedSpectrum windowed_spectrum(std::span<const Eigen::VectorXd> vectors, std::int64_t window) {
  if (vectors.empty()) throw InvalidInput("windowed_spectrum: no vectors");
  if (window < 0) throw InvalidInput("windowed_spectrum: negative window");
  const auto available = static_cast<std::int64_t>(vectors.size());
  const std::int64_t used = window == 0 ? available : std::min(window, available);
  const Eigen::Index dim = vectors.front().size();
  Eigen::MatrixXd stacked(used, dim);
  for (std::int64_t i = 0; i < used; ++i) {
    stacked.row(i) = vectors[available - used + i].transpose();
  }
  const Eigen::MatrixXd gram = stacked.transpose() * stacked / static_cast<double>(used);
  return spectrum_of(gram, used, window > 0 && used < window);
}

SlidingGram::SlidingGram(int dim, std::int64_t window) : dim_(dim), window_(window) {
  if (dim < 1) throw InvalidInput("SlidingGram: dim must be >= 1");
  if (window < 0) throw InvalidInput("SlidingGram: negative window");
  if (window == 0) cumulative_ = Eigen::MatrixXd::Zero(dim, dim);
}

void SlidingGram::push(const Eigen::VectorXd& v) {
  if (v.size() != dim_) throw InvalidInput("SlidingGram: vector dimension mismatch");
  ++total_;
  if (window_ == 0) {
    cumulative_.noalias() += v * v.transpose();
    return;
  }
  buffer_.push_back(v);
  if (static_cast<std::int64_t>(buffer_.size()) > window_) buffer_.pop_front();
}

Eigen::MatrixXd SlidingGram::gram() const {
  if (window_ == 0) {
    return total_ == 0 ? cumulative_ : Eigen::MatrixXd(cumulative_ / static_cast<double>(total_));
  }
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(buffer_.size()), dim_);
  Eigen::Index row = 0;
  for (const auto& v : buffer_) stacked.row(row++) = v.transpose();
  if (row == 0) return Eigen::MatrixXd::Zero(dim_, dim_);
  return stacked.transpose() * stacked / static_cast<double>(row);
}

WindowedSpectrum SlidingGram::spectrum() const {
  const std::int64_t n = count();
  return spectrum_of(gram(), n, window_ > 0 && n < window_);
}

StreamReference::StreamReference(SymmetricSpectrum truth, std::vector<Segment> segments)
    : truth_(std::move(truth)), segments_(std::move(segments)) {
  if (segments_.empty()) segments_.push_back(Segment{0, 1.0});
}

StreamReference StreamReference::from(const StreamGenerator& gen) {
  return StreamReference(gen.covariance().spectrum, gen.schedule().segments);
}

double StreamReference::scale_at(std::int64_t t) const {
  double scale = 1.0;
  for (const auto& seg : segments_) {
    if (seg.start > t) break;
    scale = seg.scale;
  }
  return scale;
}

Eigen::VectorXd StreamReference::optimal_spectrum(RegularizerKind kind, double alpha, int k, std::int64_t t) const {
  OfflineProblem p;
  p.input_eigenvalues = scale_at(t) * truth_.eigenvalues;
  p.k = k;
  p.alpha = alpha;
  p.kind = kind;
  p.samples = 1;
  return solve(p).output_eigenvalues;
}

void MetricsLog::append(MetricsRecord record) {
  if (!records.empty() && record.t <= records.back().t) {
    throw InvariantViolation("MetricsLog: t must be strictly increasing");
  }
  auto ok = [](double e) { return std::isfinite(e) && e >= 0.0; };
  if (!ok(record.eigenvalue_error) || !ok(record.subspace_error)) {
    throw InvariantViolation("MetricsLog: errors must be finite and non-negative at t=" + std::to_string(record.t));
  }
  records.push_back(std::move(record));
}

const MetricsRecord* MetricsLog::at(std::int64_t t) const {
  auto it = std::lower_bound(records.begin(), records.end(), t,
                             [](const MetricsRecord& r, std::int64_t v) { return r.t < v; });
  return it != records.end() && it->t == t ? &*it : nullptr;
}

void write_metrics_csv(std::ostream& out, const MetricsLog& log) {
  const Eigen::Index k = log.empty() ? 0 : log.records.front().output_spectrum.size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= k; ++i) header.push_back("y" + std::to_string(i));
  for (int i = 1; i <= kInputSpectrumColumns; ++i) header.push_back("x" + std::to_string(i));
  for (const char* name : {"eigenvalue_error", "subspace_error", "rank", "partial"}) header.emplace_back(name);
  out << csv::join(header) << '\n';
  for (const auto& r : log.records) {
    std::vector<std::string> row{std::to_string(r.t)};
    for (Eigen::Index i = 0; i < k; ++i) row.push_back(csv::format(r.output_spectrum(i)));
    for (int i = 0; i < kInputSpectrumColumns; ++i) {
      row.push_back(i < r.input_spectrum.size() ? csv::format(r.input_spectrum(i)) : "");
    }
    row.push_back(csv::format(r.eigenvalue_error));
    row.push_back(csv::format(r.subspace_error));
    row.push_back(std::to_string(r.rank));
    row.push_back(r.partial_window ? "1" : "0");
    out << csv::join(row) << '\n';
  }
}

}  // namespace simmatch
