#include "fdgcl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fdgcl/errors.hpp"
#include "fdgcl/losses.hpp"
#include "fdgcl/random.hpp"
#include "fdgcl/spectral.hpp"

namespace fdgcl::eval {
namespace {

constexpr Index kExactPairsLimit = 5000;
constexpr int kSampledPairs = 100000;

void check_labels(const Matrix& embeddings, std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != embeddings.rows()) {
    std::ostringstream os;
    os << "embeddings have " << embeddings.rows() << " rows but " << labels.size()
       << " labels were given";
    throw ShapeError(os.str());
  }
  for (int y : labels)
    if (y < 0) throw ShapeError("labels must be non-negative");
}

void check_indices(std::span<const Index> idx, Index n) {
  for (Index i : idx)
    if (i < 0 || i >= n) {
      std::ostringstream os;
      os << "index " << i << " out of range [0, " << n << ")";
      throw ShapeError(os.str());
    }
}

Matrix standardized(const ProbeModel& p, const Matrix& e) {
  return (e.rowwise() - p.mean.transpose()).array().rowwise() / p.scale.transpose().array();
}

Vector pca_spectrum(const Matrix& z) {
  if (z.rows() < 2) throw DegenerateError("PCA needs at least two rows");
  const Matrix zc = z.rowwise() - z.colwise().mean();
  Matrix cov = zc.transpose() * zc / static_cast<double>(z.rows());
  cov = 0.5 * (cov + cov.transpose()).eval();
  Vector values = spectral::eigh(cov).eigenvalues.cwiseMax(0.0).reverse();
  if (!(values.sum() > 0.0)) throw DegenerateError("embeddings have zero variance");
  return values;
}

double variance_participation(const Vector& v) {
  return v.sum() * v.sum() / v.squaredNorm();
}

}  // namespace

ProbeModel train_probe(const Matrix& embeddings, std::span<const int> labels,
                       std::span<const Index> train_idx, double lr, int epochs,
                       std::uint64_t seed, int num_classes) {
  check_labels(embeddings, labels);
  check_indices(train_idx, embeddings.rows());
  if (train_idx.empty()) throw ShapeError("probe needs at least one training row");
  if (num_classes <= 0) num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
  const Index f = embeddings.cols();
  const Index n = static_cast<Index>(train_idx.size());

  Matrix x(n, f);
  Matrix y = Matrix::Zero(n, num_classes);
  for (Index r = 0; r < n; ++r) {
    x.row(r) = embeddings.row(train_idx[r]);
    const int label = labels[train_idx[r]];
    if (label >= num_classes) throw ShapeError("label exceeds num_classes");
    y(r, label) = 1.0;
  }

  ProbeModel p;
  p.mean = x.colwise().mean().transpose();
  const Matrix xc = x.rowwise() - p.mean.transpose();
  p.scale = (xc.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
  for (Index j = 0; j < f; ++j)
    if (!(p.scale[j] > 1e-12)) p.scale[j] = 1.0;
  x = xc.array().rowwise() / p.scale.transpose().array();

  Rng rng(seed, streams::probe);
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Index>(f, 1)));
  p.weights.resize(f, num_classes);
  for (Index i = 0; i < f; ++i)
    for (Index c = 0; c < num_classes; ++c) p.weights(i, c) = rng.uniform(-bound, bound);
  p.bias = Vector::Zero(num_classes);

  for (int e = 0; e < epochs; ++e) {
    Matrix logits = (x * p.weights).rowwise() + p.bias.transpose();
    const Vector row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    Matrix prob = logits.array().exp();
    prob.array().colwise() /= prob.rowwise().sum().array();
    const Matrix g = (prob - y) / static_cast<double>(n);
    p.weights -= lr * x.transpose() * g;
    p.bias -= lr * g.colwise().sum().transpose();
  }
  return p;
}

std::vector<int> predict(const ProbeModel& probe, const Matrix& embeddings) {
  if (embeddings.cols() != probe.weights.rows()) throw ShapeError("probe width mismatch");
  const Matrix logits =
      (standardized(probe, embeddings) * probe.weights).rowwise() + probe.bias.transpose();
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double accuracy(const ProbeModel& probe, const Matrix& embeddings, std::span<const int> labels,
                std::span<const Index> idx) {
  check_labels(embeddings, labels);
  check_indices(idx, embeddings.rows());
  if (idx.empty()) throw ShapeError("accuracy over an empty index set");
  const std::vector<int> pred = predict(probe, embeddings);
  Index correct = 0;
  for (Index i : idx) correct += pred[static_cast<std::size_t>(i)] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

std::vector<ClassRatio> clustering_ratio(const Matrix& embeddings, std::span<const int> labels,
                                         std::uint64_t seed) {
  check_labels(embeddings, labels);
  const Index n = embeddings.rows();
  const int classes = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Index> counts(static_cast<std::size_t>(classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];

  std::vector<int> singletons;
  for (int c = 0; c < classes; ++c)
    if (counts[static_cast<std::size_t>(c)] == 1) singletons.push_back(c);
  if (!singletons.empty()) {
    std::ostringstream os;
    os << "classes with fewer than two members:";
    for (int c : singletons) os << ' ' << c;
    throw SingletonClassError(os.str());
  }

  std::vector<double> intra(static_cast<std::size_t>(classes), 0.0);
  std::vector<double> inter(static_cast<std::size_t>(classes), 0.0);
  std::vector<double> n_intra(static_cast<std::size_t>(classes), 0.0);
  std::vector<double> n_inter(static_cast<std::size_t>(classes), 0.0);
  auto add = [&](Index i, Index j) {
    const double dist = (embeddings.row(i) - embeddings.row(j)).norm();
    const auto a = static_cast<std::size_t>(labels[i]);
    const auto b = static_cast<std::size_t>(labels[j]);
    if (a == b) {
      intra[a] += dist;
      n_intra[a] += 1.0;
    } else {
      inter[a] += dist;
      inter[b] += dist;
      n_inter[a] += 1.0;
      n_inter[b] += 1.0;
    }
  };
  if (n <= kExactPairsLimit) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) add(i, j);
  } else {
    Rng rng(seed, streams::pairs);
    const auto un = static_cast<std::uint64_t>(n);
    for (int s = 0; s < kSampledPairs; ++s) {
      const auto i = static_cast<Index>(rng.below(un));
      auto j = static_cast<Index>(rng.below(un - 1));
      if (j >= i) ++j;
      add(i, j);
    }
  }

  std::vector<ClassRatio> out;
  for (int c = 0; c < classes; ++c) {
    const auto k = static_cast<std::size_t>(c);
    if (counts[k] == 0) continue;
    ClassRatio r;
    r.label = c;
    if (n_intra[k] == 0.0 || n_inter[k] == 0.0) {
      throw DegenerateError("class " + std::to_string(c) + " has no sampled intra or inter pairs");
    }
    r.intra = intra[k] / n_intra[k];
    r.inter = inter[k] / n_inter[k];
    if (!(r.intra > 0.0)) {
      throw DegenerateError("class " + std::to_string(c) +
                            " has zero intra-class distance; r_c is undefined");
    }
    r.ratio = r.inter / r.intra;
    out.push_back(r);
  }
  return out;
}

std::string clustering_csv(const std::vector<ClassRatio>& ratios) {
  std::ostringstream os;
  os << std::setprecision(17) << "class,intra,inter,r_c\n";
  for (const auto& r : ratios) os << r.label << ',' << r.intra << ',' << r.inter << ',' << r.ratio << '\n';
  return os.str();
}

double pca_participation_ratio(const Matrix& z) { return variance_participation(pca_spectrum(z)); }

CollapseReport collapse_report(const Matrix& z1, const Matrix& z2) {
  CollapseReport r;
  r.spectrum1 = pca_spectrum(z1);
  r.spectrum2 = pca_spectrum(z2);
  r.participation1 = variance_participation(r.spectrum1);
  r.participation2 = variance_participation(r.spectrum2);
  r.alignment = losses::view_alignment(z1, z2);
  return r;
}

std::string collapse_csv(const CollapseReport& r) {
  std::ostringstream os;
  os << std::setprecision(17)
     << "component,variance_z1,variance_z2,explained_z1,explained_z2,participation_z1,"
        "participation_z2,alignment\n";
  const double t1 = r.spectrum1.sum();
  const double t2 = r.spectrum2.sum();
  const Index k = std::max(r.spectrum1.size(), r.spectrum2.size());
  for (Index i = 0; i < k; ++i) {
    const double v1 = i < r.spectrum1.size() ? r.spectrum1[i] : 0.0;
    const double v2 = i < r.spectrum2.size() ? r.spectrum2[i] : 0.0;
    os << i << ',' << v1 << ',' << v2 << ',' << v1 / t1 << ',' << v2 / t2 << ',';
    if (i == 0) os << r.participation1 << ',' << r.participation2 << ',' << r.alignment;
    else os << ",,";
    os << '\n';
  }
  return os.str();
}

}  // namespace fdgcl::eval
