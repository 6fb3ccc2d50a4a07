#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fdgcl/types.hpp"

namespace fdgcl::eval {

/// Softmax regression on z-scored embeddings. The standardization statistics
/// come from the training rows and are applied at prediction time.
struct ProbeModel {
  Matrix weights;  // F x C
  Vector bias;     // C
  Vector mean;     // F
  Vector scale;    // F
};

/// Full-batch gradient descent on the mean cross-entropy over `train_idx`.
/// `num_classes` = 0 infers C from the largest label.
ProbeModel train_probe(const Matrix& embeddings, std::span<const int> labels,
                       std::span<const Index> train_idx, double lr = 0.01, int epochs = 300,
                       std::uint64_t seed = 0, int num_classes = 0);

/// Argmax class per row; ties resolve to the lowest index.
std::vector<int> predict(const ProbeModel& probe, const Matrix& embeddings);

double accuracy(const ProbeModel& probe, const Matrix& embeddings, std::span<const int> labels,
                std::span<const Index> idx);

struct ClassRatio {
  int label = 0;
  double intra = 0.0;
  double inter = 0.0;
  double ratio = 0.0;
};

/// r_c = mean inter-class distance / mean intra-class distance (Euclidean).
/// All pairs for N <= 5000, else 100k seeded uniform pairs.
std::vector<ClassRatio> clustering_ratio(const Matrix& embeddings, std::span<const int> labels,
                                         std::uint64_t seed = 0);
std::string clustering_csv(const std::vector<ClassRatio>& ratios);

struct CollapseReport {
  Vector spectrum1;  // PCA variances of view 1, descending
  Vector spectrum2;
  double participation1 = 0.0;
  double participation2 = 0.0;
  double alignment = 0.0;  // |<c1, c2>|
};

/// (sum v)^2 / sum v^2 of the PCA variances of Z.
double pca_participation_ratio(const Matrix& z);
CollapseReport collapse_report(const Matrix& z1, const Matrix& z2);
/// One row per principal component; summary values in the trailing columns of row 0.
std::string collapse_csv(const CollapseReport& report);

}  // namespace fdgcl::eval
