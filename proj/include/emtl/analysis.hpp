#pragma once

#include <array>
#include <string>
#include <vector>

#include "emtl/corpus.hpp"
#include "emtl/emotion.hpp"
#include "emtl/tensor.hpp"

namespace emtl {

enum class FeatureSource { EncoderRepresentation, ImportedEmbeddings };

struct FeatureMatrix {
  std::vector<std::string> ids;  // aligned with rows
  Tensor rows;                   // [n, dim]
  FeatureSource source = FeatureSource::ImportedEmbeddings;

  int count() const { return rows.rank() == 2 ? rows.dim(0) : 0; }
  int dim() const { return rows.rank() == 2 ? rows.dim(1) : 0; }
};

// JSONL lines {"id": str, "vector": [floats]}; all vectors must agree in width
FeatureMatrix load_embeddings(const std::string& path);

struct PcaResult {
  std::vector<double> mean;                  // [dim]
  std::vector<std::vector<double>> components;  // k rows of length dim, orthonormal
  std::vector<double> explained_variance;    // k values, descending
};

// Top-k eigenvectors of the sample covariance via cyclic Jacobi rotations.
// Sign convention: each component's largest-magnitude entry is positive.
PcaResult fit_pca(const FeatureMatrix& features, int k);

// (x - mean) . components -> [n, k]
Tensor project(const FeatureMatrix& features, const PcaResult& pca);

struct ViewPoint {
  std::string id;
  int emotion = 0;
  std::array<double, 3> pc{0.0, 0.0, 0.0};
};

// Samples partitioned by veracity label, each point tagged with its emotion
// class; histogram per view counts emotions and sums to the view size.
struct LegitimacyView {
  int label = 0;
  std::vector<ViewPoint> points;
  std::vector<int> emotion_histogram;  // size scheme.n()
};

struct LegitimacyEmotionViews {
  std::string scheme_name;
  LegitimacyView view0;  // label 0
  LegitimacyView view1;  // label 1
};

// coords must be [n, k>=1] aligned with corpus order; missing emotion tags
// are an error. Coordinates beyond the third component are ignored.
LegitimacyEmotionViews legitimacy_emotion_view(const Corpus& corpus, const Tensor& coords,
                                               const EmotionScheme& scheme);

}  // namespace emtl
