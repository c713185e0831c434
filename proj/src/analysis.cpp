#include "emtl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "emtl/errors.hpp"
#include "json.hpp"

namespace emtl {

namespace {

using json = nlohmann::json;

// Cyclic Jacobi eigendecomposition of a symmetric matrix held row-major in a.
// Deterministic: fixed sweep order, fixed convergence threshold.
void jacobi_eigh(std::vector<double>& a, int n, std::vector<double>& eigvals,
                 std::vector<double>& eigvecs) {
  eigvecs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) eigvecs[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> double& { return eigvecs[static_cast<std::size_t>(i) * n + j]; };

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off <= 1e-28) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < n; ++i) {
          double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          double vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  eigvals.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eigvals[static_cast<std::size_t>(i)] = A(i, i);
}

}  // namespace

FeatureMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open embeddings file: " + path);

  FeatureMatrix fm;
  std::vector<double> flat;
  int dim = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.contains("id") || !obj["id"].is_string() || !obj.contains("vector") ||
        !obj["vector"].is_array())
      throw InvalidInput(path + ":" + std::to_string(line_no) +
                         ": expected {\"id\": str, \"vector\": [floats]}");
    std::vector<double> vec = obj["vector"].get<std::vector<double>>();
    for (double v : vec)
      if (!std::isfinite(v))
        throw InvalidInput(path + ":" + std::to_string(line_no) + ": non-finite vector entry");
    if (dim < 0) dim = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dim)
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": vector width " +
                         std::to_string(vec.size()) + " != " + std::to_string(dim));
    fm.ids.push_back(obj["id"].get<std::string>());
    flat.insert(flat.end(), vec.begin(), vec.end());
  }
  if (fm.ids.empty()) throw InvalidInput(path + ": no embeddings found");
  fm.rows = Tensor({static_cast<int>(fm.ids.size()), dim}, std::move(flat));
  fm.source = FeatureSource::ImportedEmbeddings;
  return fm;
}

PcaResult fit_pca(const FeatureMatrix& features, int k) {
  const int n = features.count();
  const int d = features.dim();
  if (n < 2) throw InvalidInput("fit_pca: need at least 2 rows, got " + std::to_string(n));
  if (k < 1 || k > std::min(n - 1, d))
    throw InvalidInput("fit_pca: k=" + std::to_string(k) + " outside [1, min(rows-1, dim)=" +
                       std::to_string(std::min(n - 1, d)) + "]");
  if (!features.rows.all_finite()) throw InvalidInput("fit_pca: non-finite features");

  PcaResult r;
  r.mean.assign(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) r.mean[static_cast<std::size_t>(j)] += features.rows.at(i, j);
  for (double& m : r.mean) m /= n;

  // sample covariance (n-1 denominator)
  std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      double xa = features.rows.at(i, a) - r.mean[static_cast<std::size_t>(a)];
      for (int b = a; b < d; ++b) {
        double xb = features.rows.at(i, b) - r.mean[static_cast<std::size_t>(b)];
        cov[static_cast<std::size_t>(a) * d + b] += xa * xb;
      }
    }
  double trace = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      cov[static_cast<std::size_t>(a) * d + b] /= (n - 1);
      cov[static_cast<std::size_t>(b) * d + a] = cov[static_cast<std::size_t>(a) * d + b];
    }
    trace += cov[static_cast<std::size_t>(a) * d + a];
  }
  if (trace <= 0.0) throw InvalidInput("fit_pca: zero-variance data");

  std::vector<double> eigvals, eigvecs;
  jacobi_eigh(cov, d, eigvals, eigvecs);

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eigvals[static_cast<std::size_t>(a)] > eigvals[static_cast<std::size_t>(b)];
  });

  for (int c = 0; c < k; ++c) {
    int col = order[static_cast<std::size_t>(c)];
    std::vector<double> comp(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) comp[static_cast<std::size_t>(i)] =
        eigvecs[static_cast<std::size_t>(i) * d + col];
    // sign convention: largest-magnitude entry positive (first index on ties)
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(comp[static_cast<std::size_t>(i)]) > std::abs(comp[static_cast<std::size_t>(arg)]))
        arg = i;
    if (comp[static_cast<std::size_t>(arg)] < 0.0)
      for (double& v : comp) v = -v;
    r.components.push_back(std::move(comp));
    r.explained_variance.push_back(std::max(0.0, eigvals[static_cast<std::size_t>(col)]));
  }
  return r;
}

Tensor project(const FeatureMatrix& features, const PcaResult& pca) {
  const int n = features.count();
  const int d = features.dim();
  const int k = static_cast<int>(pca.components.size());
  if (d != static_cast<int>(pca.mean.size()))
    throw InvalidInput("project: feature dim " + std::to_string(d) + " != pca dim " +
                       std::to_string(pca.mean.size()));

  Tensor coords = Tensor::zeros({n, k});
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) {
      const std::vector<double>& comp = pca.components[static_cast<std::size_t>(c)];
      double s = 0.0;
      for (int j = 0; j < d; ++j)
        s += (features.rows.at(i, j) - pca.mean[static_cast<std::size_t>(j)]) *
             comp[static_cast<std::size_t>(j)];
      coords.at(i, c) = s;
    }
  return coords;
}

LegitimacyEmotionViews legitimacy_emotion_view(const Corpus& corpus, const Tensor& coords,
                                               const EmotionScheme& scheme) {
  if (coords.rank() != 2 || coords.dim(0) != corpus.size())
    throw InvalidInput("legitimacy_emotion_view: coords must be [corpus size, k]");
  const int k = coords.dim(1);

  LegitimacyEmotionViews views;
  views.scheme_name = scheme.name;
  views.view0.label = 0;
  views.view1.label = 1;
  views.view0.emotion_histogram.assign(static_cast<std::size_t>(scheme.n()), 0);
  views.view1.emotion_histogram.assign(static_cast<std::size_t>(scheme.n()), 0);

  for (int i = 0; i < corpus.size(); ++i) {
    const Sample& s = corpus.samples[static_cast<std::size_t>(i)];
    const auto& tag = scheme.kind == SchemeKind::Ekman6 ? s.emotion_ekman : s.emotion_plutchik;
    if (!tag)
      throw InvalidInput("legitimacy_emotion_view: sample \"" + s.id + "\" lacks the " +
                         scheme.name + " tag");
    ViewPoint p;
    p.id = s.id;
    p.emotion = *tag;
    for (int c = 0; c < std::min(k, 3); ++c) p.pc[static_cast<std::size_t>(c)] = coords.at(i, c);
    LegitimacyView& view = s.label == 0 ? views.view0 : views.view1;
    view.points.push_back(std::move(p));
    view.emotion_histogram[static_cast<std::size_t>(*tag)]++;
  }
  return views;
}

}  // namespace emtl
