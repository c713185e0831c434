#pragma once

#include <string>
#include <utility>
#include <vector>

#include "emtl/analysis.hpp"
#include "emtl/training.hpp"

namespace emtl {

// Scatter CSV `id,label,emotion,pc1,pc2,pc3` covering both views.
void write_scatter_csv(const LegitimacyEmotionViews& views, const EmotionScheme& scheme,
                       const std::string& path);

// One SVG per view: the 3-D cloud rendered as PC1-PC2 and PC1-PC3 panels with
// the fixed emotion color map and a legend. Self-contained, no external assets.
void write_scatter_svg(const LegitimacyView& view, const EmotionScheme& scheme,
                       const std::string& title, const std::string& path);

struct SweepSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (alpha, accuracy)
};

// Line chart with one polyline + markers per series.
void write_sweep_svg(const std::vector<SweepSeries>& series, const std::string& path);

}  // namespace emtl
