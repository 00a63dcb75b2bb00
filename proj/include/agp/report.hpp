// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "agp/diagnostic.hpp"
#include "agp/intervention.hpp"
#include "agp/vocab.hpp"

namespace agp {

// Five-bin diverging scale centred on chance. Bin edges 0.2, 0.4, 0.6, 0.8;
// bin 0 covers [0, 0.2), bin 4 covers [0.8, 1].
struct HeatmapScale {
  static constexpr std::array<double, 4> kEdges{0.2, 0.4, 0.6, 0.8};
  static constexpr std::array<std::string_view, 5> kColors{"#2166ac", "#92c5de", "#f7f7f7",
                                                           "#f4a582", "#b2182b"};
  static int bin(double accuracy) noexcept;
  static std::string_view color(double accuracy) noexcept { return kColors[bin(accuracy)]; }
};

struct HeatmapOptions {
  std::string title;
  bool annotate = true;
};

std::string matrix_csv(const GeneralizationMatrix& m);
std::string matrix_counts_csv(const GeneralizationMatrix& m);
// One <rect class="cell"> per matrix entry.
std::string matrix_svg(const GeneralizationMatrix& m, const HeatmapOptions& opts = {});

// Writes <prefix>.csv, <prefix>_counts.csv and <prefix>.svg.
void write_matrix(const GeneralizationMatrix& m, const std::string& prefix,
                  const HeatmapOptions& opts = {});

std::string curves_csv(const std::vector<AccuracyCurve>& curves, std::string_view set_label);

std::string intervention_rows_csv(const InterventionReport& r);
std::string intervention_words_csv(const InterventionReport& r, const Vocab& vocab);
// JSON object with the aggregates and an echo of the configuration.
std::string intervention_summary_json(const InterventionReport& r, std::uint64_t seed);

void write_text(const std::string& path, std::string_view text);

}  // namespace agp
