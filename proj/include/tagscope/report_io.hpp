// Copyright 2026 The Tagscope Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tagscope/drift.hpp"
#include "tagscope/social.hpp"
#include "tagscope/spatial.hpp"
#include "tagscope/stats.hpp"
#include "tagscope/temporal.hpp"

// CSV/JSON emitters for the analysis reports. Each returns the files it wrote.
// Numbers are printed with %.10g so outputs are byte-stable for equal inputs.
namespace tagscope::io {

std::string format_number(double value);

std::vector<std::filesystem::path> write_stats(const stats::CorpusSummary& summary, const std::filesystem::path& dir);

/// temporal_profiles.csv: hashtag, 16 series values, 13 features, cluster, label.
/// temporal_clusters.json: per-cluster mean series, size and label, plus the
/// silhouette of every candidate k.
std::vector<std::filesystem::path> write_temporal(const temporal::TemporalReport& report,
                                                  const std::filesystem::path& dir);

/// spatial_categories.csv: category, visits, hashtags, visit_share, hashtag_share, delta.
std::vector<std::filesystem::path> write_spatial(const std::vector<spatial::CategoryStats>& stats,
                                                 const std::filesystem::path& dir);

/// drift_displacement.csv (per hashtag), drift_scatter.csv (per hashtag and
/// year pair) and drift_summary.json (correlations).
std::vector<std::filesystem::path> write_drift(const drift::DisplacementReport& report,
                                               const std::filesystem::path& dir);

/// social_pairs.csv (per pair) and social_summary.json (AUCs, hyperparameters).
std::vector<std::filesystem::path> write_social(const social::PredictionReport& report,
                                                const social::WalkConfig& config, const std::filesystem::path& dir);

}  // namespace tagscope::io
