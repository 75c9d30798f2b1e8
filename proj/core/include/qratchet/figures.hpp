// Copyright 2026 The qratchet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "qratchet/propagator.hpp"

namespace qratchet {

enum class FigureTag { kFig2, kFig4, kFig5, kFig8, kFig9, kFig10 };

std::string to_string(FigureTag tag);
FigureTag figure_from_string(const std::string& s);

struct FigureOptions {
  // <= 0 keeps the per-figure default grid size.
  int points = 0;
  int workers = 1;
  Scheme scheme = Scheme::kInteractionPicture;
  int steps_per_period = 2048;
  // Running-average length for fig9.
  int periods = 2000;
  bool allow_low_resolution = false;
};

struct FigureResult {
  std::vector<std::string> files;
  int point_errors = 0;
};

// Runs the canned parameter set of the figure and writes plot-ready CSV
// plus manifest.json (parameters used, config hash, code version) into
// out_dir.
FigureResult reproduce_figure(FigureTag tag, const std::string& out_dir,
                              const FigureOptions& options = {});

}  // namespace qratchet
