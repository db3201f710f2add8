/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <filesystem>
#include <string>

namespace captrans::runner {

enum class Figure { kWmdBySize, kPplxVsWmd, kWmdByEpoch };

std::string to_string(Figure f);
Figure parse_figure(const std::string& s);

/// Tab-separated plot data from a results CSV (successful rows only):
///   wmd-by-size:  group, x (corpus size), y_mean, y_std, n
///   pplx-vs-wmd:  group, perplexity, wmd, size_label (one line per cell of a
///                 transfer row; means over repeats; fair LM perplexity)
///   wmd-by-epoch: group, epoch, y_mean, y_std, n, overfit_epoch (partial
///                 results; overfit_epoch is the last epoch before the first
///                 non-improving LM in the group, -1 if none)
/// Groups are "<type>/<mode>". y_std is the sample standard deviation (0 for
/// a single value). Returns the number of data lines written.
std::size_t emit_plot_data(const std::filesystem::path& results, Figure figure,
                           const std::filesystem::path& output, const std::string& metric = "wmd");

}  // namespace captrans::runner
