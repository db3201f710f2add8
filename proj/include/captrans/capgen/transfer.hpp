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

#include <string>

#include "captrans/capgen/caption_generator.hpp"
#include "captrans/lm/language_model.hpp"

namespace captrans::capgen {

/// Copies the embedding rows (remapped through the token strings) and the
/// whole GRU from `lm` into `cg`. Frozen mode marks every copied tensor as
/// non-trainable. Softmax and post-image weights are left as initialised.
/// Mode none is a no-op apart from recording it.
///
/// Throws ShapeError when the embedding or state sizes differ and DataError
/// when a caption-generator token is missing from the language model.
void transfer_prefix_params(const lm::LanguageModel& lm, CaptionGenerator& cg, TransferMode mode);

}  // namespace captrans::capgen
