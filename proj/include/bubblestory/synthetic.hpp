#pragma once

#include <cstdint>

#include "bubblestory/dataset.hpp"

namespace bubblestory {

/// Synthetic referendum-style sample: 36 hashtags over 41 monthly periods
/// (2016-01 .. 2019-05). Calibrated so that the mean tweet count is exactly
/// 98, 282 dots lie above it, and those dots form three separated groups in
/// standardized (tweets, retweets) space. Period 2016-06 carries six
/// top-group topics. Unlabeled.
Dataset brexit_shaped_sample(std::uint64_t seed = 2016);

}  // namespace bubblestory
