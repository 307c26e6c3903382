#pragma once

#include <cstdint>

#include "hehdc/data/dataset.hpp"

namespace hehdc::data {

// Gaussian blobs with class centers spread wide enough to be linearly
// separable at the default settings. Sample i belongs to class i % classes.
Dataset make_blobs(std::size_t classes, std::size_t dim, std::size_t per_class,
                   std::uint64_t seed, double center_spread = 5.0);

}  // namespace hehdc::data
