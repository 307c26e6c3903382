#include "hehdc/data/synth.hpp"

#include <vector>

#include "hehdc/ring/sampling.hpp"

namespace hehdc::data {

Dataset make_blobs(std::size_t classes, std::size_t dim, std::size_t per_class,
                   std::uint64_t seed, double center_spread) {
    ring::Prng rng(seed);
    std::vector<double> centers(classes * dim);
    for (auto& c : centers) c = center_spread * rng.next_gaussian();

    Dataset d;
    d.feature_dim = dim;
    d.num_classes = classes;
    const std::size_t total = classes * per_class;
    d.features.resize(total * dim);
    d.labels.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t cls = i % classes;
        d.labels[i] = static_cast<int>(cls);
        for (std::size_t j = 0; j < dim; ++j)
            d.features[i * dim + j] =
                static_cast<float>(centers[cls * dim + j] + rng.next_gaussian());
    }
    return d;
}

}  // namespace hehdc::data
