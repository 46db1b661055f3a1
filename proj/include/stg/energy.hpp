#pragma once

#include <vector>

#include "stg/net.hpp"
#include "stg/tensor.hpp"

namespace stg {

enum class RefKind { gaussian, uniform };

const char* to_string(RefKind k);
RefKind ref_kind_from_string(const std::string& s);

struct ModelConfig {
    RefKind ref_kind = RefKind::gaussian;
    double sigma = 1.0;
};

// log p(I; w) up to the reference normalizer and log Z(w), neither of which
// is ever computed: gaussian f(I) - |I|^2 / (2 sigma^2), uniform f(I).
double log_unnormalized_density(const NetSpec& spec, const NetParams& params,
                                const ModelConfig& cfg, const VideoTensor& video);

// E(I; w) = -log_unnormalized_density, exactly.
double energy(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
              const VideoTensor& video);

// gaussian: I / sigma^2 - df/dI; uniform: -df/dI
VideoTensor energy_grad(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
                        const VideoTensor& video);

// mean energy of the synthesized set minus mean energy of the observed set
double value_function(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
                      const std::vector<VideoTensor>& synthesized,
                      const std::vector<VideoTensor>& observed);

} // namespace stg
