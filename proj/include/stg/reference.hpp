#pragma once

#include "stg/net.hpp"
#include "stg/tensor.hpp"

namespace stg::ref {

// Serial direct-summation implementation of the layer recursion. Kept as the
// independent check for the parallel kernels in net.cpp and as the benchmark
// baseline; it shares only the data types, not the loop code.
std::vector<VideoTensor> forward_naive(const NetSpec& spec, const NetParams& params,
                                       const VideoTensor& video);

double score_naive(const NetSpec& spec, const NetParams& params, const VideoTensor& video);

} // namespace stg::ref
