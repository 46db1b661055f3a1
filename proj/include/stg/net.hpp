#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stg/rng.hpp"
#include "stg/tensor.hpp"

namespace stg {

enum class LayerKind { conv3d, spatial_full, full };

const char* to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

// One layer of the filter bank. Kernel entries of 0 mean "full extent of the
// incoming map": spatial_full resolves kh/kw that way, full resolves all
// three. Strides over resolved-full axes are forced to 1.
struct LayerSpec {
    LayerKind kind = LayerKind::conv3d;
    int num_filters = 1;
    int kh = 0, kw = 0, kt = 0;
    int sh = 1, sw = 1, st = 1;

    bool operator==(const LayerSpec&) const = default;
};

struct NetSpec {
    int input_channels = 0; // 0 = adapt from data
    std::vector<LayerSpec> layers;

    bool operator==(const NetSpec&) const = default;
};

// Concrete per-layer geometry after binding a NetSpec to input dimensions.
struct LayerShape {
    int num_filters = 0;
    int in_channels = 0, in_h = 0, in_w = 0, in_t = 0;
    int kh = 0, kw = 0, kt = 0;
    int sh = 1, sw = 1, st = 1;
    int out_h = 0, out_w = 0, out_t = 0;

    std::int64_t out_count() const {
        return static_cast<std::int64_t>(num_filters) * out_h * out_w * out_t;
    }
    std::int64_t weights_per_filter() const {
        return static_cast<std::int64_t>(in_channels) * kh * kw * kt;
    }
};

// Throws ShapeError naming the offending layer if the chain does not bind.
std::vector<LayerShape> infer_shapes(const NetSpec& spec, const Dims& input);

// Weights of one layer, flat [filter][in_channel][ky][kx][ks], plus biases.
struct LayerParams {
    int num_filters = 0;
    int in_channels = 0;
    int kh = 0, kw = 0, kt = 0;

    std::vector<double> weights;
    std::vector<double> biases;

    std::int64_t weight_index(int k, int i, int y, int x, int s) const {
        return (((static_cast<std::int64_t>(k) * in_channels + i) * kh + y) * kw + x) * kt + s;
    }
    double w(int k, int i, int y, int x, int s) const { return weights[weight_index(k, i, y, x, s)]; }
};

struct NetParams {
    std::vector<LayerParams> layers;
};

NetParams zero_params(const NetSpec& spec, const Dims& input);
// Gaussian weights (mean 0, sd weight_sd), biases 0.
NetParams init_params(const NetSpec& spec, const Dims& input, Rng& rng, double weight_sd = 0.01);

double params_sq_norm(const NetParams& p);
// dst += a * scale_l * g, layer by layer; g may cover fewer layers than dst.
void params_axpy(NetParams& dst, double a, const NetParams& g, const std::vector<double>& layer_scales = {});
bool params_same_shape(const NetParams& a, const NetParams& b);

// Binary maps delta: 1 iff the pre-activation at that output position is > 0.
struct ActivationPattern {
    std::vector<std::vector<std::uint8_t>> layers;

    bool operator==(const ActivationPattern&) const = default;
};

struct ForwardResult {
    // maps[0] is the input, maps[l] the post-ReLU feature map of layer l
    // (channels = filters), in the standard tensor layout.
    std::vector<VideoTensor> maps;
    ActivationPattern pattern;
    // smallest |pre-activation| across the whole net; kink-margin checks use it
    double min_abs_preact = 0.0;
    // raw pre-activations per layer, filled only when requested
    std::vector<std::vector<double>> preacts;
};

ForwardResult forward(const NetSpec& spec, const NetParams& params, const VideoTensor& video,
                      bool keep_preacts = false);

// f(I; w): sum of top-layer responses over filters, positions and frames.
double score(const NetSpec& spec, const NetParams& params, const VideoTensor& video);

struct BackwardResult {
    VideoTensor input_grad; // d f / d input
    NetParams param_grad;   // d f / d (weights, biases)
};

// One shared top-down pass computes both gradients; h'(r) = 1(r > 0).
BackwardResult backward(const NetSpec& spec, const NetParams& params, const VideoTensor& video);
BackwardResult backward(const NetSpec& spec, const NetParams& params, const ForwardResult& fwd);

VideoTensor grad_input(const NetSpec& spec, const NetParams& params, const VideoTensor& video);
NetParams grad_params(const NetSpec& spec, const NetParams& params, const VideoTensor& video);

struct AffineDecomposition {
    double a = 0.0;
    VideoTensor b;
};

// On the linear piece selected by the activation pattern,
// f(I') = a + <I', B> for every I' with the same pattern.
AffineDecomposition affine_decomposition(const NetSpec& spec, const NetParams& params,
                                         const VideoTensor& video);

// Published architectures: exp1 (three conv layers), exp2 (conv + spatially
// fully connected + temporal conv), exp3 (conv + single whole-volume filter).
NetSpec preset(const std::string& name);

// Spec with only the first n layers; scoring under layer-by-layer training.
NetSpec truncated(const NetSpec& spec, int n_layers);

// key=value text form, one layer per line
std::string netspec_to_text(const NetSpec& spec);
NetSpec netspec_from_text(const std::string& text);

// STP1 binary container: magic "STP1", u32 layer count, then per layer five
// u32 (filters, in_channels, kh, kw, kt) and the f64 weight + bias payload,
// all little-endian.
void write_params(const NetParams& p, const std::string& path);
NetParams read_params(const std::string& path);

} // namespace stg
