#include "stg/energy.hpp"

#include "stg/error.hpp"

namespace stg {

const char* to_string(RefKind k) {
    return k == RefKind::gaussian ? "gaussian" : "uniform";
}

RefKind ref_kind_from_string(const std::string& s) {
    if (s == "gaussian")
        return RefKind::gaussian;
    if (s == "uniform")
        return RefKind::uniform;
    throw ArgError("unknown reference kind '" + s + "'");
}

static void check_cfg(const ModelConfig& cfg) {
    if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
        throw ArgError("sigma must be finite and positive");
}

double log_unnormalized_density(const NetSpec& spec, const NetParams& params,
                                const ModelConfig& cfg, const VideoTensor& video) {
    check_cfg(cfg);
    double f = score(spec, params, video);
    if (cfg.ref_kind == RefKind::uniform)
        return f;
    return f - sq_norm(video) / (2.0 * cfg.sigma * cfg.sigma);
}

double energy(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
              const VideoTensor& video) {
    return -log_unnormalized_density(spec, params, cfg, video);
}

VideoTensor energy_grad(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
                        const VideoTensor& video) {
    check_cfg(cfg);
    VideoTensor b = grad_input(spec, params, video);
    if (cfg.ref_kind == RefKind::uniform)
        return axpy(-1.0, b, VideoTensor(video.dims(), 0.0));
    // I / sigma^2 - B
    double inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
    VideoTensor g(video.dims());
    for (std::int64_t i = 0; i < g.size(); ++i)
        g[i] = video[i] * inv_s2 - b[i];
    return g;
}

double value_function(const NetSpec& spec, const NetParams& params, const ModelConfig& cfg,
                      const std::vector<VideoTensor>& synthesized,
                      const std::vector<VideoTensor>& observed) {
    if (synthesized.empty() || observed.empty())
        throw ArgError("value_function: both sequence lists must be non-empty");
    double es = 0.0;
    for (const VideoTensor& v : synthesized)
        es += energy(spec, params, cfg, v);
    double eo = 0.0;
    for (const VideoTensor& v : observed)
        eo += energy(spec, params, cfg, v);
    return es / static_cast<double>(synthesized.size()) - eo / static_cast<double>(observed.size());
}

} // namespace stg
