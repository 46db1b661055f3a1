#include "stg/reference.hpp"

#include "stg/error.hpp"

namespace stg::ref {

std::vector<VideoTensor> forward_naive(const NetSpec& spec, const NetParams& params,
                                       const VideoTensor& video) {
    if (spec.input_channels > 0 && spec.input_channels != video.dims().channels)
        throw ShapeError("forward_naive: channel mismatch");

    std::vector<VideoTensor> maps;
    maps.push_back(video);

    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const LayerSpec& ls = spec.layers[l];
        const LayerParams& lp = params.layers.at(l);
        const VideoTensor& in = maps.back();
        const Dims& id = in.dims();

        int kh = ls.kh, kw = ls.kw, kt = ls.kt;
        int sh = ls.sh, sw = ls.sw, st = ls.st;
        if (ls.kind == LayerKind::spatial_full) {
            if (kh == 0) kh = id.height;
            if (kw == 0) kw = id.width;
            sh = sw = 1;
        } else if (ls.kind == LayerKind::full) {
            if (kh == 0) kh = id.height;
            if (kw == 0) kw = id.width;
            if (kt == 0) kt = id.frames;
            sh = sw = st = 1;
        }
        if (kh > id.height || kw > id.width || kt > id.frames)
            throw ShapeError("forward_naive: kernel exceeds map at layer " + std::to_string(l + 1));

        int oh = (id.height - kh) / sh + 1;
        int ow = (id.width - kw) / sw + 1;
        int ot = (id.frames - kt) / st + 1;

        VideoTensor out(Dims{ls.num_filters, oh, ow, ot});
        for (int k = 0; k < ls.num_filters; ++k)
            for (int y = 0; y < oh; ++y)
                for (int x = 0; x < ow; ++x)
                    for (int t = 0; t < ot; ++t) {
                        double acc = lp.biases[static_cast<std::size_t>(k)];
                        for (int i = 0; i < id.channels; ++i)
                            for (int ky = 0; ky < kh; ++ky)
                                for (int kx = 0; kx < kw; ++kx)
                                    for (int ks = 0; ks < kt; ++ks)
                                        acc += lp.w(k, i, ky, kx, ks) *
                                               in.at(i, y * sh + ky, x * sw + kx, t * st + ks);
                        out.at(k, y, x, t) = acc > 0.0 ? acc : 0.0;
                    }
        maps.push_back(std::move(out));
    }
    return maps;
}

double score_naive(const NetSpec& spec, const NetParams& params, const VideoTensor& video) {
    auto maps = forward_naive(spec, params, video);
    const VideoTensor& top = maps.back();
    double s = 0.0;
    for (int k = 0; k < top.dims().channels; ++k)
        for (int y = 0; y < top.dims().height; ++y)
            for (int x = 0; x < top.dims().width; ++x)
                for (int t = 0; t < top.dims().frames; ++t)
                    s += top.at(k, y, x, t);
    return s;
}

} // namespace stg::ref
