#include "stg/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "stg/error.hpp"

namespace stg {

const char* to_string(LayerKind k) {
    switch (k) {
    case LayerKind::conv3d: return "conv3d";
    case LayerKind::spatial_full: return "spatial_full";
    case LayerKind::full: return "full";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "conv3d") return LayerKind::conv3d;
    if (s == "spatial_full") return LayerKind::spatial_full;
    if (s == "full") return LayerKind::full;
    throw ArgError("unknown layer kind '" + s + "'");
}

static std::string layer_name(std::size_t l, const LayerSpec& ls) {
    return "layer " + std::to_string(l + 1) + " (" + to_string(ls.kind) + ")";
}

std::vector<LayerShape> infer_shapes(const NetSpec& spec, const Dims& input) {
    if (spec.layers.empty())
        throw ShapeError("net has no layers");
    if (spec.input_channels > 0 && spec.input_channels != input.channels)
        throw ShapeError("net expects " + std::to_string(spec.input_channels) +
                         " input channels, video has " + std::to_string(input.channels));

    int c = input.channels, h = input.height, w = input.width, t = input.frames;
    std::vector<LayerShape> shapes;
    shapes.reserve(spec.layers.size());
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const LayerSpec& ls = spec.layers[l];
        if (ls.num_filters < 1)
            throw ShapeError(layer_name(l, ls) + ": needs at least one filter");
        LayerShape s;
        s.num_filters = ls.num_filters;
        s.in_channels = c;
        s.in_h = h;
        s.in_w = w;
        s.in_t = t;
        s.kh = ls.kh;
        s.kw = ls.kw;
        s.kt = ls.kt;
        s.sh = ls.sh;
        s.sw = ls.sw;
        s.st = ls.st;

        switch (ls.kind) {
        case LayerKind::conv3d:
            break;
        case LayerKind::spatial_full:
            if (s.kh == 0) s.kh = h;
            if (s.kw == 0) s.kw = w;
            if (s.kh != h || s.kw != w)
                throw ShapeError(layer_name(l, ls) + ": spatial kernel " + std::to_string(s.kh) +
                                 "x" + std::to_string(s.kw) + " must cover the full " +
                                 std::to_string(h) + "x" + std::to_string(w) + " extent");
            s.sh = s.sw = 1;
            break;
        case LayerKind::full:
            if (s.kh == 0) s.kh = h;
            if (s.kw == 0) s.kw = w;
            if (s.kt == 0) s.kt = t;
            if (s.kh != h || s.kw != w || s.kt != t)
                throw ShapeError(layer_name(l, ls) + ": kernel must cover the full volume");
            s.sh = s.sw = s.st = 1;
            break;
        }
        if (s.kh < 1 || s.kw < 1 || s.kt < 1)
            throw ShapeError(layer_name(l, ls) + ": kernel dimensions must be positive");
        if (s.sh < 1 || s.sw < 1 || s.st < 1)
            throw ShapeError(layer_name(l, ls) + ": strides must be positive");
        if (s.kh > h || s.kw > w || s.kt > t)
            throw ShapeError(layer_name(l, ls) + ": kernel " + std::to_string(s.kh) + "x" +
                             std::to_string(s.kw) + "x" + std::to_string(s.kt) +
                             " exceeds incoming map " + std::to_string(h) + "x" +
                             std::to_string(w) + "x" + std::to_string(t));

        // valid convolution, stride remainder truncates
        s.out_h = (h - s.kh) / s.sh + 1;
        s.out_w = (w - s.kw) / s.sw + 1;
        s.out_t = (t - s.kt) / s.st + 1;

        shapes.push_back(s);
        c = s.num_filters;
        h = s.out_h;
        w = s.out_w;
        t = s.out_t;
    }
    return shapes;
}

static LayerParams zero_layer_params(const LayerShape& s) {
    LayerParams lp;
    lp.num_filters = s.num_filters;
    lp.in_channels = s.in_channels;
    lp.kh = s.kh;
    lp.kw = s.kw;
    lp.kt = s.kt;
    lp.weights.assign(static_cast<std::size_t>(s.num_filters) * s.weights_per_filter(), 0.0);
    lp.biases.assign(static_cast<std::size_t>(s.num_filters), 0.0);
    return lp;
}

NetParams zero_params(const NetSpec& spec, const Dims& input) {
    NetParams p;
    for (const LayerShape& s : infer_shapes(spec, input))
        p.layers.push_back(zero_layer_params(s));
    return p;
}

NetParams init_params(const NetSpec& spec, const Dims& input, Rng& rng, double weight_sd) {
    NetParams p = zero_params(spec, input);
    for (LayerParams& lp : p.layers)
        for (double& w : lp.weights)
            w = weight_sd * rng.normal();
    return p;
}

double params_sq_norm(const NetParams& p) {
    double s = 0.0;
    for (const LayerParams& lp : p.layers) {
        for (double w : lp.weights)
            s += w * w;
        for (double b : lp.biases)
            s += b * b;
    }
    return s;
}

bool params_same_shape(const NetParams& a, const NetParams& b) {
    if (a.layers.size() != b.layers.size())
        return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const LayerParams& x = a.layers[l];
        const LayerParams& y = b.layers[l];
        if (x.num_filters != y.num_filters || x.in_channels != y.in_channels || x.kh != y.kh ||
            x.kw != y.kw || x.kt != y.kt)
            return false;
    }
    return true;
}

void params_axpy(NetParams& dst, double a, const NetParams& g, const std::vector<double>& layer_scales) {
    if (g.layers.size() > dst.layers.size())
        throw ShapeError("params_axpy: gradient has more layers than parameters");
    for (std::size_t l = 0; l < g.layers.size(); ++l) {
        LayerParams& d = dst.layers[l];
        const LayerParams& s = g.layers[l];
        if (d.weights.size() != s.weights.size() || d.biases.size() != s.biases.size())
            throw ShapeError("params_axpy: layer " + std::to_string(l + 1) + " shape mismatch");
        double scale = a * (l < layer_scales.size() ? layer_scales[l] : 1.0);
        for (std::size_t i = 0; i < d.weights.size(); ++i)
            d.weights[i] += scale * s.weights[i];
        for (std::size_t i = 0; i < d.biases.size(); ++i)
            d.biases[i] += scale * s.biases[i];
    }
}

static void check_params_match(const NetParams& params, const std::vector<LayerShape>& shapes) {
    if (params.layers.size() < shapes.size())
        throw ShapeError("params cover " + std::to_string(params.layers.size()) +
                         " layers, net needs " + std::to_string(shapes.size()));
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const LayerShape& s = shapes[l];
        const LayerParams& lp = params.layers[l];
        bool ok = lp.num_filters == s.num_filters && lp.in_channels == s.in_channels &&
                  lp.kh == s.kh && lp.kw == s.kw && lp.kt == s.kt &&
                  static_cast<std::int64_t>(lp.weights.size()) ==
                      static_cast<std::int64_t>(s.num_filters) * s.weights_per_filter() &&
                  static_cast<std::int64_t>(lp.biases.size()) == s.num_filters;
        if (!ok)
            throw ShapeError("layer " + std::to_string(l + 1) + ": parameter block does not match the bound shape");
    }
}

// ---------------------------------------------------------------------------
// forward / backward kernels
// ---------------------------------------------------------------------------

ForwardResult forward(const NetSpec& spec, const NetParams& params, const VideoTensor& video,
                      bool keep_preacts) {
    auto shapes = infer_shapes(spec, video.dims());
    check_params_match(params, shapes);

    ForwardResult r;
    r.maps.reserve(shapes.size() + 1);
    r.maps.push_back(video);
    r.pattern.layers.resize(shapes.size());
    if (keep_preacts)
        r.preacts.resize(shapes.size());
    double min_abs = std::numeric_limits<double>::infinity();

    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const LayerShape& s = shapes[l];
        const LayerParams& lp = params.layers[l];
        const VideoTensor& below = r.maps[l];
        const double* bd = below.data().data();

        VideoTensor out(Dims{s.num_filters, s.out_h, s.out_w, s.out_t});
        auto& delta = r.pattern.layers[l];
        delta.resize(static_cast<std::size_t>(out.size()));
        double* pre = nullptr;
        if (keep_preacts) {
            r.preacts[l].resize(static_cast<std::size_t>(out.size()));
            pre = r.preacts[l].data();
        }

        const long long total = out.size();
        const long long hw = static_cast<long long>(s.out_h) * s.out_w;
        const long long khw = static_cast<long long>(s.num_filters) * hw;
        const std::int64_t block = s.weights_per_filter();
        double layer_min = std::numeric_limits<double>::infinity();

#pragma omp parallel for schedule(static) reduction(min : layer_min)
        for (long long o = 0; o < total; ++o) {
            const int ot = static_cast<int>(o / khw);
            const long long rem = o % khw;
            const int k = static_cast<int>(rem / hw);
            const int oy = static_cast<int>((rem % hw) / s.out_w);
            const int ox = static_cast<int>(rem % s.out_w);

            const int iy0 = oy * s.sh, ix0 = ox * s.sw, it0 = ot * s.st;
            const double* wk = &lp.weights[static_cast<std::size_t>(k) * block];
            double acc = lp.biases[static_cast<std::size_t>(k)];
            for (int i = 0; i < s.in_channels; ++i)
                for (int ks = 0; ks < s.kt; ++ks) {
                    const long long frame_base =
                        (static_cast<long long>(it0 + ks) * s.in_channels + i) * s.in_h;
                    for (int ky = 0; ky < s.kh; ++ky) {
                        const double* row = bd + (frame_base + iy0 + ky) * s.in_w + ix0;
                        const double* wrow = wk + ((static_cast<long long>(i) * s.kh + ky) * s.kw) * s.kt + ks;
                        for (int kx = 0; kx < s.kw; ++kx)
                            acc += wrow[static_cast<long long>(kx) * s.kt] * row[kx];
                    }
                }
            delta[static_cast<std::size_t>(o)] = acc > 0.0 ? 1 : 0;
            out[o] = acc > 0.0 ? acc : 0.0;
            if (pre)
                pre[o] = acc;
            double a = std::fabs(acc);
            if (a < layer_min)
                layer_min = a;
        }
        min_abs = std::min(min_abs, layer_min);
        r.maps.push_back(std::move(out));
    }
    r.min_abs_preact = min_abs;
    return r;
}

static double sum_map(const VideoTensor& m) {
    double s = 0.0;
    for (double e : m.data())
        s += e;
    return s;
}

double score(const NetSpec& spec, const NetParams& params, const VideoTensor& video) {
    ForwardResult r = forward(spec, params, video);
    return sum_map(r.maps.back());
}

BackwardResult backward(const NetSpec& spec, const NetParams& params, const ForwardResult& fwd) {
    auto shapes = infer_shapes(spec, fwd.maps.front().dims());
    check_params_match(params, shapes);
    const std::size_t nl = shapes.size();

    BackwardResult r;
    r.param_grad.layers.resize(nl);

    // d score / d (top map) is 1 everywhere
    std::vector<double> d_above(static_cast<std::size_t>(fwd.maps.back().size()), 1.0);

    for (std::size_t li = nl; li-- > 0;) {
        const LayerShape& s = shapes[li];
        const LayerParams& lp = params.layers[li];
        const VideoTensor& below = fwd.maps[li];
        const auto& delta = fwd.pattern.layers[li];
        const double* bd = below.data().data();

        // gradient stops at non-positive pre-activations
        std::vector<double> dpre(d_above.size());
        const long long total = static_cast<long long>(dpre.size());
#pragma omp parallel for schedule(static)
        for (long long o = 0; o < total; ++o)
            dpre[static_cast<std::size_t>(o)] =
                delta[static_cast<std::size_t>(o)] ? d_above[static_cast<std::size_t>(o)] : 0.0;

        const std::int64_t block = s.weights_per_filter();

        // parameter gradients: one filter per task, accumulation in flat output order
        LayerParams& g = r.param_grad.layers[li];
        g = zero_layer_params(s);
#pragma omp parallel for schedule(static)
        for (int k = 0; k < s.num_filters; ++k) {
            double* gw = &g.weights[static_cast<std::size_t>(k) * block];
            double db = 0.0;
            for (int ot = 0; ot < s.out_t; ++ot)
                for (int oy = 0; oy < s.out_h; ++oy)
                    for (int ox = 0; ox < s.out_w; ++ox) {
                        const std::size_t oidx = static_cast<std::size_t>(
                            ((static_cast<long long>(ot) * s.num_filters + k) * s.out_h + oy) *
                                s.out_w +
                            ox);
                        const double d = dpre[oidx];
                        if (d == 0.0)
                            continue;
                        db += d;
                        const int iy0 = oy * s.sh, ix0 = ox * s.sw, it0 = ot * s.st;
                        for (int i = 0; i < s.in_channels; ++i)
                            for (int ks = 0; ks < s.kt; ++ks) {
                                const long long frame_base =
                                    (static_cast<long long>(it0 + ks) * s.in_channels + i) * s.in_h;
                                for (int ky = 0; ky < s.kh; ++ky) {
                                    const double* row = bd + (frame_base + iy0 + ky) * s.in_w + ix0;
                                    double* grow =
                                        gw + ((static_cast<long long>(i) * s.kh + ky) * s.kw) * s.kt + ks;
                                    for (int kx = 0; kx < s.kw; ++kx)
                                        grow[static_cast<long long>(kx) * s.kt] += d * row[kx];
                                }
                            }
                    }
            g.biases[static_cast<std::size_t>(k)] = db;
        }

        // gradient with respect to the incoming map: gather over the output
        // positions whose kernels touch each coordinate, fixed order per site
        std::vector<double> dbel(static_cast<std::size_t>(below.size()), 0.0);
        const long long btotal = below.size();
        const long long bhw = static_cast<long long>(s.in_h) * s.in_w;
        const long long bchw = static_cast<long long>(s.in_channels) * bhw;
#pragma omp parallel for schedule(static)
        for (long long bi = 0; bi < btotal; ++bi) {
            const int tb = static_cast<int>(bi / bchw);
            const long long rem = bi % bchw;
            const int i = static_cast<int>(rem / bhw);
            const int yb = static_cast<int>((rem % bhw) / s.in_w);
            const int xb = static_cast<int>(rem % s.in_w);

            double acc = 0.0;
            for (int ky = 0; ky < s.kh; ++ky) {
                const int ry = yb - ky;
                if (ry < 0)
                    break;
                if (ry % s.sh != 0)
                    continue;
                const int oy = ry / s.sh;
                if (oy >= s.out_h)
                    continue;
                for (int kx = 0; kx < s.kw; ++kx) {
                    const int rx = xb - kx;
                    if (rx < 0)
                        break;
                    if (rx % s.sw != 0)
                        continue;
                    const int ox = rx / s.sw;
                    if (ox >= s.out_w)
                        continue;
                    for (int ks = 0; ks < s.kt; ++ks) {
                        const int rt = tb - ks;
                        if (rt < 0)
                            break;
                        if (rt % s.st != 0)
                            continue;
                        const int ot = rt / s.st;
                        if (ot >= s.out_t)
                            continue;
                        const long long obase =
                            (static_cast<long long>(ot) * s.num_filters * s.out_h + oy) * s.out_w + ox;
                        const long long ostride = static_cast<long long>(s.out_h) * s.out_w;
                        const std::int64_t widx = lp.weight_index(0, i, ky, kx, ks);
                        for (int k = 0; k < s.num_filters; ++k)
                            acc += lp.weights[static_cast<std::size_t>(widx + k * block)] *
                                   dpre[static_cast<std::size_t>(obase + k * ostride)];
                    }
                }
            }
            dbel[static_cast<std::size_t>(bi)] = acc;
        }

        d_above.swap(dbel);
    }

    r.input_grad = VideoTensor(fwd.maps.front().dims(), std::move(d_above));
    return r;
}

BackwardResult backward(const NetSpec& spec, const NetParams& params, const VideoTensor& video) {
    return backward(spec, params, forward(spec, params, video));
}

VideoTensor grad_input(const NetSpec& spec, const NetParams& params, const VideoTensor& video) {
    return backward(spec, params, video).input_grad;
}

NetParams grad_params(const NetSpec& spec, const NetParams& params, const VideoTensor& video) {
    return backward(spec, params, video).param_grad;
}

AffineDecomposition affine_decomposition(const NetSpec& spec, const NetParams& params,
                                         const VideoTensor& video) {
    ForwardResult fwd = forward(spec, params, video);
    BackwardResult bwd = backward(spec, params, fwd);
    AffineDecomposition d;
    d.b = std::move(bwd.input_grad);
    d.a = sum_map(fwd.maps.back()) - dot(video, d.b);
    return d;
}

// ---------------------------------------------------------------------------
// presets and serialization
// ---------------------------------------------------------------------------

NetSpec preset(const std::string& name) {
    NetSpec spec;
    if (name == "exp1") {
        spec.layers = {
            LayerSpec{LayerKind::conv3d, 120, 15, 15, 15, 7, 7, 7},
            LayerSpec{LayerKind::conv3d, 40, 7, 7, 7, 3, 3, 3},
            LayerSpec{LayerKind::conv3d, 20, 3, 3, 2, 2, 2, 1},
        };
    } else if (name == "exp2") {
        spec.layers = {
            LayerSpec{LayerKind::conv3d, 120, 7, 7, 7, 3, 3, 3},
            LayerSpec{LayerKind::spatial_full, 30, 0, 0, 4, 1, 1, 2},
            LayerSpec{LayerKind::conv3d, 5, 1, 1, 2, 1, 1, 1},
        };
    } else if (name == "exp3") {
        spec.layers = {
            LayerSpec{LayerKind::conv3d, 200, 7, 7, 7, 3, 3, 3},
            LayerSpec{LayerKind::full, 1, 0, 0, 0, 1, 1, 1},
        };
    } else {
        throw ArgError("unknown preset '" + name + "' (expected exp1, exp2 or exp3)");
    }
    return spec;
}

NetSpec truncated(const NetSpec& spec, int n_layers) {
    if (n_layers < 1 || n_layers > static_cast<int>(spec.layers.size()))
        throw ArgError("truncated: layer count out of range");
    NetSpec t;
    t.input_channels = spec.input_channels;
    t.layers.assign(spec.layers.begin(), spec.layers.begin() + n_layers);
    return t;
}

namespace {

std::string dim3(int a, int b, int c) {
    auto piece = [](int v) { return v == 0 ? std::string("full") : std::to_string(v); };
    return piece(a) + "x" + piece(b) + "x" + piece(c);
}

int parse_dim_piece(const std::string& s) {
    if (s == "full")
        return 0;
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size() || v < 0)
        throw FormatError("bad kernel/stride component '" + s + "'");
    return v;
}

void parse_dim3(const std::string& s, int& a, int& b, int& c) {
    std::size_t p1 = s.find('x');
    std::size_t p2 = (p1 == std::string::npos) ? std::string::npos : s.find('x', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw FormatError("expected AxBxC, got '" + s + "'");
    a = parse_dim_piece(s.substr(0, p1));
    b = parse_dim_piece(s.substr(p1 + 1, p2 - p1 - 1));
    c = parse_dim_piece(s.substr(p2 + 1));
}

} // namespace

std::string netspec_to_text(const NetSpec& spec) {
    std::ostringstream os;
    os << "input_channels=" << spec.input_channels << "\n";
    for (const LayerSpec& ls : spec.layers)
        os << "layer=" << to_string(ls.kind) << " " << ls.num_filters << " "
           << dim3(ls.kh, ls.kw, ls.kt) << " " << dim3(ls.sh, ls.sw, ls.st) << "\n";
    return os.str();
}

static LayerSpec parse_layer_line(const std::string& value) {
    std::istringstream is(value);
    std::string kind, kernel, stride;
    int filters = 0;
    if (!(is >> kind >> filters >> kernel >> stride))
        throw FormatError("layer line needs 'kind filters KHxKWxKT SHxSWxST', got '" + value + "'");
    std::string extra;
    if (is >> extra)
        throw FormatError("trailing token '" + extra + "' in layer line");
    LayerSpec ls;
    ls.kind = layer_kind_from_string(kind);
    ls.num_filters = filters;
    parse_dim3(kernel, ls.kh, ls.kw, ls.kt);
    parse_dim3(stride, ls.sh, ls.sw, ls.st);
    if (ls.sh == 0 || ls.sw == 0 || ls.st == 0)
        throw FormatError("stride components must be positive in '" + value + "'");
    return ls;
}

NetSpec netspec_from_text(const std::string& text) {
    NetSpec spec;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t h = line.find('#');
        if (h != std::string::npos)
            line = line.substr(0, h);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
            key.pop_back();
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
            value.erase(value.begin());
        try {
            if (key == "input_channels")
                spec.input_channels = std::stoi(value);
            else if (key == "layer")
                spec.layers.push_back(parse_layer_line(value));
            else
                throw FormatError("unknown key '" + key + "'");
        } catch (const FormatError& err) {
            throw FormatError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    if (spec.layers.empty())
        throw FormatError("net description has no layer lines");
    return spec;
}

// ---------------------------------------------------------------------------
// STP1
// ---------------------------------------------------------------------------

namespace {

constexpr char kParamsMagic[4] = {'S', 'T', 'P', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is)
        throw FormatError(path + ": truncated parameter file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& is, const std::string& path) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is)
        throw FormatError(path + ": truncated parameter file");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
        u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

} // namespace

void write_params(const NetParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out.write(kParamsMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(p.layers.size()));
    for (const LayerParams& lp : p.layers) {
        put_u32(out, static_cast<std::uint32_t>(lp.num_filters));
        put_u32(out, static_cast<std::uint32_t>(lp.in_channels));
        put_u32(out, static_cast<std::uint32_t>(lp.kh));
        put_u32(out, static_cast<std::uint32_t>(lp.kw));
        put_u32(out, static_cast<std::uint32_t>(lp.kt));
        for (double w : lp.weights)
            put_f64(out, w);
        for (double b : lp.biases)
            put_f64(out, b);
    }
    if (!out)
        throw IoError("write failure on " + path);
}

NetParams read_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kParamsMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte 0");
    std::uint32_t nl = get_u32(in, path);
    if (nl == 0 || nl > 64)
        throw FormatError(path + ": implausible layer count " + std::to_string(nl));
    NetParams p;
    for (std::uint32_t l = 0; l < nl; ++l) {
        LayerParams lp;
        lp.num_filters = static_cast<int>(get_u32(in, path));
        lp.in_channels = static_cast<int>(get_u32(in, path));
        lp.kh = static_cast<int>(get_u32(in, path));
        lp.kw = static_cast<int>(get_u32(in, path));
        lp.kt = static_cast<int>(get_u32(in, path));
        std::int64_t nw = static_cast<std::int64_t>(lp.num_filters) * lp.in_channels * lp.kh *
                          lp.kw * lp.kt;
        if (lp.num_filters <= 0 || nw <= 0 || nw > (std::int64_t{1} << 34))
            throw FormatError(path + ": implausible layer geometry");
        lp.weights.resize(static_cast<std::size_t>(nw));
        for (double& w : lp.weights)
            w = get_f64(in, path);
        lp.biases.resize(static_cast<std::size_t>(lp.num_filters));
        for (double& b : lp.biases)
            b = get_f64(in, path);
        p.layers.push_back(std::move(lp));
    }
    return p;
}

} // namespace stg
