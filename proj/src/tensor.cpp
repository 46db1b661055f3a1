#include "stg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stg/error.hpp"

namespace stg {

std::string to_string(const Dims& d) {
    std::ostringstream os;
    os << d.channels << "x" << d.height << "x" << d.width << "x" << d.frames;
    return os.str();
}

static void check_dims_valid(const Dims& d) {
    if (d.channels <= 0 || d.height <= 0 || d.width <= 0 || d.frames <= 0)
        throw ShapeError("invalid tensor dimensions " + to_string(d));
    if (d.count() > (std::int64_t{1} << 40))
        throw ShapeError("tensor too large: " + to_string(d));
}

VideoTensor::VideoTensor(Dims d, double fill) : dims_(d) {
    check_dims_valid(d);
    data_.assign(static_cast<std::size_t>(d.count()), fill);
}

VideoTensor::VideoTensor(Dims d, std::vector<double> values) : dims_(d), data_(std::move(values)) {
    check_dims_valid(d);
    if (static_cast<std::int64_t>(data_.size()) != d.count())
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match dimensions " + to_string(d));
}

MaskTensor::MaskTensor(int height, int width, int frames, std::uint8_t fill)
    : height_(height), width_(width), frames_(frames) {
    if (height <= 0 || width <= 0 || frames <= 0)
        throw ShapeError("invalid mask dimensions");
    data_.assign(static_cast<std::size_t>(height) * width * frames, fill);
}

std::int64_t MaskTensor::occluded_count() const {
    std::int64_t n = 0;
    for (std::uint8_t b : data_)
        n += (b == 0);
    return n;
}

double MaskTensor::occluded_fraction() const {
    if (data_.empty())
        return 0.0;
    return static_cast<double>(occluded_count()) / static_cast<double>(data_.size());
}

double sq_norm(const VideoTensor& v) {
    double s = 0.0;
    for (double e : v.data())
        s += e * e;
    return s;
}

double dot(const VideoTensor& a, const VideoTensor& b) {
    if (!(a.dims() == b.dims()))
        throw ShapeError("dot: dimension mismatch " + to_string(a.dims()) + " vs " + to_string(b.dims()));
    double s = 0.0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i)
        s += da[i] * db[i];
    return s;
}

VideoTensor axpy(double a, const VideoTensor& x, const VideoTensor& y) {
    if (!(x.dims() == y.dims()))
        throw ShapeError("axpy: dimension mismatch " + to_string(x.dims()) + " vs " + to_string(y.dims()));
    VideoTensor out(x.dims());
    const auto& dx = x.data();
    const auto& dy = y.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = a * dx[i] + dy[i];
    return out;
}

void check_finite(const VideoTensor& v, const char* what) {
    for (double e : v.data())
        if (!std::isfinite(e))
            throw NumericError(std::string(what) + ": non-finite value encountered");
}

// ---------------------------------------------------------------------------
// STV1
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'T', 'V', '1'};
constexpr std::size_t kHeaderSize = 24;

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    in.seekg(0, std::ios::end);
    auto len = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(len);
    if (len > 0)
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(len));
    if (!in)
        throw IoError("read failure on " + path);
    return bytes;
}

float f32_from_le(const unsigned char* p) {
    std::uint32_t u = read_u32le(p);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void f32_to_le(float f, unsigned char* p) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    p[0] = static_cast<unsigned char>(u & 0xff);
    p[1] = static_cast<unsigned char>((u >> 8) & 0xff);
    p[2] = static_cast<unsigned char>((u >> 16) & 0xff);
    p[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

} // namespace

VideoTensor read_stv(const std::string& path) {
    auto bytes = read_file_bytes(path);
    if (bytes.size() < kHeaderSize)
        throw FormatError(path + ": truncated header (got " + std::to_string(bytes.size()) +
                          " bytes, need 24) at byte 0");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte 0");
    Dims d;
    d.channels = static_cast<int>(read_u32le(&bytes[4]));
    d.height = static_cast<int>(read_u32le(&bytes[8]));
    d.width = static_cast<int>(read_u32le(&bytes[12]));
    d.frames = static_cast<int>(read_u32le(&bytes[16]));
    std::uint32_t dtype = read_u32le(&bytes[20]);
    if (dtype != 0 && dtype != 1)
        throw FormatError(path + ": unsupported dtype flag " + std::to_string(dtype) + " at byte 20");
    if (d.channels <= 0 || d.height <= 0 || d.width <= 0 || d.frames <= 0)
        throw FormatError(path + ": invalid dimensions " + to_string(d) + " at byte 4");
    std::int64_t n = d.count();
    std::size_t elem = (dtype == 0) ? 1 : 4;
    std::size_t need = kHeaderSize + static_cast<std::size_t>(n) * elem;
    if (bytes.size() < need)
        throw FormatError(path + ": truncated payload (expected " + std::to_string(need) +
                          " bytes, got " + std::to_string(bytes.size()) + ") at byte " +
                          std::to_string(bytes.size()));

    VideoTensor v(d);
    auto& dst = v.data();
    const unsigned char* p = bytes.data() + kHeaderSize;
    if (dtype == 0) {
        for (std::int64_t i = 0; i < n; ++i)
            dst[static_cast<std::size_t>(i)] = static_cast<double>(p[i]);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            dst[static_cast<std::size_t>(i)] = static_cast<double>(f32_from_le(p + 4 * i));
    }
    check_finite(v, "read_stv");
    return v;
}

void write_stv(const VideoTensor& v, const std::string& path, StvDtype dtype) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    const Dims& d = v.dims();
    write_u32le(out, static_cast<std::uint32_t>(d.channels));
    write_u32le(out, static_cast<std::uint32_t>(d.height));
    write_u32le(out, static_cast<std::uint32_t>(d.width));
    write_u32le(out, static_cast<std::uint32_t>(d.frames));
    write_u32le(out, static_cast<std::uint32_t>(dtype));

    const auto& src = v.data();
    if (dtype == StvDtype::u8) {
        std::vector<unsigned char> buf(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) {
            double e = src[i];
            if (!(e >= 0.0 && e <= 255.0) || e != std::floor(e))
                throw FormatError("write_stv: value " + std::to_string(e) +
                                  " is not an integer in [0, 255]; quantize first");
            buf[i] = static_cast<unsigned char>(e);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<unsigned char> buf(src.size() * 4);
        for (std::size_t i = 0; i < src.size(); ++i)
            f32_to_le(static_cast<float>(src[i]), &buf[4 * i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out)
        throw IoError("write failure on " + path);
}

MaskTensor read_mask(const std::string& path) {
    VideoTensor v = read_stv(path);
    const Dims& d = v.dims();
    if (d.channels != 1)
        throw FormatError(path + ": mask must have one channel, got " + std::to_string(d.channels));
    MaskTensor m(d.height, d.width, d.frames);
    const auto& src = v.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == 0.0)
            m.data()[i] = 0;
        else if (src[i] == 255.0 || src[i] == 1.0)
            m.data()[i] = 1;
        else
            throw FormatError(path + ": mask value " + std::to_string(src[i]) +
                              " is neither 0 nor 255");
    }
    return m;
}

void write_mask(const MaskTensor& m, const std::string& path) {
    VideoTensor v(Dims{1, m.height(), m.width(), m.frames()});
    for (std::int64_t i = 0; i < m.size(); ++i)
        v[i] = m.data()[static_cast<std::size_t>(i)] ? 255.0 : 0.0;
    write_stv(v, path, StvDtype::u8);
}

VideoTensor quantize_u8(const VideoTensor& v, std::int64_t* clamped) {
    VideoTensor out(v.dims());
    std::int64_t nclamp = 0;
    for (std::int64_t i = 0; i < v.size(); ++i) {
        double e = std::nearbyint(v[i]);
        if (e < 0.0) {
            e = 0.0;
            ++nclamp;
        } else if (e > 255.0) {
            e = 255.0;
            ++nclamp;
        }
        out[i] = e;
    }
    if (clamped)
        *clamped = nclamp;
    return out;
}

// ---------------------------------------------------------------------------
// PGM/PPM frame directories
// ---------------------------------------------------------------------------

namespace {

void write_frame(const VideoTensor& v, int t, const std::string& path) {
    const Dims& d = v.dims();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << (d.channels == 1 ? "P5" : "P6") << "\n" << d.width << " " << d.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(d.width) * d.channels);
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x)
            for (int c = 0; c < d.channels; ++c) {
                double e = v.at(c, y, x, t);
                if (!(e >= 0.0 && e <= 255.0) || e != std::floor(e))
                    throw FormatError("export_frames: value " + std::to_string(e) +
                                      " is not an integer in [0, 255]; quantize first");
                row[static_cast<std::size_t>(x) * d.channels + c] = static_cast<unsigned char>(e);
            }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError("write failure on " + path);
}

// Reads one token from a PNM header, skipping whitespace and # comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

} // namespace

void export_frames(const VideoTensor& v, const std::string& dir) {
    const Dims& d = v.dims();
    if (d.channels != 1 && d.channels != 3)
        throw FormatError("export_frames: only 1- or 3-channel videos supported, got " +
                          std::to_string(d.channels));
    std::filesystem::create_directories(dir);
    const char* ext = d.channels == 1 ? "pgm" : "ppm";
    for (int t = 0; t < d.frames; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.%s", t, ext);
        write_frame(v, t, dir + "/" + name);
    }
}

VideoTensor import_frames(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("frame_", 0) == 0 &&
            (name.size() > 4 && (name.ends_with(".pgm") || name.ends_with(".ppm"))))
            paths.push_back(entry.path().string());
    }
    if (paths.empty())
        throw FormatError("import_frames: no frame_*.pgm or frame_*.ppm files in " + dir);
    std::sort(paths.begin(), paths.end());

    VideoTensor video;
    for (std::size_t t = 0; t < paths.size(); ++t) {
        std::ifstream in(paths[t], std::ios::binary);
        if (!in)
            throw IoError("cannot open " + paths[t]);
        std::string magic = pnm_token(in);
        int channels;
        if (magic == "P5")
            channels = 1;
        else if (magic == "P6")
            channels = 3;
        else
            throw FormatError(paths[t] + ": expected P5 or P6, got '" + magic + "'");
        int w = std::stoi(pnm_token(in));
        int h = std::stoi(pnm_token(in));
        int maxval = std::stoi(pnm_token(in));
        if (maxval != 255)
            throw FormatError(paths[t] + ": only maxval 255 supported");
        if (t == 0)
            video = VideoTensor(Dims{channels, h, w, static_cast<int>(paths.size())});
        else if (channels != video.dims().channels || h != video.dims().height ||
                 w != video.dims().width)
            throw FormatError(paths[t] + ": frame dimensions differ from frame 0");

        std::vector<unsigned char> row(static_cast<std::size_t>(w) * channels);
        for (int y = 0; y < h; ++y) {
            in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
            if (!in)
                throw FormatError(paths[t] + ": truncated pixel data");
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < channels; ++c)
                    video.at(c, y, x, static_cast<int>(t)) =
                        static_cast<double>(row[static_cast<std::size_t>(x) * channels + c]);
        }
    }
    return video;
}

} // namespace stg
