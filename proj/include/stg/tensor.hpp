#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stg {

struct Dims {
    int channels = 0;
    int height = 0;
    int width = 0;
    int frames = 0;

    bool operator==(const Dims&) const = default;

    std::int64_t count() const {
        return static_cast<std::int64_t>(channels) * height * width * frames;
    }
};

std::string to_string(const Dims& d);

// Dense real-valued video tensor. Layout is frame-major, then channel, then
// row-major within a frame: flat = ((t*C + c)*H + y)*W + x, so one frame
// (all channels) is contiguous. All model math is done in doubles; narrower
// types exist only at the file boundary.
class VideoTensor {
public:
    VideoTensor() = default;
    explicit VideoTensor(Dims d, double fill = 0.0);
    VideoTensor(Dims d, std::vector<double> values);

    const Dims& dims() const { return dims_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    std::int64_t index(int c, int y, int x, int t) const {
        return ((static_cast<std::int64_t>(t) * dims_.channels + c) * dims_.height + y) * dims_.width + x;
    }
    double at(int c, int y, int x, int t) const { return data_[index(c, y, x, t)]; }
    double& at(int c, int y, int x, int t) { return data_[index(c, y, x, t)]; }

    double operator[](std::int64_t i) const { return data_[i]; }
    double& operator[](std::int64_t i) { return data_[i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    Dims dims_;
    std::vector<double> data_;
};

// Binary occlusion indicator aligned with a video: 1 = observed, 0 = occluded.
// One value per (y, x, t) position; it covers all channels of that pixel.
class MaskTensor {
public:
    MaskTensor() = default;
    MaskTensor(int height, int width, int frames, std::uint8_t fill = 1);

    int height() const { return height_; }
    int width() const { return width_; }
    int frames() const { return frames_; }

    std::int64_t index(int y, int x, int t) const {
        return (static_cast<std::int64_t>(t) * height_ + y) * width_ + x;
    }
    std::uint8_t at(int y, int x, int t) const { return data_[index(y, x, t)]; }
    std::uint8_t& at(int y, int x, int t) { return data_[index(y, x, t)]; }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    std::int64_t occluded_count() const;
    double occluded_fraction() const;

    // true when the mask's (h, w, f) agree with the video's
    bool matches(const Dims& d) const {
        return height_ == d.height && width_ == d.width && frames_ == d.frames;
    }

private:
    int height_ = 0, width_ = 0, frames_ = 0;
    std::vector<std::uint8_t> data_;
};

// Reductions run in flat index order so results are reproducible.
double sq_norm(const VideoTensor& v);
double dot(const VideoTensor& a, const VideoTensor& b);

// a*x + y, elementwise; throws ShapeError on dimension mismatch
VideoTensor axpy(double a, const VideoTensor& x, const VideoTensor& y);

void check_finite(const VideoTensor& v, const char* what);

// ---------------------------------------------------------------------------
// STV1 container: magic "STV1"; five little-endian u32 (channels, height,
// width, frames, dtype); raw payload in flat layout order. dtype 0 = u8,
// 1 = f32 little-endian. Masks are STV1 with channels=1, dtype 0 and values
// {0, 255}; 255 maps to 1 on read.
// ---------------------------------------------------------------------------

enum class StvDtype : std::uint32_t { u8 = 0, f32 = 1 };

VideoTensor read_stv(const std::string& path);
void write_stv(const VideoTensor& v, const std::string& path, StvDtype dtype = StvDtype::f32);

MaskTensor read_mask(const std::string& path);
void write_mask(const MaskTensor& m, const std::string& path);

// Rounds to the nearest integer and clamps into [0, 255]; returns the number
// of clamped elements so callers can report clipping.
VideoTensor quantize_u8(const VideoTensor& v, std::int64_t* clamped = nullptr);

// Directory-of-frames exchange for visual inspection: one binary PGM (P5,
// 1 channel) or PPM (P6, 3 channels) file per frame, named frame_%04d.
// Values must already be integers in [0, 255] (see quantize_u8).
void export_frames(const VideoTensor& v, const std::string& dir);
VideoTensor import_frames(const std::string& dir);

} // namespace stg
