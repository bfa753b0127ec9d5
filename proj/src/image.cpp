#include "qnopt/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qnopt {

namespace {

struct AxisSample {
    std::size_t i0 = 0;
    double frac = 0.0;
    bool clamped = false;  // derivative along this axis is zero
};

AxisSample sample_axis(double coord, std::size_t extent) {
    AxisSample s;
    if (extent == 1) {
        s.clamped = true;
        return s;
    }
    double t = coord - 0.5;  // pixel-center lattice coordinate
    const double tmax = static_cast<double>(extent - 1);
    if (t < 0.0 || t > tmax) {
        s.clamped = true;
        t = std::clamp(t, 0.0, tmax);
    }
    s.i0 = std::min(static_cast<std::size_t>(t), extent - 2);
    s.frac = t - static_cast<double>(s.i0);
    return s;
}

}  // namespace

InterpSample interp_bilinear(const ImageBuffer& img, double x, double y) {
    if (img.width == 0 || img.height == 0 || img.intensities.size() != img.width * img.height)
        throw std::invalid_argument("interp_bilinear: malformed image buffer");

    const AxisSample ax = sample_axis(x, img.width);
    const AxisSample ay = sample_axis(y, img.height);
    const std::size_t x1 = std::min(ax.i0 + 1, img.width - 1);
    const std::size_t y1 = std::min(ay.i0 + 1, img.height - 1);

    const double i00 = img.at(ax.i0, ay.i0);
    const double i10 = img.at(x1, ay.i0);
    const double i01 = img.at(ax.i0, y1);
    const double i11 = img.at(x1, y1);

    const double fx = ax.frac;
    const double fy = ay.frac;

    InterpSample out;
    out.value = (1.0 - fx) * (1.0 - fy) * i00 + fx * (1.0 - fy) * i10 + (1.0 - fx) * fy * i01 +
                fx * fy * i11;
    out.dx = ax.clamped ? 0.0 : (1.0 - fy) * (i10 - i00) + fy * (i11 - i01);
    out.dy = ay.clamped ? 0.0 : (1.0 - fx) * (i01 - i00) + fx * (i11 - i10);
    return out;
}

std::pair<ImageBuffer, ImageBuffer> make_disc_pair(std::size_t size, double radius_ref,
                                                   double radius_tpl, double offset_x,
                                                   double offset_y, double edge_width) {
    if (size < 4) throw std::invalid_argument("make_disc_pair: size must be >= 4");
    const double half = static_cast<double>(size) / 2.0;
    if (!(radius_ref < half) || !(radius_tpl < half))
        throw std::invalid_argument("make_disc_pair: radii must be < size/2");
    if (!(edge_width > 0.0)) throw std::invalid_argument("make_disc_pair: edge_width must be > 0");

    auto render = [&](double cx, double cy, double radius) {
        ImageBuffer img{size, size, std::vector<double>(size * size)};
        for (std::size_t y = 0; y < size; ++y) {
            for (std::size_t x = 0; x < size; ++x) {
                const double px = static_cast<double>(x) + 0.5;
                const double py = static_cast<double>(y) + 0.5;
                const double r = std::hypot(px - cx, py - cy);
                img.intensities[y * size + x] = 0.5 * (1.0 - std::erf((r - radius) / edge_width));
            }
        }
        return img;
    };

    ImageBuffer reference = render(half, half, radius_ref);
    ImageBuffer templ = render(half + offset_x, half + offset_y, radius_tpl);
    return {std::move(reference), std::move(templ)};
}

namespace {

struct PgmReader {
    std::string data;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("pgm parse error at byte " + std::to_string(pos) + ": " + what);
    }

    bool eof() const { return pos >= data.size(); }
    char peek() const { return data[pos]; }

    void skip_space_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    unsigned long next_uint(const char* name) {
        skip_space_and_comments();
        if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
            fail(std::string("expected ") + name);
        unsigned long v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + static_cast<unsigned long>(peek() - '0');
            if (v > 1000000000UL) fail(std::string(name) + " out of range");
            ++pos;
        }
        return v;
    }
};

}  // namespace

ImageBuffer load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    PgmReader r{buf.str()};
    r.skip_space_and_comments();
    if (r.data.size() - r.pos < 2 || r.data[r.pos] != 'P' ||
        (r.data[r.pos + 1] != '2' && r.data[r.pos + 1] != '5'))
        r.fail("expected magic P2 or P5");
    const bool binary = r.data[r.pos + 1] == '5';
    r.pos += 2;

    const unsigned long width = r.next_uint("width");
    const unsigned long height = r.next_uint("height");
    const unsigned long maxval = r.next_uint("maxval");
    if (width == 0 || height == 0) r.fail("zero image dimension");
    if (maxval == 0 || maxval > 65535) r.fail("maxval must be in [1, 65535]");

    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.intensities.resize(width * height);
    const double inv_max = 1.0 / static_cast<double>(maxval);
    const std::size_t count = img.intensities.size();

    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        if (r.eof() || !std::isspace(static_cast<unsigned char>(r.peek())))
            r.fail("expected single whitespace before binary payload");
        ++r.pos;
        const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
        const std::size_t need = count * bytes_per_sample;
        const std::size_t have = r.data.size() - r.pos;
        if (have < need)
            r.fail("payload truncated: expected " + std::to_string(need) + " bytes, got " +
                   std::to_string(have));
        for (std::size_t i = 0; i < count; ++i) {
            unsigned long v;
            if (bytes_per_sample == 1) {
                v = static_cast<unsigned char>(r.data[r.pos++]);
            } else {
                const unsigned long hi = static_cast<unsigned char>(r.data[r.pos++]);
                const unsigned long lo = static_cast<unsigned char>(r.data[r.pos++]);
                v = (hi << 8) | lo;
            }
            if (v > maxval) r.fail("sample exceeds maxval");
            img.intensities[i] = static_cast<double>(v) * inv_max;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            r.skip_space_and_comments();
            if (r.eof())
                r.fail("payload truncated: expected " + std::to_string(count) + " values, got " +
                       std::to_string(i));
            const unsigned long v = r.next_uint("sample");
            if (v > maxval) r.fail("sample exceeds maxval");
            img.intensities[i] = static_cast<double>(v) * inv_max;
        }
    }
    return img;
}

}  // namespace qnopt
