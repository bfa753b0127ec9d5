#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace qnopt {

/// Row-major grayscale image with intensities in [0, 1]. Pixel (x, y) is
/// centered at position (x + 0.5, y + 0.5) in pixel units.
struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> intensities;

    double at(std::size_t x, std::size_t y) const { return intensities[y * width + x]; }
};

struct InterpSample {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

/// Bilinear interpolation of the image at (x, y) in pixel units, with the
/// exact analytic partials of the interpolant. Points outside the domain
/// clamp to the boundary value with zero outward derivative; the clamp also
/// flattens the half-pixel margin between the outermost pixel centers and
/// the domain edge.
InterpSample interp_bilinear(const ImageBuffer& img, double x, double y);

/// Smooth disc images with an error-function edge profile: the reference
/// disc sits at the image center, the template disc is displaced by
/// (offset_x, offset_y).
std::pair<ImageBuffer, ImageBuffer> make_disc_pair(std::size_t size, double radius_ref,
                                                   double radius_tpl, double offset_x,
                                                   double offset_y, double edge_width = 1.5);

/// Reads an ASCII (P2) or binary (P5) PGM file, maxval <= 65535, and
/// normalizes intensities to [0, 1]. Throws std::runtime_error with the byte
/// offset on malformed headers and the missing byte/value count on truncated
/// payloads.
ImageBuffer load_pgm(const std::string& path);

}  // namespace qnopt
