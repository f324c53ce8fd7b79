#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "implab/errors.hpp"
#include "implab/germ.hpp"

namespace implab {

struct GridSpec {
    std::complex<double> center{0.0, 0.0};
    double width = 4.0, height = 4.0;
    int px_w = 512, px_h = 512;

    void validate() const {
        if (px_w < 1 || px_h < 1) throw ValidationError("grid: pixel counts must be >= 1");
        if (!(width > 0.0) || !(height > 0.0))
            throw ValidationError("grid: width/height must be positive");
    }
    // Row-major, row 0 at the top (decreasing imaginary part).
    std::complex<double> pixel_center(int row, int col) const {
        const double re = center.real() + ((col + 0.5) / px_w - 0.5) * width;
        const double im = center.imag() + (0.5 - (row + 0.5) / px_h) * height;
        return {re, im};
    }
    // Pixel index containing a point, or -1 if outside the grid.
    long pixel_of(std::complex<double> z) const {
        const double fx = (z.real() - center.real()) / width + 0.5;
        const double fy = 0.5 - (z.imag() - center.imag()) / height;
        const int col = static_cast<int>(fx * px_w);
        const int row = static_cast<int>(fy * px_h);
        if (col < 0 || col >= px_w || row < 0 || row >= px_h || fx < 0 || fy < 0) return -1;
        return static_cast<long>(row) * px_w + col;
    }
    std::size_t pixels() const { return static_cast<std::size_t>(px_w) * px_h; }
    double pixel_diag() const {
        const double dx = width / px_w, dy = height / px_h;
        return std::sqrt(dx * dx + dy * dy);
    }
};

enum class PixelLabel : std::uint8_t {
    undecided = 0,
    basin = 1,
    julia_near = 2,
    lavaurs_escape = 3, // Lavaurs orbit reaches J(q) in `value` steps
};

struct Bitmap {
    GridSpec grid;
    std::vector<PixelLabel> labels;
    std::vector<std::uint32_t> values; // entry time / iterate count per pixel

    std::size_t size() const { return labels.size(); }
};

// Parabolic basin by petal entry; value = entry time. Pixels that escape or
// stay undecided within max_iter keep label undecided (value = stop step).
Bitmap render_basin(const Germ& g, const GridSpec& grid, int max_iter = 2048, double r = 0.25,
                    int threads = 0);

// Escape-time Julia mask: non-escaping pixels that touch an escaping
// 4-neighbour. Returned as one byte per pixel (1 = on J).
std::vector<std::uint8_t> julia_mask(const Germ& g, const GridSpec& grid, int max_iter = 512,
                                     int threads = 0);

struct JuliaLavaursOptions {
    int m_max = 6;          // Lavaurs iterates per pixel
    double delta = -1.0;    // J-proximity radius; < 0 means 2 pixel diagonals
    int julia_iter = 512;   // escape-time cap for the J(q) mask
    double tol = 1e-7;      // Fatou solver tolerance for rendering
    int threads = 0;
};

// J_Lav(q,u) raster: julia_near = within delta of the J(q) mask (hit at
// m = 0), lavaurs_escape = some L_u^m lands within delta of J (value = m),
// basin = basin point whose Lavaurs orbit never hits, undecided = the rest.
Bitmap render_julia_lavaurs(const Germ& g, std::complex<double> u, const GridSpec& grid,
                            const JuliaLavaursOptions& opts = {});

using Observable2D = std::function<std::complex<double>(std::complex<double>)>;

struct FiberedSliceResult {
    Bitmap slice;               // finite-n non-autonomous Julia-proximity picture
    Bitmap predicted;           // J_Lav(q, u) comparison target
    std::complex<double> u;     // (1/(pi n)) sum a(p^k(z)) G((k+1)/n)
    double hausdorff_px = 0.0;  // symmetric Hausdorff distance between the
                                // two masks, in pixel units
};

// Fibered slice over the base orbit p^k(z0): per pixel, n steps of
// w -> q(w) + (pi/n + a(p^k(z0))/n^2)^2 followed by escape-time
// classification under q; the boundary of the non-escaping set is compared
// against the predicted Julia-Lavaurs set.
FiberedSliceResult render_fibered_slice(std::span<const std::complex<double>> base_coeffs,
                                        const Observable2D& a, const Germ& q,
                                        std::complex<double> z0, int n, const GridSpec& grid,
                                        const JuliaLavaursOptions& opts = {});

// Averages of the observable over given periodic orbits of the base map and
// the collinearity test on the first three (cross product of differences).
struct CollinearityReport {
    std::vector<std::complex<double>> averages;
    double cross = 0.0; // Im((A2-A1) conj(A3-A1))
    bool collinear = false;
};

CollinearityReport periodic_orbit_collinearity(std::span<const std::complex<double>> base_coeffs,
                                               const Observable2D& a,
                                               std::span<const std::complex<double>> points,
                                               std::span<const int> periods, double tol = 1e-9);

// P6, 8-bit RGB, row-major top-to-bottom. Fixed color map (see README):
// undecided (0,0,0), basin (32,32,224), julia_near (255,255,255),
// lavaurs_escape (255,160,0).
void write_ppm(const Bitmap& bm, std::ostream& os);
void write_ppm_file(const Bitmap& bm, const std::string& path);
std::string ppm_bytes(const Bitmap& bm);

// CSV dump: row,col,label,value.
void write_bitmap_csv(const Bitmap& bm, std::ostream& os);

} // namespace implab
