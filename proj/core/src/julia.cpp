#include "implab/julia.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "implab/fatou.hpp"
#include "implab/schedule.hpp"

namespace implab {

namespace {

std::uint64_t fnv1a64_bits(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    std::uint64_t h = 14695981039346656037ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

unsigned pick_threads(int requested, std::size_t work) {
    if (requested > 0) return static_cast<unsigned>(requested);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(1, work)));
}

void parallel_rows(int rows, int threads, const std::function<void(int, int)>& body) {
    const unsigned nt = pick_threads(threads, static_cast<std::size_t>(rows));
    if (nt <= 1) {
        body(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (rows + static_cast<int>(nt) - 1) / static_cast<int>(nt);
    for (unsigned t = 0; t < nt; ++t) {
        const int b = static_cast<int>(t) * chunk, e = std::min(rows, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    for (auto& th : pool) th.join();
}

// Dilate a mask by a euclidean radius given in complex-plane units.
std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& mask, const GridSpec& grid,
                                 double radius) {
    const double dx = grid.width / grid.px_w, dy = grid.height / grid.px_h;
    const int rx = static_cast<int>(std::ceil(radius / dx));
    const int ry = static_cast<int>(std::ceil(radius / dy));
    std::vector<std::uint8_t> out(mask.size(), 0);
    for (int i = 0; i < grid.px_h; ++i) {
        for (int j = 0; j < grid.px_w; ++j) {
            if (!mask[static_cast<std::size_t>(i) * grid.px_w + j]) continue;
            for (int di = -ry; di <= ry; ++di) {
                const int ii = i + di;
                if (ii < 0 || ii >= grid.px_h) continue;
                for (int dj = -rx; dj <= rx; ++dj) {
                    const int jj = j + dj;
                    if (jj < 0 || jj >= grid.px_w) continue;
                    const double ex = dj * dx, ey = di * dy;
                    if (ex * ex + ey * ey <= radius * radius)
                        out[static_cast<std::size_t>(ii) * grid.px_w + jj] = 1;
                }
            }
        }
    }
    return out;
}

// Two-pass chamfer distance transform (3-4 weights), in ~pixel units.
std::vector<float> chamfer_distance(const std::vector<std::uint8_t>& mask, int w, int h) {
    constexpr float kInf = 1e30f;
    std::vector<float> d(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) d[i] = mask[i] ? 0.0f : kInf;
    auto at = [&](int i, int j) -> float& { return d[static_cast<std::size_t>(i) * w + j]; };
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            float v = at(i, j);
            if (i > 0) v = std::min(v, at(i - 1, j) + 1.0f);
            if (j > 0) v = std::min(v, at(i, j - 1) + 1.0f);
            if (i > 0 && j > 0) v = std::min(v, at(i - 1, j - 1) + 1.41421356f);
            if (i > 0 && j + 1 < w) v = std::min(v, at(i - 1, j + 1) + 1.41421356f);
            at(i, j) = v;
        }
    for (int i = h - 1; i >= 0; --i)
        for (int j = w - 1; j >= 0; --j) {
            float v = at(i, j);
            if (i + 1 < h) v = std::min(v, at(i + 1, j) + 1.0f);
            if (j + 1 < w) v = std::min(v, at(i, j + 1) + 1.0f);
            if (i + 1 < h && j + 1 < w) v = std::min(v, at(i + 1, j + 1) + 1.41421356f);
            if (i + 1 < h && j > 0) v = std::min(v, at(i + 1, j - 1) + 1.41421356f);
            at(i, j) = v;
        }
    return d;
}

double mask_hausdorff_px(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                         int w, int h) {
    bool any_a = false, any_b = false;
    for (auto v : a) any_a |= (v != 0);
    for (auto v : b) any_b |= (v != 0);
    if (!any_a || !any_b) return std::numeric_limits<double>::infinity();
    const auto da = chamfer_distance(a, w, h), db = chamfer_distance(b, w, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i]) worst = std::max(worst, static_cast<double>(db[i]));
        if (b[i]) worst = std::max(worst, static_cast<double>(da[i]));
    }
    return worst;
}

std::vector<std::uint8_t> boundary_of(const std::vector<std::uint8_t>& filled, int w, int h) {
    std::vector<std::uint8_t> mask(filled.size(), 0);
    auto f = [&](int i, int j) { return filled[static_cast<std::size_t>(i) * w + j]; };
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            if (!f(i, j)) continue;
            const bool edge = (i > 0 && !f(i - 1, j)) || (i + 1 < h && !f(i + 1, j)) ||
                              (j > 0 && !f(i, j - 1)) || (j + 1 < w && !f(i, j + 1));
            if (edge) mask[static_cast<std::size_t>(i) * w + j] = 1;
        }
    return mask;
}

} // namespace

Bitmap render_basin(const Germ& g, const GridSpec& grid, int max_iter, double r, int threads) {
    grid.validate();
    Bitmap bm{grid, std::vector<PixelLabel>(grid.pixels(), PixelLabel::undecided),
              std::vector<std::uint32_t>(grid.pixels(), 0)};
    parallel_rows(grid.px_h, threads, [&](int row_b, int row_e) {
        for (int i = row_b; i < row_e; ++i)
            for (int j = 0; j < grid.px_w; ++j) {
                const auto entry = basin_entry(g, grid.pixel_center(i, j), r, max_iter);
                const std::size_t idx = static_cast<std::size_t>(i) * grid.px_w + j;
                if (entry.entered()) {
                    bm.labels[idx] = PixelLabel::basin;
                    bm.values[idx] = static_cast<std::uint32_t>(entry.index);
                } else {
                    bm.values[idx] = static_cast<std::uint32_t>(std::max(0, entry.index));
                }
            }
    });
    return bm;
}

std::vector<std::uint8_t> julia_mask(const Germ& g, const GridSpec& grid, int max_iter,
                                     int threads) {
    grid.validate();
    const double esc = std::min(g.escape_radius(), g.eval_radius());
    std::vector<std::uint8_t> filled(grid.pixels(), 0); // 1 = never escaped
    parallel_rows(grid.px_h, threads, [&](int row_b, int row_e) {
        for (int i = row_b; i < row_e; ++i)
            for (int j = 0; j < grid.px_w; ++j) {
                std::complex<double> w = grid.pixel_center(i, j);
                bool escaped = false;
                for (int m = 0; m < max_iter; ++m) {
                    if (std::abs(w) > esc) {
                        escaped = true;
                        break;
                    }
                    w = g.eval_unchecked(w);
                }
                if (!escaped) filled[static_cast<std::size_t>(i) * grid.px_w + j] = 1;
            }
    });
    return boundary_of(filled, grid.px_w, grid.px_h);
}

Bitmap render_julia_lavaurs(const Germ& g, std::complex<double> u, const GridSpec& grid,
                            const JuliaLavaursOptions& opts) {
    grid.validate();
    if (opts.m_max < 0) throw ValidationError("render: m_max must be >= 0");
    const double delta = opts.delta >= 0.0 ? opts.delta : 2.0 * grid.pixel_diag();

    const auto jmask = julia_mask(g, grid, opts.julia_iter, opts.threads);
    const auto near_j = dilate(jmask, grid, delta);

    Bitmap bm{grid, std::vector<PixelLabel>(grid.pixels(), PixelLabel::undecided),
              std::vector<std::uint32_t>(grid.pixels(), 0)};
    const FatouEngine<double> fatou(g, opts.tol);

    auto hits_j = [&](std::complex<double> z) {
        const long p = grid.pixel_of(z);
        return p >= 0 && near_j[static_cast<std::size_t>(p)];
    };

    parallel_rows(grid.px_h, opts.threads, [&](int row_b, int row_e) {
        for (int i = row_b; i < row_e; ++i)
            for (int j = 0; j < grid.px_w; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * grid.px_w + j;
                const std::complex<double> w0 = grid.pixel_center(i, j);
                if (near_j[idx]) {
                    bm.labels[idx] = PixelLabel::julia_near;
                    bm.values[idx] = 0;
                    continue;
                }
                const auto entry = basin_entry(g, w0, 0.25, opts.julia_iter);
                if (!entry.entered()) continue; // stays undecided
                bm.labels[idx] = PixelLabel::basin;
                std::complex<double> v = w0;
                for (int m = 1; m <= opts.m_max; ++m) {
                    try {
                        v = fatou.lavaurs(v, u);
                    } catch (const NumericalError& e) {
                        // Orbit left the basin: a genuine non-hit. Anything
                        // else means the evaluation itself failed.
                        const std::string what = e.what();
                        if (what.find("escaped") == std::string::npos &&
                            what.find("not in basin") == std::string::npos)
                            bm.labels[idx] = PixelLabel::undecided;
                        break;
                    }
                    bm.values[idx] = static_cast<std::uint32_t>(m);
                    if (hits_j(v)) {
                        bm.labels[idx] = PixelLabel::lavaurs_escape;
                        break;
                    }
                }
            }
    });
    return bm;
}

FiberedSliceResult render_fibered_slice(std::span<const std::complex<double>> base_coeffs,
                                        const Observable2D& a, const Germ& q,
                                        std::complex<double> z0, int n, const GridSpec& grid,
                                        const JuliaLavaursOptions& opts) {
    grid.validate();
    if (n < 1) throw ValidationError("fibered: n must be >= 1");
    if (base_coeffs.empty()) throw ValidationError("fibered: base map has no coefficients");

    auto base = [&](std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (auto it = base_coeffs.rbegin(); it != base_coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    };

    // For p(z) = z^2 with |z0| = 1 the raw orbit is not computable in floating
    // point (the modulus is an unstable direction and the argument's bits are
    // consumed at one per step), so a generic circle orbit is realized through
    // the seeded doubling bit stream instead.
    const bool circle_doubling = base_coeffs.size() == 3 &&
                                 base_coeffs[0] == std::complex<double>(0.0) &&
                                 base_coeffs[1] == std::complex<double>(0.0) &&
                                 base_coeffs[2] == std::complex<double>(1.0) &&
                                 std::abs(std::abs(z0) - 1.0) < 1e-9;
    const std::uint64_t circle_seed =
        fnv1a64_bits(z0.real()) ^ (fnv1a64_bits(z0.imag()) * 0x9e3779b97f4a7c15ull);

    // Base orbit and the induced phase u = (1/(pi n)) sum a(p^k(z)) G((k+1)/n).
    std::vector<std::complex<double>> eps2(static_cast<std::size_t>(n));
    std::complex<double> u_acc = 0.0;
    std::complex<double> z = z0;
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        if (circle_doubling)
            z = std::polar(1.0, 2.0 * pi * detail::doubling_orbit_point(
                                               circle_seed, static_cast<std::uint64_t>(k)));
        if (!(std::abs(z) < 1e6)) throw NumericalError("fibered: base orbit escaped");
        const std::complex<double> az = a(z);
        const std::complex<double> eps = pi / n + az / (static_cast<double>(n) * n);
        eps2[static_cast<std::size_t>(k)] = eps * eps;
        u_acc += az * weight_G(static_cast<double>(k + 1) / n);
        if (!circle_doubling) z = base(z);
    }
    FiberedSliceResult res;
    res.u = u_acc / (pi * n);

    // Finite-n slice: n non-autonomous steps, then escape-time under q.
    const double esc = q.escape_radius();
    std::vector<std::uint8_t> filled(grid.pixels(), 0);
    parallel_rows(grid.px_h, opts.threads, [&](int row_b, int row_e) {
        for (int i = row_b; i < row_e; ++i)
            for (int j = 0; j < grid.px_w; ++j) {
                std::complex<double> w = grid.pixel_center(i, j);
                bool escaped = false;
                for (int k = 0; k < n && !escaped; ++k) {
                    if (std::abs(w) > esc) escaped = true;
                    else w = q.eval_unchecked(w) + eps2[static_cast<std::size_t>(k)];
                }
                for (int m = 0; m < opts.julia_iter && !escaped; ++m) {
                    if (std::abs(w) > esc) escaped = true;
                    else w = q.eval_unchecked(w);
                }
                if (!escaped) filled[static_cast<std::size_t>(i) * grid.px_w + j] = 1;
            }
    });
    const auto slice_mask = boundary_of(filled, grid.px_w, grid.px_h);

    res.slice = Bitmap{grid, std::vector<PixelLabel>(grid.pixels(), PixelLabel::undecided),
                       std::vector<std::uint32_t>(grid.pixels(), 0)};
    for (std::size_t i = 0; i < slice_mask.size(); ++i)
        if (slice_mask[i]) res.slice.labels[i] = PixelLabel::julia_near;

    res.predicted = render_julia_lavaurs(q, res.u, grid, opts);
    std::vector<std::uint8_t> pred_mask(grid.pixels(), 0);
    for (std::size_t i = 0; i < pred_mask.size(); ++i)
        pred_mask[i] = (res.predicted.labels[i] == PixelLabel::julia_near ||
                        res.predicted.labels[i] == PixelLabel::lavaurs_escape)
                           ? 1
                           : 0;
    res.hausdorff_px = mask_hausdorff_px(slice_mask, pred_mask, grid.px_w, grid.px_h);
    return res;
}

CollinearityReport periodic_orbit_collinearity(std::span<const std::complex<double>> base_coeffs,
                                               const Observable2D& a,
                                               std::span<const std::complex<double>> points,
                                               std::span<const int> periods, double tol) {
    if (points.size() != periods.size())
        throw ValidationError("collinearity: points/periods size mismatch");
    auto base = [&](std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (auto it = base_coeffs.rbegin(); it != base_coeffs.rend(); ++it) acc = acc * z + *it;
        return acc;
    };
    CollinearityReport rep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::complex<double> z = points[i], acc = 0.0;
        for (int l = 0; l < periods[i]; ++l) {
            acc += a(z);
            z = base(z);
        }
        rep.averages.push_back(acc / static_cast<double>(periods[i]));
    }
    if (rep.averages.size() >= 3) {
        const auto d1 = rep.averages[1] - rep.averages[0];
        const auto d2 = rep.averages[2] - rep.averages[0];
        rep.cross = std::imag(d1 * std::conj(d2));
        const double scale = std::max(1e-300, std::abs(d1) * std::abs(d2));
        rep.collinear = std::abs(rep.cross) <= tol * scale;
    }
    return rep;
}

namespace {
void put_rgb(std::string& buf, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    buf.push_back(static_cast<char>(r));
    buf.push_back(static_cast<char>(g));
    buf.push_back(static_cast<char>(b));
}
} // namespace

std::string ppm_bytes(const Bitmap& bm) {
    std::string buf;
    buf.reserve(32 + 3 * bm.size());
    buf += "P6\n" + std::to_string(bm.grid.px_w) + " " + std::to_string(bm.grid.px_h) + "\n255\n";
    for (std::size_t i = 0; i < bm.size(); ++i) {
        switch (bm.labels[i]) {
            case PixelLabel::basin: put_rgb(buf, 32, 32, 224); break;
            case PixelLabel::julia_near: put_rgb(buf, 255, 255, 255); break;
            case PixelLabel::lavaurs_escape: put_rgb(buf, 255, 160, 0); break;
            default: put_rgb(buf, 0, 0, 0); break;
        }
    }
    return buf;
}

void write_ppm(const Bitmap& bm, std::ostream& os) {
    const std::string bytes = ppm_bytes(bm);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_ppm_file(const Bitmap& bm, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open for writing: " + path);
    write_ppm(bm, f);
}

void write_bitmap_csv(const Bitmap& bm, std::ostream& os) {
    os << "row,col,label,value\n";
    for (int i = 0; i < bm.grid.px_h; ++i)
        for (int j = 0; j < bm.grid.px_w; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * bm.grid.px_w + j;
            os << i << ',' << j << ',' << static_cast<int>(bm.labels[idx]) << ','
               << bm.values[idx] << '\n';
        }
}

} // namespace implab
