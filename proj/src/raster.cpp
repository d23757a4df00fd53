#include "dynlab/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dynlab {

size_t DyadicRaster::count_ones() const {
    size_t n = 0;
    for (auto b : bits) n += (b != 0);
    return n;
}

namespace {

// Smooth escape grade: fractional iteration count for polynomial maps, so
// the grade varies continuously with the distance to the Julia set. Bounded
// orbits get the sentinel max_iter + 2.
inline double escape_grade(const MapSpec& map, cplx z, int max_iter, double esc2,
                           double log_esc, double log_deg) {
    for (int i = 0; i < max_iter; ++i) {
        double x = z.real(), y = z.imag();
        double n2 = x * x + y * y;
        if (n2 > esc2) {
            if (log_deg > 0.0) {
                double corr = std::log(0.5 * std::log(n2) / log_esc) / log_deg;
                return std::max(0.0, double(i) - corr);
            }
            return double(i);
        }
        try {
            z = map.eval(z);
        } catch (const PoleError&) {
            return double(i);
        }
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return double(i + 1);
    }
    return double(max_iter + 2);  // bounded marker
}

int thread_count() {
    if (const char* e = std::getenv("DYNLAB_THREADS")) {
        int n = std::atoi(e);
        if (n >= 1) return n;
    }
    unsigned n = std::thread::hardware_concurrency();
    return n ? static_cast<int>(n) : 1;
}

// parallel over row ranges; each worker writes disjoint rows, so output is
// independent of the thread count
template <typename Fn>
void parallel_rows(int rows, Fn fn) {
    int nt = std::min(thread_count(), rows);
    if (nt <= 1) {
        fn(0, rows);
        return;
    }
    std::vector<std::thread> ts;
    int chunk = (rows + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        int lo = t * chunk, hi = std::min(rows, lo + chunk);
        if (lo >= hi) break;
        ts.emplace_back(fn, lo, hi);
    }
    for (auto& t : ts) t.join();
}

} // namespace

DyadicRaster julia_membership_grid(const MapSpec& map, const BoundingBox& bbox,
                                   int k, int max_iter, double escape_radius) {
    if (k < 1 || k > 14) throw std::invalid_argument("julia_membership_grid: bad resolution");
    if (!(bbox.x_min < bbox.x_max) || !(bbox.y_min < bbox.y_max))
        throw std::invalid_argument("julia_membership_grid: bad bbox");
    double esc = escape_radius > 0 ? escape_radius : map.default_escape_radius();
    if (map.is_polynomial_map() && esc < map.default_escape_radius())
        esc = map.default_escape_radius();

    DyadicRaster r;
    r.bbox = bbox;
    r.k = k;
    r.side = 1 << k;
    r.escape_radius = esc;
    r.max_iter = max_iter;
    r.bits.assign(size_t(r.side) * r.side, 0);

    // half-step sample lattice: each cell sees a 3x3 stencil
    const int sub = 2 * r.side + 1;
    std::vector<float> grade(size_t(sub) * sub);
    double esc2 = esc * esc;
    double log_esc = std::log(esc);
    double log_deg = map.is_polynomial_map() ? std::log(double(map.degree())) : 0.0;
    double hx = bbox.width() / (sub - 1), hy = bbox.height() / (sub - 1);
    const double bounded_mark = double(max_iter + 2);

    parallel_rows(sub, [&](int lo, int hi) {
        for (int iy = lo; iy < hi; ++iy) {
            double y = bbox.y_min + iy * hy;
            for (int ix = 0; ix < sub; ++ix) {
                double x = bbox.x_min + ix * hx;
                grade[size_t(iy) * sub + ix] = static_cast<float>(
                    escape_grade(map, cplx(x, y), max_iter, esc2, log_esc, log_deg));
            }
        }
    });

    parallel_rows(r.side, [&](int lo, int hi) {
        for (int iy = lo; iy < hi; ++iy) {
            for (int ix = 0; ix < r.side; ++ix) {
                double mn = 1e30, mx = -1e30;
                bool bounded = false, escaping = false;
                for (int sy = 0; sy <= 2; ++sy)
                    for (int sx = 0; sx <= 2; ++sx) {
                        double g = grade[size_t(2 * iy + sy) * sub + (2 * ix + sx)];
                        if (g >= bounded_mark) {
                            bounded = true;
                        } else {
                            escaping = true;
                            mn = std::min(mn, g);
                            mx = std::max(mx, g);
                        }
                    }
                bool mark = (bounded && escaping) ||
                            (escaping && !bounded && (mx - mn) >= 1.0);
                if (mark) r.bits[size_t(iy) * r.side + ix] = 1;
            }
        }
    });
    return r;
}

void write_pgm(const DyadicRaster& r, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    std::ostringstream head;
    head.precision(17);
    head << "P5\n# bbox " << r.bbox.x_min << " " << r.bbox.x_max << " "
         << r.bbox.y_min << " " << r.bbox.y_max << "\n"
         << r.side << " " << r.side << "\n255\n";
    f << head.str();
    std::vector<uint8_t> row(r.side);
    for (int iy = 0; iy < r.side; ++iy) {
        for (int ix = 0; ix < r.side; ++ix)
            row[ix] = r.bits[size_t(iy) * r.side + ix] ? 255 : 0;
        f.write(reinterpret_cast<const char*>(row.data()), r.side);
    }
}

DyadicRaster read_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pgm: cannot open " + path);
    std::string magic;
    f >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 file");
    DyadicRaster r;
    // header tokens, honoring comment lines (bbox comment parsed back)
    int vals[3], got = 0;
    while (got < 3) {
        f >> std::ws;
        if (f.peek() == '#') {
            std::string line;
            std::getline(f, line);
            std::istringstream c(line);
            std::string hash, word;
            c >> hash >> word;
            if (word == "bbox")
                c >> r.bbox.x_min >> r.bbox.x_max >> r.bbox.y_min >> r.bbox.y_max;
            continue;
        }
        f >> vals[got++];
    }
    if (vals[0] != vals[1]) throw std::runtime_error("read_pgm: raster must be square");
    r.side = vals[0];
    r.k = 0;
    while ((1 << r.k) < r.side) r.k++;
    f.get();  // single whitespace after maxval
    r.bits.assign(size_t(r.side) * r.side, 0);
    std::vector<uint8_t> row(r.side);
    for (int iy = 0; iy < r.side; ++iy) {
        f.read(reinterpret_cast<char*>(row.data()), r.side);
        for (int ix = 0; ix < r.side; ++ix)
            r.bits[size_t(iy) * r.side + ix] = row[ix] ? 1 : 0;
    }
    return r;
}

namespace {

// Felzenszwalb-Huttenlocher 1D squared-distance transform
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int q = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) {
        double s;
        while (true) {
            s = ((f[i] + double(i) * i) - (f[v[q]] + double(v[q]) * v[q])) /
                (2.0 * i - 2.0 * v[q]);
            if (s <= z[q]) {
                --q;
            } else {
                break;
            }
        }
        ++q;
        v[q] = i;
        z[q] = s;
        z[q + 1] = std::numeric_limits<double>::infinity();
    }
    q = 0;
    for (int i = 0; i < n; ++i) {
        while (z[q + 1] < i) ++q;
        d[i] = (double(i) - v[q]) * (double(i) - v[q]) + f[v[q]];
    }
}

} // namespace

std::vector<double> distance_transform(const DyadicRaster& r) {
    const double INF = 1e12;  // finite sentinel keeps the parabola arithmetic clean
    int n = r.side;
    std::vector<double> g(size_t(n) * n);
    for (size_t i = 0; i < g.size(); ++i) g[i] = r.bits[i] ? 0.0 : INF;

    std::vector<double> col(n), out(n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) col[y] = g[size_t(y) * n + x];
        dt1d(col, out, n);
        for (int y = 0; y < n; ++y) g[size_t(y) * n + x] = out[y];
    }
    std::vector<double> row(n), rout(n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) row[x] = g[size_t(y) * n + x];
        dt1d(row, rout, n);
        for (int x = 0; x < n; ++x) g[size_t(y) * n + x] = rout[x];
    }
    // to world units (assumes near-square cells)
    double cw = r.cell_width(), ch = r.cell_height();
    double cell = 0.5 * (cw + ch);
    for (auto& v : g) v = std::sqrt(v) * cell;
    return g;
}

double raster_distance(const DyadicRaster& r, const std::vector<double>& dt, cplx z) {
    // accurate to about one cell: center-to-center distance of the clamped
    // cell plus the out-of-box offset
    double xc = std::clamp(z.real(), r.bbox.x_min, r.bbox.x_max);
    double yc = std::clamp(z.imag(), r.bbox.y_min, r.bbox.y_max);
    double penalty = std::abs(z - cplx(xc, yc));
    int ix = std::clamp(static_cast<int>((xc - r.bbox.x_min) / r.cell_width()), 0, r.side - 1);
    int iy = std::clamp(static_cast<int>((yc - r.bbox.y_min) / r.cell_height()), 0, r.side - 1);
    return penalty + dt[size_t(iy) * r.side + ix];
}

} // namespace dynlab
