#ifndef DYNLAB_RASTER_HPP
#define DYNLAB_RASTER_HPP

#include "dynlab/map_spec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dynlab {

struct BoundingBox {
    double x_min = -2.0, x_max = 2.0, y_min = -2.0, y_max = 2.0;
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

// Julia-set membership grid: 2^k x 2^k cells over the bounding box, one bit
// per cell (1 = cell meets the Julia-set approximation).
struct DyadicRaster {
    BoundingBox bbox;
    int k = 0;                     // side resolution 2^k
    int side = 0;                  // 2^k
    std::vector<uint8_t> bits;     // row-major, side*side entries
    double escape_radius = 0.0;
    int max_iter = 0;

    uint8_t at(int ix, int iy) const { return bits[size_t(iy) * side + ix]; }
    double cell_width() const { return bbox.width() / side; }
    double cell_height() const { return bbox.height() / side; }
    cplx cell_center(int ix, int iy) const {
        return {bbox.x_min + (ix + 0.5) * cell_width(),
                bbox.y_min + (iy + 0.5) * cell_height()};
    }
    size_t count_ones() const;
};

// Escape-time boundary classification. A corner sample is graded by its
// escape time (capped at max_iter; bounded orbits get the cap + 2 marker);
// a cell is marked when its corner grades straddle a gap of at least 2,
// which happens exactly where escape-time level curves accumulate.
DyadicRaster julia_membership_grid(const MapSpec& map, const BoundingBox& bbox,
                                   int k, int max_iter, double escape_radius);

// Binary PGM (P5), maxval 255, comment line "# bbox x_min x_max y_min y_max";
// 255 = member, 0 = non-member.
void write_pgm(const DyadicRaster& r, const std::string& path);
DyadicRaster read_pgm(const std::string& path);

// Exact Euclidean distance (in world units) from each cell center to the
// nearest 1-cell center. Empty rasters yield +inf everywhere.
std::vector<double> distance_transform(const DyadicRaster& r);

// Distance from an arbitrary point to the raster's 1-cells (via the
// transform, nearest-cell lookup).
double raster_distance(const DyadicRaster& r, const std::vector<double>& dt, cplx z);

} // namespace dynlab

#endif
