#ifndef DYNLAB_IO_UTIL_HPP
#define DYNLAB_IO_UTIL_HPP

#include "dynlab/map_spec.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dynlab {

// fixed 17-significant-digit formatting so replays are byte-identical
std::string fmt(double v);
std::string fmt(cplx v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& fields);

private:
    struct Impl;
    Impl* impl_;
};

std::array<uint8_t, 32> sha256_file(const std::string& path);
std::array<uint8_t, 32> sha256_bytes(const void* data, size_t len);
std::string hex(const std::array<uint8_t, 32>& digest);

// map-spec JSON files:
//   {"kind":"polynomial","num":[[re,im],...],"den":[[re,im],...]}
//   {"kind":"unicritical","d":2,"c":[re,im]}
//   {"kind":"real-interval","num":[c0,c1,...],"domain":[a,b]}
MapSpec load_map_spec(const std::string& path);
void save_map_spec(const MapSpec& map, const std::string& path);

} // namespace dynlab

#endif
