#pragma once

#include <string>
#include <vector>

#include "nlscatter/grid.hpp"

namespace nlscatter {

// Raw layout: 8-byte little-endian count, then IEEE-754 doubles, row-major.
void write_binary(const std::string& path, const std::vector<double>& values);
std::vector<double> read_binary(const std::string& path);

// CSV with coordinate columns followed by value.
void write_csv(const std::string& path, const RadialGrid& g, const std::vector<double>& values);
void write_csv(const std::string& path, const Grid3D& g, const std::vector<double>& values);
void write_csv(const std::string& path, const RadiationFieldData& f);
RadiationFieldData read_radiation_csv(const std::string& path);

}  // namespace nlscatter
