#pragma once

// CSV exchange formats: radial profiles (`r,u,du`) and generic numeric
// tables. All numbers use 17 significant digits for lossless round trips.

#include <string>
#include <vector>

#include "pohozaev/grid.hpp"

namespace pohozaev {

// Serialize a profile as `r,u,du` rows (header included, trailing newline).
std::string profile_to_csv(const RadialFunction& f);
void write_profile_csv(const std::string& path, const RadialFunction& f);

// Parse a profile CSV. The grid is reconstructed from the r column (must be
// uniform within round-off); tolerates a trailing newline. Throws
// InvalidArgumentError on malformed content.
RadialFunction read_profile_csv(const std::string& path, int N);

// Generic table writer: header names + rows.
std::string table_to_csv(const std::vector<std::string>& header,
                         const std::vector<std::vector<double>>& rows);

}  // namespace pohozaev
