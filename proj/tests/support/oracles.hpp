#pragma once

// Brute-force reference computations shared by the unit and acceptance tests.

#include <array>
#include <map>
#include <utility>

#include "cropweed/imaging.hpp"

namespace cropweed::testing {

using PairTally = std::map<std::pair<int, int>, int>;

/// Every (pixel, neighbor at dx,dy) pair, plus the reversed pair when symmetric.
PairTally enumerate_pairs(const GrayImage &img, long dx, long dy, bool symmetric);

/// The nine co-occurrence statistics evaluated literally from a pair tally.
/// Correlation divides by sigma_x*sigma_y when standard, else by the squared product.
std::array<double, 9> direct_statistics(const PairTally &pairs, bool standard_correlation);

/// Counterclockwise quarter turn: pixel (x, y) moves to (y, w-1-x).
GrayImage rotate90(const GrayImage &img);

}  // namespace cropweed::testing
