// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace vf5::detail {

// Corner offsets within a cell:
//   0 (0,0,0)  1 (1,0,0)  2 (1,1,0)  3 (0,1,0)
//   4 (0,0,1)  5 (1,0,1)  6 (1,1,1)  7 (0,1,1)
inline constexpr int kMcCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                        {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

inline constexpr int kMcEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                       {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

// Bit c of the case index is set when corner c is not above the level.
// Rows list edge triples terminated by -1.
extern const std::int8_t kMcTriangles[256][16];

}  // namespace vf5::detail
