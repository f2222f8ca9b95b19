#pragma once

// Fixed 256-entry escape palette (cyclic blue-white-orange ramp), RGB.

#include <array>
#include <cstdint>

namespace multicorn {

inline constexpr std::array<std::uint8_t, 768> kEscapePalette = {
    0, 7, 100, 0, 7, 100, 0, 8, 101, 0, 9, 102,
    1, 10, 103, 1, 11, 104, 2, 13, 106, 2, 15, 108,
    3, 17, 110, 4, 19, 113, 5, 22, 115, 6, 25, 118,
    7, 28, 121, 8, 31, 125, 9, 34, 128, 10, 37, 131,
    11, 41, 135, 12, 44, 138, 13, 48, 142, 14, 52, 146,
    15, 55, 150, 17, 59, 153, 18, 63, 157, 19, 66, 161,
    20, 70, 165, 21, 73, 168, 22, 77, 172, 23, 80, 175,
    24, 83, 179, 25, 86, 182, 26, 89, 185, 27, 92, 188,
    28, 95, 190, 29, 97, 193, 30, 99, 195, 30, 101, 197,
    31, 103, 199, 31, 104, 200, 32, 106, 201, 32, 106, 202,
    32, 107, 203, 32, 107, 203, 32, 107, 203, 33, 107, 203,
    33, 108, 203, 34, 109, 204, 35, 109, 204, 37, 110, 204,
    38, 112, 205, 40, 113, 205, 42, 114, 206, 45, 116, 206,
    47, 118, 207, 50, 120, 207, 53, 122, 208, 56, 124, 209,
    59, 126, 210, 62, 129, 211, 65, 131, 211, 69, 134, 212,
    73, 136, 213, 77, 139, 214, 81, 142, 215, 85, 145, 216,
    89, 148, 217, 93, 151, 218, 97, 154, 220, 102, 157, 221,
    106, 160, 222, 110, 164, 223, 115, 167, 224, 120, 170, 225,
    124, 174, 226, 129, 177, 228, 133, 180, 229, 138, 184, 230,
    143, 187, 231, 147, 190, 232, 152, 193, 233, 156, 197, 235,
    161, 200, 236, 165, 203, 237, 170, 206, 238, 174, 210, 239,
    178, 213, 240, 182, 216, 241, 187, 219, 242, 191, 221, 243,
    194, 224, 244, 198, 227, 245, 202, 230, 246, 205, 232, 247,
    209, 235, 248, 212, 237, 249, 215, 239, 249, 218, 241, 250,
    221, 243, 251, 223, 245, 252, 226, 247, 252, 228, 248, 253,
    230, 250, 253, 231, 251, 254, 233, 252, 254, 234, 253, 254,
    235, 254, 255, 236, 254, 255, 237, 255, 255, 237, 255, 255,
    237, 255, 255, 237, 255, 254, 237, 255, 254, 237, 254, 252,
    237, 254, 251, 237, 253, 248, 238, 252, 246, 238, 251, 243,
    238, 250, 240, 238, 249, 236, 239, 247, 232, 239, 246, 228,
    239, 245, 224, 240, 243, 219, 240, 241, 214, 240, 240, 209,
    241, 238, 203, 241, 236, 198, 241, 234, 192, 242, 232, 186,
    242, 230, 180, 243, 228, 174, 243, 226, 167, 244, 224, 161,
    244, 221, 154, 245, 219, 148, 245, 217, 141, 246, 215, 134,
    246, 212, 127, 246, 210, 121, 247, 208, 114, 247, 206, 107,
    248, 204, 101, 248, 201, 94, 249, 199, 88, 249, 197, 81,
    250, 195, 75, 250, 193, 69, 251, 191, 63, 251, 189, 57,
    251, 187, 52, 252, 185, 46, 252, 184, 41, 252, 182, 36,
    253, 180, 31, 253, 179, 27, 253, 178, 23, 254, 176, 19,
    254, 175, 15, 254, 174, 12, 254, 173, 9, 255, 172, 7,
    255, 171, 4, 255, 171, 3, 255, 170, 1, 255, 170, 1,
    255, 170, 0, 255, 170, 0, 254, 170, 0, 253, 169, 0,
    252, 168, 0, 250, 167, 0, 248, 165, 0, 245, 163, 0,
    242, 161, 0, 239, 159, 0, 235, 157, 0, 231, 154, 0,
    226, 151, 0, 221, 148, 0, 216, 145, 0, 211, 141, 0,
    206, 137, 0, 200, 134, 0, 194, 130, 0, 188, 126, 0,
    182, 122, 0, 175, 117, 0, 169, 113, 0, 162, 109, 0,
    155, 104, 0, 148, 100, 0, 141, 95, 0, 134, 91, 0,
    128, 86, 0, 121, 81, 0, 114, 77, 0, 107, 72, 0,
    100, 68, 0, 93, 63, 0, 86, 59, 0, 80, 55, 0,
    73, 50, 0, 67, 46, 0, 61, 42, 0, 55, 38, 0,
    49, 35, 0, 44, 31, 0, 39, 27, 0, 34, 24, 0,
    29, 21, 0, 24, 18, 0, 20, 15, 0, 16, 13, 0,
    13, 11, 0, 10, 9, 0, 7, 7, 0, 5, 5, 0,
    3, 4, 0, 2, 3, 0, 1, 2, 0, 0, 2, 0,
    0, 2, 0, 0, 2, 0, 0, 2, 1, 0, 2, 3,
    0, 2, 4, 0, 2, 6, 0, 2, 8, 0, 3, 11,
    0, 3, 14, 0, 3, 17, 0, 3, 20, 0, 3, 23,
    0, 3, 27, 0, 4, 31, 0, 4, 35, 0, 4, 39,
    0, 4, 43, 0, 4, 47, 0, 5, 51, 0, 5, 55,
    0, 5, 59, 0, 5, 63, 0, 5, 67, 0, 6, 71,
    0, 6, 75, 0, 6, 78, 0, 6, 82, 0, 6, 85,
    0, 6, 88, 0, 7, 90, 0, 7, 93, 0, 7, 95,
    0, 7, 97, 0, 7, 98, 0, 7, 99, 0, 7, 100,
};

// interior colors by detected period, index period - 1 (mod 12)
inline constexpr std::array<std::uint8_t, 36> kPeriodPalette = {
    34, 34, 34, 190, 30, 45, 40, 120, 200, 240, 180, 20, 60, 170, 80, 150, 70, 180,
    230, 110, 40, 20, 160, 160, 200, 80, 140, 120, 120, 40, 90, 90, 200, 170, 40, 40,
};

}  // namespace multicorn
