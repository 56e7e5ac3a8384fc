/**
 * @file Rect.h
 * @brief Axis-aligned integer rectangle in image coordinates
 */

#pragma once

#include <algorithm>

namespace czi {

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    int Right() const { return x + width; }
    int Bottom() const { return y + height; }

    bool Contains(int px, int py) const {
        return px >= x && px < Right() && py >= y && py < Bottom();
    }

    bool Intersects(const Rect& o) const {
        return std::max(x, o.x) < std::min(Right(), o.Right()) &&
               std::max(y, o.y) < std::min(Bottom(), o.Bottom());
    }

    Rect Padded(int pad) const { return {x - pad, y - pad, width + 2 * pad, height + 2 * pad}; }

    Rect Shifted(int dx, int dy) const { return {x + dx, y + dy, width, height}; }

    bool operator==(const Rect&) const = default;
};

} // namespace czi
