#pragma once

#include <algorithm>

namespace crimereg {

/// Closed lon/lat rectangle.
struct BoundingBox {
    double lon_min = 0.0;
    double lat_min = 0.0;
    double lon_max = 0.0;
    double lat_max = 0.0;

    bool contains(double lon, double lat) const {
        return lon >= lon_min && lon <= lon_max && lat >= lat_min && lat <= lat_max;
    }

    double width() const { return lon_max - lon_min; }
    double height() const { return lat_max - lat_min; }
    double center_lon() const { return 0.5 * (lon_min + lon_max); }
    double center_lat() const { return 0.5 * (lat_min + lat_max); }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

} // namespace crimereg
