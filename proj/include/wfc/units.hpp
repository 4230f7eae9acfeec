#pragma once

// Conversions between the boundary units (Mbps, ms, theta per bit) and the
// internal ones (Mb per slot, slots, theta per Mb).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wfc::units {

/// Documented slot length.
inline constexpr double kDefaultSlotMs = 1.0;

inline double mbps_to_mb_per_slot(double mbps, double slot_ms = kDefaultSlotMs) { return mbps * slot_ms / 1000.0; }
inline double mb_per_slot_to_mbps(double mb, double slot_ms = kDefaultSlotMs) { return mb * 1000.0 / slot_ms; }

inline double theta_per_bit_to_per_mb(double theta) { return theta * 1e6; }
inline double theta_per_mb_to_per_bit(double theta) { return theta / 1e6; }

inline double slots_to_ms(std::int64_t slots, double slot_ms = kDefaultSlotMs) {
    return static_cast<double>(slots) * slot_ms;
}

/// Throws std::invalid_argument unless ms is a whole number of slots.
inline std::int64_t ms_to_slots(double ms, double slot_ms = kDefaultSlotMs) {
    const double slots = ms / slot_ms;
    const double rounded = std::round(slots);
    if (!std::isfinite(slots) || std::abs(slots - rounded) > 1e-9 * std::max(1.0, std::abs(slots))) {
        throw std::invalid_argument(std::to_string(ms) + " ms is not a whole number of " + std::to_string(slot_ms) +
                                    " ms slots");
    }
    return static_cast<std::int64_t>(rounded);
}

}  // namespace wfc::units
