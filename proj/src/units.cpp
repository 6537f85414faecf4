#include "ionweave/units.hpp"

#include "ionweave/errors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ionweave {

namespace {

struct UnitEntry {
    std::string_view name;
    Dimension dim;
    double scale;
};

constexpr double kDeg = std::numbers::pi / 180.0;

constexpr std::array kUnits = {
    UnitEntry{"Hz", Dimension::frequency, 1.0},
    UnitEntry{"kHz", Dimension::frequency, 1e3},
    UnitEntry{"MHz", Dimension::frequency, 1e6},
    UnitEntry{"GHz", Dimension::frequency, 1e9},
    UnitEntry{"s", Dimension::time, 1.0},
    UnitEntry{"ms", Dimension::time, 1e-3},
    UnitEntry{"us", Dimension::time, 1e-6},
    UnitEntry{"\xC2\xB5s", Dimension::time, 1e-6},
    UnitEntry{"ns", Dimension::time, 1e-9},
    UnitEntry{"m", Dimension::length, 1.0},
    UnitEntry{"mm", Dimension::length, 1e-3},
    UnitEntry{"um", Dimension::length, 1e-6},
    UnitEntry{"\xC2\xB5m", Dimension::length, 1e-6},
    UnitEntry{"nm", Dimension::length, 1e-9},
    UnitEntry{"kg", Dimension::mass, 1.0},
    UnitEntry{"u", Dimension::mass, constants::atomic_mass_unit},
    UnitEntry{"amu", Dimension::mass, constants::atomic_mass_unit},
    UnitEntry{"rad/m", Dimension::wavevector, 1.0},
    UnitEntry{"1/m", Dimension::wavevector, 1.0},
    UnitEntry{"rad/um", Dimension::wavevector, 1e6},
    UnitEntry{"1/um", Dimension::wavevector, 1e6},
    UnitEntry{"rad/nm", Dimension::wavevector, 1e9},
    UnitEntry{"Hz/m", Dimension::gradient, 1.0},
    UnitEntry{"Hz/um", Dimension::gradient, 1e6},
    UnitEntry{"kHz/um", Dimension::gradient, 1e9},
    UnitEntry{"kHz/mm", Dimension::gradient, 1e6},
    UnitEntry{"MHz/m", Dimension::gradient, 1e6},
    UnitEntry{"rad", Dimension::angle, 1.0},
    UnitEntry{"deg", Dimension::angle, kDeg},
};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::string_view dimension_name(Dimension d)
{
    switch (d) {
    case Dimension::frequency: return "frequency";
    case Dimension::time: return "time";
    case Dimension::length: return "length";
    case Dimension::mass: return "mass";
    case Dimension::wavevector: return "wavevector";
    case Dimension::gradient: return "frequency gradient";
    case Dimension::angle: return "angle";
    }
    return "unknown";
}

double parse_quantity(std::string_view text, Dimension dim)
{
    const std::string_view s = trim(text);
    // strtod accepts things like "1e5", "-71.14", "inf"; we want a finite value
    const std::string buf(s);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) {
        throw ValidationError("expected a " + std::string(dimension_name(dim)) +
                              " like '1.5 kHz', got '" + buf + "'");
    }
    if (!std::isfinite(value)) {
        throw ValidationError("non-finite quantity '" + buf + "'");
    }
    const std::string_view unit = trim(std::string_view(end));
    if (unit.empty()) {
        throw ValidationError("quantity '" + buf + "' is missing a unit suffix (" +
                              std::string(dimension_name(dim)) + " expected)");
    }
    for (const auto& u : kUnits) {
        if (u.name == unit) {
            if (u.dim != dim) {
                throw ValidationError("unit '" + std::string(unit) + "' is a " +
                                      std::string(dimension_name(u.dim)) + ", expected a " +
                                      std::string(dimension_name(dim)));
            }
            return value * u.scale;
        }
    }
    throw ValidationError("unknown unit '" + std::string(unit) + "' in '" + buf + "'");
}

std::string format_quantity(double si_value, std::string_view unit, int precision)
{
    for (const auto& u : kUnits) {
        if (u.name == unit) {
            std::ostringstream os;
            os.precision(precision);
            os << si_value / u.scale << ' ' << unit;
            return os.str();
        }
    }
    throw ValidationError("unknown unit '" + std::string(unit) + "'");
}

} // namespace ionweave
