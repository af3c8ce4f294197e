#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace hgchain {

enum class Species
{
    Hg0,
    Hg2,
    HgP,
};

inline constexpr std::array<Species, 3> all_species{Species::Hg0, Species::Hg2, Species::HgP};

std::string_view to_string(Species species);

/// Mercury mass split over the three airborne species, in grams.
/// Components may be negative when the value represents a delta.
struct SpeciatedMass
{
    double hg0 = 0.0;
    double hg2 = 0.0;
    double hgp = 0.0;

    double total() const noexcept
    {
        return hg0 + hg2 + hgp;
    }

    double& operator[](Species species) noexcept;
    double operator[](Species species) const noexcept;

    SpeciatedMass& operator+=(const SpeciatedMass& other) noexcept
    {
        hg0 += other.hg0;
        hg2 += other.hg2;
        hgp += other.hgp;
        return *this;
    }

    SpeciatedMass& operator-=(const SpeciatedMass& other) noexcept
    {
        hg0 -= other.hg0;
        hg2 -= other.hg2;
        hgp -= other.hgp;
        return *this;
    }

    friend SpeciatedMass operator+(SpeciatedMass lhs, const SpeciatedMass& rhs) noexcept
    {
        return lhs += rhs;
    }

    friend SpeciatedMass operator-(SpeciatedMass lhs, const SpeciatedMass& rhs) noexcept
    {
        return lhs -= rhs;
    }

    friend SpeciatedMass operator*(double factor, const SpeciatedMass& mass) noexcept
    {
        return {factor * mass.hg0, factor * mass.hg2, factor * mass.hgp};
    }

    friend bool operator==(const SpeciatedMass&, const SpeciatedMass&) = default;
};

enum class Measure
{
    Sus, // small unit shutdown
    Apcd,
    Pge,
};

inline constexpr std::array<Measure, 3> all_measures{Measure::Sus, Measure::Apcd, Measure::Pge};

std::string_view to_string(Measure measure);
std::optional<Measure> parse_measure(std::string_view text);

enum class Company
{
    Huaneng,
    Datang,
    Huadian,
    Guodian,
    Spic,
    Local,
    Private,
    Captive,
    Other,
};

std::string_view to_string(Company company);
std::optional<Company> parse_company(std::string_view text);

/// Capacity classes, lower bound inclusive: [0,100), [100,300), [300,1200), [1200,inf) MW.
enum class CapacityClass
{
    Below100,
    From100To300,
    From300To1200,
    AtLeast1200,
};

CapacityClass capacity_class(double capacityMw) noexcept;
std::string_view to_string(CapacityClass cls);
std::optional<CapacityClass> parse_capacity_class(std::string_view text);

struct GeoPoint
{
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Region label for grid cells that belong to no province.
inline constexpr std::string_view outside_region = "OUTSIDE";
/// Pseudo-producer for imported food; always carries a zero concentration delta.
inline constexpr std::string_view foreign_producer = "FOREIGN";

}
