#include "hgchain/types.h"
#include "hgchain/error.h"

#include <cassert>

namespace hgchain {

std::string_view to_string(Species species)
{
    switch (species) {
    case Species::Hg0:
        return "hg0";
    case Species::Hg2:
        return "hg2";
    case Species::HgP:
        return "hgp";
    }
    return "?";
}

double& SpeciatedMass::operator[](Species species) noexcept
{
    switch (species) {
    case Species::Hg0:
        return hg0;
    case Species::Hg2:
        return hg2;
    case Species::HgP:
        break;
    }
    return hgp;
}

double SpeciatedMass::operator[](Species species) const noexcept
{
    return const_cast<SpeciatedMass&>(*this)[species];
}

std::string_view to_string(Measure measure)
{
    switch (measure) {
    case Measure::Sus:
        return "SUS";
    case Measure::Apcd:
        return "APCD";
    case Measure::Pge:
        return "PGE";
    }
    return "?";
}

std::optional<Measure> parse_measure(std::string_view text)
{
    for (auto measure : all_measures) {
        if (to_string(measure) == text) {
            return measure;
        }
    }
    return std::nullopt;
}

namespace {
constexpr std::array<std::pair<Company, std::string_view>, 9> company_names{{
    {Company::Huaneng, "huaneng"},
    {Company::Datang, "datang"},
    {Company::Huadian, "huadian"},
    {Company::Guodian, "guodian"},
    {Company::Spic, "spic"},
    {Company::Local, "local"},
    {Company::Private, "private"},
    {Company::Captive, "captive"},
    {Company::Other, "other"},
}};

constexpr std::array<std::pair<CapacityClass, std::string_view>, 4> class_names{{
    {CapacityClass::Below100, "<100"},
    {CapacityClass::From100To300, "100-300"},
    {CapacityClass::From300To1200, "300-1200"},
    {CapacityClass::AtLeast1200, ">=1200"},
}};
}

std::string_view to_string(Company company)
{
    for (auto& [value, name] : company_names) {
        if (value == company) {
            return name;
        }
    }
    return "?";
}

std::optional<Company> parse_company(std::string_view text)
{
    for (auto& [value, name] : company_names) {
        if (name == text) {
            return value;
        }
    }
    return std::nullopt;
}

CapacityClass capacity_class(double capacityMw) noexcept
{
    if (capacityMw < 100.0) {
        return CapacityClass::Below100;
    }
    if (capacityMw < 300.0) {
        return CapacityClass::From100To300;
    }
    if (capacityMw < 1200.0) {
        return CapacityClass::From300To1200;
    }
    return CapacityClass::AtLeast1200;
}

std::string_view to_string(CapacityClass cls)
{
    for (auto& [value, name] : class_names) {
        if (value == cls) {
            return name;
        }
    }
    return "?";
}

std::optional<CapacityClass> parse_capacity_class(std::string_view text)
{
    for (auto& [value, name] : class_names) {
        if (name == text) {
            return value;
        }
    }
    return std::nullopt;
}

CflError::CflError(double dt, double maxStableDt)
: RuntimeError("Time step {} s violates the stability limit; maximal stable dt is {} s", dt, maxStableDt)
, _maxStableDt(maxStableDt)
{
}

StageError::StageError(std::string stage, const std::string& detail)
: RuntimeError("Stage '{}' failed: {}", stage, detail)
, _stage(std::move(stage))
{
}

}
