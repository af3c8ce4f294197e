#pragma once

#include "hgchain/grid.h"
#include "hgchain/io.h"
#include "hgchain/transport.h"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hgchain::io {

/// Plain-text gridded table:
///
///   # schema: grid v1
///   nx: 20
///   ny: 20
///   cell_size_km: 50
///   origin_lat: 28
///   origin_lon: 110
///   field: region
///   <ny rows of nx whitespace separated tokens, southern row first>
///
/// Several "field:" blocks may follow each other.
struct GriddedTable
{
    std::string schema;
    int version = 0;
    int nx      = 0;
    int ny      = 0;
    double cell_size_km = 0.0;
    GeoPoint origin;
    std::vector<std::string> field_names;                   // in file order, with units
    std::map<std::string, std::vector<std::string>> fields; // row-major tokens
    std::vector<ParseIssue> issues;
};

GriddedTable parse_gridded(std::string_view text);

std::string format_region_mask(const GridSpec& grid);
std::string format_wind(const GridSpec& grid, const std::vector<double>& u, const std::vector<double>& v);

/// Sparse triplet file of a source-receptor matrix:
///
///   # schema: srm v1
///   # cells: <count>
///   # sources: <cell> <cell> ...
///   species,receptor,source,value
///   hg0,37,37,0.12          (receptor cell, source cell, grams per gram)
///   hg0,EXPORTED,37,0.5     (left the domain)
///   hg0,AIRBORNE,37,1e-9    (aloft at the horizon)
///   hg0_to_hg2,OXIDIZED,37,0.01
///   # sha256: <digest of all preceding bytes>
///
/// Only non-zero values are written; values round-trip exactly.
std::string format_srm(const SourceReceptorMatrix& srm);
SourceReceptorMatrix parse_srm(std::string_view text);

}
