#pragma once

#include <string>
#include <vector>

#include "queryrec/bm25.hpp"
#include "queryrec/generator.hpp"

namespace queryrec {

/// Grid over (k1, b). Values are min + i * step for i = 0.. while within
/// max, snapped to 9 decimals so human-chosen steps stay exact in reports.
struct GridSpec {
    double k1_min = 0.0;
    double k1_max = 3.0;
    double k1_step = 0.25;
    double b_min = 0.1;
    double b_max = 0.9;
    double b_step = 0.1;

    std::vector<double> k1_values() const;
    std::vector<double> b_values() const;
    void validate() const; // throws UsageError on bad ranges
};

/// One validation user: queries already generated by the trained generator
/// (score descending) and the held-out target item.
struct ValidationCase {
    std::vector<Query> queries;
    std::string target_item;
};

struct GridPoint {
    double k1 = 0.0;
    double b = 0.0;
    double recall = 0.0;
};

struct TuneResult {
    Bm25Params params;
    std::vector<GridPoint> report; // k1-major, both ascending
};

/// Evaluates Recall@K of retrieval + merge for every grid point and returns
/// the argmax, ties resolved to smaller k1 then smaller b. The report rows
/// carry the full grid; the returned params equal the argmax of the report.
/// Throws DataError on an empty validation set.
TuneResult tune_params(const InvertedIndex& index, const std::vector<ValidationCase>& cases,
                       std::size_t k, const GridSpec& grid, unsigned workers = 1);

/// One row per (k1, b, recall), tab separated, exact shortest-round-trip
/// number formatting so the argmax can be recovered from the report alone.
std::string grid_report_to_tsv(const std::vector<GridPoint>& report);
std::vector<GridPoint> grid_report_from_tsv(const std::string& text);

} // namespace queryrec
