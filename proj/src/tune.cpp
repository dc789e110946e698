#include "queryrec/tune.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "queryrec/errors.hpp"
#include "queryrec/metrics.hpp"
#include "queryrec/parallel.hpp"
#include "queryrec/recommend.hpp"

namespace queryrec {

namespace {

std::vector<double> lattice(double min, double max, double step) {
    std::vector<double> values;
    for (int i = 0;; ++i) {
        double value = min + static_cast<double>(i) * step;
        value = std::round(value * 1e9) / 1e9;
        if (value > max + 1e-9) {
            break;
        }
        values.push_back(value);
    }
    return values;
}

std::string format_double(double value) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

} // namespace

std::vector<double> GridSpec::k1_values() const {
    return lattice(k1_min, k1_max, k1_step);
}

std::vector<double> GridSpec::b_values() const {
    return lattice(b_min, b_max, b_step);
}

void GridSpec::validate() const {
    if (!(k1_min >= 0.0 && k1_max <= 3.0 && k1_min <= k1_max && k1_step > 0.0)) {
        throw UsageError("k1 grid must satisfy 0 <= min <= max <= 3 with a positive step");
    }
    if (!(b_min >= 0.0 && b_max <= 1.0 && b_min <= b_max && b_step > 0.0)) {
        throw UsageError("b grid must satisfy 0 <= min <= max <= 1 with a positive step");
    }
}

TuneResult tune_params(const InvertedIndex& index, const std::vector<ValidationCase>& cases,
                       std::size_t k, const GridSpec& grid, unsigned workers) {
    grid.validate();
    if (cases.empty()) {
        throw DataError("cannot tune on an empty validation set");
    }
    if (k < 1) {
        throw std::invalid_argument("tuning K must be at least 1");
    }

    const auto k1s = grid.k1_values();
    const auto bs = grid.b_values();
    std::vector<GridPoint> report(k1s.size() * bs.size());

    parallel_for(report.size(), workers, [&](std::size_t point) {
        const double k1 = k1s[point / bs.size()];
        const double b = bs[point % bs.size()];
        const Bm25Params params{k1, b};

        double hits = 0.0;
        for (const auto& validation : cases) {
            std::vector<std::vector<SearchHit>> hit_lists;
            hit_lists.reserve(validation.queries.size());
            for (const auto& query : validation.queries) {
                hit_lists.push_back(index.search(params, query.text, k));
            }
            const auto merged = merge_results(hit_lists, k);
            std::vector<std::string> items;
            items.reserve(merged.size());
            for (const auto& item : merged) {
                items.push_back(item.item_id);
            }
            hits += static_cast<double>(recall_at_k(items, validation.target_item, k));
        }
        report[point] = GridPoint{k1, b, hits / static_cast<double>(cases.size())};
    });

    std::size_t best = 0;
    for (std::size_t point = 1; point < report.size(); ++point) {
        if (report[point].recall > report[best].recall) {
            best = point; // scan order is k1-major ascending: ties keep smaller k1, then smaller b
        }
    }

    TuneResult result;
    result.params = Bm25Params{report[best].k1, report[best].b};
    result.report = std::move(report);
    return result;
}

std::string grid_report_to_tsv(const std::vector<GridPoint>& report) {
    std::string out = "k1\tb\trecall\n";
    for (const auto& point : report) {
        out += format_double(point.k1);
        out += '\t';
        out += format_double(point.b);
        out += '\t';
        out += format_double(point.recall);
        out += '\n';
    }
    return out;
}

std::vector<GridPoint> grid_report_from_tsv(const std::string& text) {
    std::vector<GridPoint> report;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        GridPoint point;
        if (!(row >> point.k1 >> point.b >> point.recall)) {
            throw DataError("malformed grid report row: " + line);
        }
        report.push_back(point);
    }
    return report;
}

} // namespace queryrec
