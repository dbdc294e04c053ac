#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcorr/bloch.hpp"

namespace qcorr {

/// Prepared-state statistics: one row per state, one expectation per
/// measurement. Weights (preparation probabilities) are optional and ignored
/// by the feasibility criteria.
struct PMRecordSet {
    struct Row {
        std::string label;
        std::vector<double> expectations;
        std::optional<double> weight;
    };

    std::vector<std::string> measurement_labels;
    std::vector<Row> rows;

    std::size_t measurement_count() const { return measurement_labels.size(); }

    /// Throws std::invalid_argument on malformed data: ragged rows,
    /// expectations outside [-1, 1], or weights (when present on all rows)
    /// that are negative or do not sum to 1.
    void validate(double tol = kTol) const;

    std::optional<std::size_t> row_index(const std::string& label) const;
};

/// Convenience builder used by tests and generators: rows of expectations,
/// measurements labeled A0, A1, ...
PMRecordSet make_records(const std::vector<std::vector<double>>& rows);

}  // namespace qcorr
