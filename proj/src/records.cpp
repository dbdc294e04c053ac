#include "qcorr/records.hpp"

#include <cmath>
#include <stdexcept>

namespace qcorr {

void PMRecordSet::validate(double tol) const {
    const std::size_t m = measurement_labels.size();
    if (m == 0) throw std::invalid_argument("PMRecordSet: no measurements");

    std::size_t weighted = 0;
    for (const auto& row : rows) {
        if (row.expectations.size() != m) {
            throw std::invalid_argument("PMRecordSet: row '" + row.label +
                                        "' has wrong number of expectations");
        }
        for (double e : row.expectations) {
            if (std::abs(e) > 1.0 + tol) {
                throw std::invalid_argument("PMRecordSet: expectation " +
                                            std::to_string(e) + " outside [-1, 1]");
            }
        }
        if (row.weight) {
            // Weights are per-context preparation probabilities (conditional
            // ensembles sum to 1 per remote setting, not overall), so only
            // range checks apply here. The criteria ignore them either way.
            if (*row.weight < -tol || *row.weight > 1.0 + tol) {
                throw std::invalid_argument("PMRecordSet: weight outside [0, 1]");
            }
            ++weighted;
        }
    }
    if (weighted != 0 && weighted != rows.size()) {
        throw std::invalid_argument("PMRecordSet: weights must be on all rows or none");
    }
}

std::optional<std::size_t> PMRecordSet::row_index(const std::string& label) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].label == label) return i;
    }
    return std::nullopt;
}

PMRecordSet make_records(const std::vector<std::vector<double>>& rows) {
    PMRecordSet out;
    const std::size_t m = rows.empty() ? 2 : rows.front().size();
    for (std::size_t i = 0; i < m; ++i) {
        out.measurement_labels.push_back("A" + std::to_string(i));
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.rows.push_back({"rho_" + std::to_string(k), rows[k], std::nullopt});
    }
    out.validate();
    return out;
}

}  // namespace qcorr
