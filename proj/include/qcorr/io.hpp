#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qcorr/criteria.hpp"
#include "qcorr/entanglement.hpp"
#include "qcorr/scenarios.hpp"

namespace qcorr {

/// Input that fails schema validation; the CLI maps it to exit code 2.
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kSchemaId = "qubit-corr/v1";

/// Rounds to `digits` significant decimal digits; report serialization runs
/// every floating-point value through this so repeated runs are
/// byte-identical.
double round_sig(double v, int digits = 12);

/// Parses a correlation document ("kind": "bell", nested p[alpha][beta][a][b]).
BellCorrelation parse_bell_json(const nlohmann::json& doc);
/// Parses a record document ("kind": "pm", measurements + rows).
PMRecordSet parse_pm_json(const nlohmann::json& doc);
/// Reads a file and dispatches on "kind". Exactly one of the outputs is set.
struct ParsedInput {
    std::optional<BellCorrelation> bell;
    std::optional<PMRecordSet> records;
};
ParsedInput load_input_file(const std::string& path);

nlohmann::json to_json(const BellCorrelation& corr);
nlohmann::json to_json(const PMRecordSet& records);
nlohmann::json to_json(const FeasibilityReport& report);
nlohmann::json to_json(const PairwiseReport& report);
nlohmann::json to_json(const VerdictReport& report);

std::string verdict_name(Verdict v);

/// Serializes with stable formatting (2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& doc);

/// Writes CSV rows with '.' decimal separator and %.12g formatting.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);

  private:
    struct Impl;
    Impl* impl_;
};

}  // namespace qcorr
