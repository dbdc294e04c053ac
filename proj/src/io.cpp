#include "qcorr/io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace qcorr {

using nlohmann::json;

double round_sig(double v, int digits) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

namespace {

const json& require(const json& doc, const char* field) {
    auto it = doc.find(field);
    if (it == doc.end()) {
        throw SchemaError(std::string("missing field \"") + field + "\"");
    }
    return *it;
}

void check_envelope(const json& doc, const char* kind) {
    if (!doc.is_object()) throw SchemaError("document is not a JSON object");
    const json& schema = require(doc, "schema");
    if (!schema.is_string() || schema.get<std::string>() != kSchemaId) {
        throw SchemaError(std::string("\"schema\" must be \"") + kSchemaId + "\"");
    }
    const json& k = require(doc, "kind");
    if (!k.is_string() || k.get<std::string>() != kind) {
        throw SchemaError(std::string("\"kind\" must be \"") + kind + "\"");
    }
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + " is not a number");
    return v.get<double>();
}

}  // namespace

BellCorrelation parse_bell_json(const json& doc) {
    check_envelope(doc, "bell");
    const json& p = require(doc, "p");
    BellCorrelation corr;
    if (!p.is_array() || p.size() != 2) throw SchemaError("\"p\" must be p[2][2][2][2]");
    for (int alpha = 0; alpha < 2; ++alpha) {
        const json& l1 = p[alpha];
        if (!l1.is_array() || l1.size() != 2) throw SchemaError("\"p\" must be p[2][2][2][2]");
        for (int beta = 0; beta < 2; ++beta) {
            const json& l2 = l1[beta];
            if (!l2.is_array() || l2.size() != 2) throw SchemaError("\"p\" must be p[2][2][2][2]");
            for (int a = 0; a < 2; ++a) {
                const json& l3 = l2[a];
                if (!l3.is_array() || l3.size() != 2) throw SchemaError("\"p\" must be p[2][2][2][2]");
                for (int b = 0; b < 2; ++b) {
                    corr.p[alpha][beta][a][b] = number_at(
                        l3[b], "p[" + std::to_string(alpha) + "][" +
                                   std::to_string(beta) + "][" + std::to_string(a) +
                                   "][" + std::to_string(b) + "]");
                }
            }
        }
    }
    try {
        corr.validate(1e-6);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return corr;
}

PMRecordSet parse_pm_json(const json& doc) {
    check_envelope(doc, "pm");
    PMRecordSet rec;
    const json& meas = require(doc, "measurements");
    if (!meas.is_array() || meas.empty()) {
        throw SchemaError("\"measurements\" must be a nonempty array");
    }
    for (const auto& m : meas) {
        if (!m.is_string()) throw SchemaError("measurement labels must be strings");
        rec.measurement_labels.push_back(m.get<std::string>());
    }
    const json& rows = require(doc, "rows");
    if (!rows.is_array() || rows.empty()) {
        throw SchemaError("\"rows\" must be a nonempty array");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const json& r = rows[k];
        if (!r.is_object()) throw SchemaError("rows[" + std::to_string(k) + "] is not an object");
        PMRecordSet::Row row;
        const json& label = require(r, "label");
        if (!label.is_string()) throw SchemaError("row label must be a string");
        row.label = label.get<std::string>();
        if (r.contains("weight")) {
            row.weight = number_at(r["weight"], "rows[" + std::to_string(k) + "].weight");
        }
        const json& ex = require(r, "expectations");
        if (!ex.is_array()) throw SchemaError("\"expectations\" must be an array");
        for (std::size_t m = 0; m < ex.size(); ++m) {
            row.expectations.push_back(number_at(
                ex[m], "rows[" + std::to_string(k) + "].expectations[" +
                           std::to_string(m) + "]"));
        }
        rec.rows.push_back(std::move(row));
    }
    try {
        rec.validate(1e-6);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return rec;
}

ParsedInput load_input_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("document is not a JSON object");
    const json& kind = require(doc, "kind");
    ParsedInput out;
    if (kind == "bell") {
        out.bell = parse_bell_json(doc);
    } else if (kind == "pm") {
        out.records = parse_pm_json(doc);
    } else {
        throw SchemaError("\"kind\" must be \"bell\" or \"pm\"");
    }
    return out;
}

json to_json(const BellCorrelation& corr) {
    json p = json::array();
    for (int alpha = 0; alpha < 2; ++alpha) {
        json l1 = json::array();
        for (int beta = 0; beta < 2; ++beta) {
            json l2 = json::array();
            for (int a = 0; a < 2; ++a) {
                json l3 = json::array();
                for (int b = 0; b < 2; ++b) {
                    l3.push_back(round_sig(corr.p[alpha][beta][a][b]));
                }
                l2.push_back(std::move(l3));
            }
            l1.push_back(std::move(l2));
        }
        p.push_back(std::move(l1));
    }
    return json{{"schema", kSchemaId}, {"kind", "bell"}, {"p", std::move(p)}};
}

json to_json(const PMRecordSet& records) {
    json rows = json::array();
    for (const auto& r : records.rows) {
        json row{{"label", r.label}};
        json ex = json::array();
        for (double e : r.expectations) ex.push_back(round_sig(e));
        row["expectations"] = std::move(ex);
        if (r.weight) row["weight"] = round_sig(*r.weight);
        rows.push_back(std::move(row));
    }
    return json{{"schema", kSchemaId},
                {"kind", "pm"},
                {"measurements", records.measurement_labels},
                {"rows", std::move(rows)}};
}

json to_json(const FeasibilityReport& report) {
    json out{{"pair", {report.i, report.j}},
             {"feasible", report.feasible},
             {"margin", round_sig(report.margin)},
             {"max_g_minus", round_sig(report.max_g_minus)},
             {"min_g_plus", round_sig(report.min_g_plus)}};
    if (report.c_interval) {
        out["c_interval"] = {round_sig((*report.c_interval)[0]),
                             round_sig((*report.c_interval)[1])};
    }
    if (report.witness_params) {
        const auto& w = *report.witness_params;
        out["witness_params"] = {{"r_i", round_sig(w.r_i)},
                                 {"r_j", round_sig(w.r_j)},
                                 {"r_prime_i", round_sig(w.r_prime_i)},
                                 {"r_prime_j", round_sig(w.r_prime_j)},
                                 {"c", round_sig(w.c)}};
    }
    return out;
}

json to_json(const PairwiseReport& report) {
    json pairs = json::array();
    for (const auto& p : report.pairs) pairs.push_back(to_json(p));
    return json{{"feasible", report.feasible}, {"pairs", std::move(pairs)}};
}

namespace {

json to_json(const PartyParams& p) {
    json out{{"r0", round_sig(p.r0)},
             {"r1", round_sig(p.r1)},
             {"r_prime0", {round_sig(p.rp0.lo), round_sig(p.rp0.hi)}},
             {"r_prime1", {round_sig(p.rp1.lo), round_sig(p.rp1.hi)}}};
    if (p.c_unconstrained) {
        out["c"] = nullptr;
    } else {
        out["c"] = {round_sig(p.c.lo), round_sig(p.c.hi)};
    }
    return out;
}

}  // namespace

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::SeparableFeasible: return "separable-feasible";
        case Verdict::Entangled: return "entangled";
        default: return "inconclusive";
    }
}

json to_json(const VerdictReport& report) {
    json out{{"verdict", verdict_name(report.verdict)},
             {"residual", round_sig(report.residual)},
             {"inference_unique", report.inference_unique},
             {"inferred_params",
              {{"alice", to_json(report.alice)}, {"bob", to_json(report.bob)}}}};
    if (report.certificate) {
        // Row-major entries as re/im pairs.
        json cert = json::array();
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                cert.push_back(round_sig((*report.certificate)(i, j).real()));
                cert.push_back(round_sig((*report.certificate)(i, j).imag()));
            }
        }
        out["certificate_state"] = std::move(cert);
    }
    return out;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t k = 0; k < names.size(); ++k) {
        impl_->out << (k ? "," : "") << names[k];
    }
    impl_->out << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    char buf[64];
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g", values[k]);
        impl_->out << (k ? "," : "") << buf;
    }
    impl_->out << "\n";
}

}  // namespace qcorr
