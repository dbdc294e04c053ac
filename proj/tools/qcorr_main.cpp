// Command-line front end: ingest correlation files, run feasibility checks,
// inference, witnesses and entanglement detection; emit JSON verdicts and CSV
// curves. Exit codes: 0 feasible / success, 1 infeasible / entangled-free
// verdict failed, 2 input error.

#include <clocale>
#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcorr/entanglement.hpp"
#include "qcorr/inference.hpp"
#include "qcorr/io.hpp"
#include "qcorr/oracle.hpp"
#include "qcorr/witnesses.hpp"

namespace {

using nlohmann::json;
using namespace qcorr;

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;

struct GlobalOptions {
    double tol = 1e-9;
    int grid = 101;
    std::uint64_t seed = 0;
    int samples = 1000;
    std::string format = "json";
    std::string out;
    bool verbose = false;
};

GridConfig grid_config(const GlobalOptions& opt) {
    GridConfig cfg;
    cfg.coarse_n = opt.grid;
    cfg.tol = std::max(opt.tol, 1e-12);
    return cfg;
}

void emit(const GlobalOptions& opt, const std::string& text) {
    if (opt.out.empty() || opt.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out);
    if (!f) throw SchemaError("cannot open '" + opt.out + "' for writing");
    f << text;
}

PMRecordSet records_for_scenario(const ParsedInput& input, const std::string& scenario,
                                 const std::string& party) {
    if (scenario == "pm") {
        if (!input.records) throw SchemaError("scenario pm expects a \"pm\" document");
        return *input.records;
    }
    if (!input.bell) throw SchemaError("scenario bell expects a \"bell\" document");
    return bell_to_conditional(*input.bell,
                               party == "B" ? Party::Bob : Party::Alice)
        .records;
}

int cmd_check(const GlobalOptions& opt, const std::string& in_path,
              const std::string& mode, const std::string& scenario) {
    const ParsedInput input = load_input_file(in_path);
    const CriterionMode cm = mode == "pvm" ? CriterionMode::Pvm : CriterionMode::Povm;
    json out;
    bool feasible = true;
    if (scenario == "bell") {
        for (const char* party : {"A", "B"}) {
            PMRecordSet rec = records_for_scenario(input, scenario, party);
            PairwiseReport rep = pairwise_feasible(rec, cm, grid_config(opt));
            feasible = feasible && rep.feasible;
            out["parties"][party] = to_json(rep);
        }
    } else {
        PMRecordSet rec = records_for_scenario(input, scenario, "A");
        PairwiseReport rep = pairwise_feasible(rec, cm, grid_config(opt));
        feasible = rep.feasible;
        out = to_json(rep);
    }
    out["feasible"] = feasible;
    out["mode"] = mode;
    emit(opt, dump_json(out));
    return feasible ? kExitFeasible : kExitInfeasible;
}

json region_to_json(const ParamRegion& region, bool verbose) {
    json out{{"unique", region.unique},
             {"grid_step", round_sig(region.grid_step)},
             {"cell_count", region.cells.size()}};
    json cells = json::array();
    std::size_t limit = verbose ? region.cells.size()
                                : std::min<std::size_t>(region.cells.size(), 16);
    for (std::size_t k = 0; k < limit; ++k) {
        const RegionCell& c = region.cells[k];
        cells.push_back(
            {{"r_i", round_sig(c.r_i)},
             {"r_j", round_sig(c.r_j)},
             {"r_prime_i", {round_sig(c.r_prime_i.lo), round_sig(c.r_prime_i.hi)}},
             {"r_prime_j", {round_sig(c.r_prime_j.lo), round_sig(c.r_prime_j.hi)}},
             {"scaled_c", {round_sig(c.scaled_c.lo), round_sig(c.scaled_c.hi)}},
             {"margin", round_sig(c.margin)},
             {"c_unconstrained", c.c_unconstrained}});
    }
    out["cells"] = std::move(cells);
    return out;
}

int cmd_infer(const GlobalOptions& opt, const std::string& in_path,
              const std::string& scenario, const std::string& party) {
    const ParsedInput input = load_input_file(in_path);
    PMRecordSet rec = records_for_scenario(input, scenario, party);
    if (rec.measurement_count() < 2 || rec.rows.empty()) {
        throw SchemaError("inference needs at least 2 measurements and 1 row");
    }
    GridConfig cfg = grid_config(opt);
    cfg.tol = std::max(cfg.tol, 1e-9);
    const ParamRegion region = infer_r_region(rec, 0, 1, cfg);
    json out{{"region", region_to_json(region, opt.verbose)}};
    out["feasible"] = !region.cells.empty();
    if (!region.cells.empty()) {
        // State solutions for the best cell when the angle is pinned.
        const RegionCell& best = region.cells.front();
        CInterval ci;
        try {
            ci = infer_c_interval(rec, 0, 1, best.r_i, best.r_j,
                                  best.r_prime_i.mid(), best.r_prime_j.mid(), 1e-9);
        } catch (const std::domain_error&) {
            // Mid scales can be inadmissible on razor-thin cells; fall back
            // to the cell's own bounds.
            ci.c = best.scaled_c;
            ci.unconstrained = best.c_unconstrained;
        }
        out["c_interval"] = {round_sig(ci.c.lo), round_sig(ci.c.hi)};
        out["c_unconstrained"] = ci.unconstrained;
        if (!ci.unconstrained && ci.c.width() < 1e-6) {
            const double c = ci.c.mid();
            json states = json::array();
            const Eigen::Vector3d a0 = Eigen::Vector3d::UnitZ();
            const Eigen::Vector3d a1(std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, c);
            for (const auto& row : rec.rows) {
                const double A0 = (row.expectations[0] - best.r_i) /
                                  std::max(best.r_prime_i.mid(), 1e-12);
                const double A1 = (row.expectations[1] - best.r_j) /
                                  std::max(best.r_prime_j.mid(), 1e-12);
                json st{{"label", row.label}};
                try {
                    const double tb = t_bound(A0, A1, c, 1e-6);
                    const BlochState s = reconstruct_state(A0, A1, a0, a1, 0.0);
                    st["s"] = {round_sig(s.s.x()), round_sig(s.s.y()),
                               round_sig(s.s.z())};
                    st["t_bound"] = round_sig(tb);
                } catch (const std::exception& e) {
                    st["error"] = e.what();
                }
                states.push_back(std::move(st));
            }
            out["states"] = std::move(states);
        }
    }
    emit(opt, dump_json(out));
    return region.cells.empty() ? kExitInfeasible : kExitFeasible;
}

int cmd_boundary(const GlobalOptions& opt, const std::string& family_name,
                 const std::string& mode, const std::string& out_path) {
    const Family family = family_name == "qpm" ? Family::QPm : Family::QBell;
    const CriterionMode cm = mode == "pvm" ? CriterionMode::Pvm : CriterionMode::Povm;
    GridConfig cfg = grid_config(opt);
    cfg.tol = std::max(cfg.tol, 1e-9);

    std::vector<double> xs;
    const int nx = std::max(opt.samples / 10, 12);
    for (int k = 0; k <= nx; ++k) xs.push_back(0.72 * k / nx);
    const auto curve =
        scan_boundary(family, cm, xs, 1e-4, ScanAxis::LargestYForX, cfg);
    {
        CsvWriter csv(out_path);
        csv.header({"x", "y_star", "margin"});
        for (const auto& pt : curve) csv.row({pt.fixed, pt.star, pt.margin});
    }

    auto sibling = [&](const std::string& tag) {
        const auto dot = out_path.rfind('.');
        return dot == std::string::npos ? out_path + "_" + tag
                                        : out_path.substr(0, dot) + "_" + tag +
                                              out_path.substr(dot);
    };

    // Closed-form boundary overlay, in family coordinates.
    {
        CsvWriter csv(sibling("sm"));
        csv.header({"theta", "x", "y", "r"});
        for (int k = 0; k <= 200; ++k) {
            const double theta = 1.062 + (M_PI / 2 - 1e-4 - 1.062) * k / 200.0;
            const SmBoundaryPoint p = sm_boundary(theta);
            if (!p.on_branch) continue;
            csv.row({p.theta, p.family_x, p.family_y, p.r});
        }
    }

    if (family == Family::QBell) {
        // Witness threshold curves: largest y per x with the witness bound kept.
        CsvWriter svw(sibling("svw"));
        svw.header({"x", "y_star"});
        CsvWriter npa(sibling("npa"));
        npa.header({"x", "y_star"});
        for (double x : xs) {
            auto scan_curve = [&](auto&& keeps) {
                double lo = 0.0, hi = std::max(0.0, 1.0 - x - 1e-9);
                if (!keeps(x, lo)) return -1.0;
                if (keeps(x, hi)) return hi;
                while (hi - lo > 1e-7) {
                    const double mid = 0.5 * (lo + hi);
                    (keeps(x, mid) ? lo : hi) = mid;
                }
                return lo;
            };
            const double ys = scan_curve([](double xx, double yy) {
                return !svw_witness(qbell(xx, yy)).excluded;
            });
            const double yn = scan_curve([](double xx, double yy) {
                const WitnessValue w = npa_arcsin(qbell(xx, yy));
                return w.degenerate || !w.excluded;
            });
            svw.row({x, ys});
            npa.row({x, yn});
        }
    } else {
        CsvWriter bqb(sibling("bqb"));
        bqb.header({"x", "y_star"});
        const std::array<std::string, 4> arrangement{"0|0", "1|0", "0|1", "1|1"};
        for (double x : xs) {
            double lo = 0.0, hi = std::max(0.0, 1.0 - x - 1e-9);
            auto keeps = [&](double yy) {
                try {
                    return !bqb_det(qpm(x, yy), arrangement).excluded;
                } catch (const std::exception&) {
                    return false;
                }
            };
            double star = -1.0;
            if (keeps(lo)) {
                if (keeps(hi)) {
                    star = hi;
                } else {
                    while (hi - lo > 1e-7) {
                        const double mid = 0.5 * (lo + hi);
                        (keeps(mid) ? lo : hi) = mid;
                    }
                    star = lo;
                }
            }
            bqb.row({x, star});
        }
    }
    if (opt.verbose) std::cerr << "boundary curves written to " << out_path << "\n";
    return kExitFeasible;
}

int cmd_witness(const GlobalOptions& opt, const std::string& in_path,
                const std::string& which) {
    const ParsedInput input = load_input_file(in_path);
    WitnessValue w;
    if (which == "bqb") {
        PMRecordSet rec;
        if (input.records) {
            rec = *input.records;
        } else {
            rec = bell_to_conditional(*input.bell, Party::Alice).records;
        }
        if (rec.rows.size() != 4) {
            throw SchemaError("bqb needs exactly 4 states (got " +
                              std::to_string(rec.rows.size()) + ")");
        }
        w = bqb_det(rec, std::array<std::size_t, 4>{0, 1, 2, 3});
    } else {
        if (!input.bell) throw SchemaError(which + " expects a \"bell\" document");
        w = which == "svw" ? svw_witness(*input.bell) : npa_arcsin(*input.bell);
    }
    json out{{"witness", which},
             {"value", round_sig(w.value)},
             {"threshold", round_sig(w.threshold)},
             {"excluded", w.excluded},
             {"degenerate", w.degenerate}};
    emit(opt, dump_json(out));
    return w.excluded ? kExitInfeasible : kExitFeasible;
}

int cmd_entangle(const GlobalOptions& opt, const std::string& in_path) {
    const ParsedInput input = load_input_file(in_path);
    if (!input.bell) throw SchemaError("entangle expects a \"bell\" document");
    GridConfig cfg = grid_config(opt);
    cfg.tol = std::max(cfg.tol, 1e-9);
    VerdictReport report;
    try {
        report = entanglement_verdict(*input.bell, cfg, 1e-8, opt.seed);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    emit(opt, dump_json(to_json(report)));
    return kExitFeasible;
}

int cmd_sample(const GlobalOptions& opt, const std::string& family_name,
               bool projective, const std::string& out_path) {
    const Family family = family_name == "qpm" ? Family::QPm : Family::QBell;
    const auto points =
        sample_achievable(family, opt.samples, opt.seed, projective, 1e-6);
    CsvWriter csv(out_path);
    csv.header({"x", "y", "residual"});
    for (const auto& pt : points) csv.row({pt.x, pt.y, pt.residual});
    if (opt.verbose) {
        std::cerr << points.size() << " of " << opt.samples
                  << " samples projected onto the family\n";
    }
    return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{
        "qcorr: feasibility, device inference and entanglement detection for "
        "correlations from independent qubit devices"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opt;
    app.add_option("--tol", opt.tol, "feasibility tolerance")->capture_default_str();
    app.add_option("--grid", opt.grid, "offset grid resolution (>= 11)")
        ->check(CLI::Range(11, 100001))
        ->capture_default_str();
    app.add_option("--seed", opt.seed, "random seed")->capture_default_str();
    app.add_option("--samples", opt.samples, "sample count / curve resolution")
        ->capture_default_str();
    app.add_option("--format", opt.format, "output format (json|csv)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", opt.out, "output path (default stdout)");
    app.add_flag("--verbose", opt.verbose, "verbose diagnostics");

    std::string in_path, mode = "povm", scenario = "pm", party = "A";
    std::string family = "qbell", which = "svw", out_csv = "curve.csv";
    bool projective = false;

    auto* check = app.add_subcommand("check", "feasibility of a correlation file");
    check->add_option("--in", in_path, "input JSON file")->required();
    check->add_option("--mode", mode, "criterion (pvm|povm)")
        ->check(CLI::IsMember({"pvm", "povm"}));
    check->add_option("--scenario", scenario, "input scenario (pm|bell)")
        ->check(CLI::IsMember({"pm", "bell"}));

    auto* infer = app.add_subcommand("infer", "measurement/state inference");
    infer->add_option("--in", in_path, "input JSON file")->required();
    infer->add_option("--scenario", scenario, "input scenario (pm|bell)")
        ->check(CLI::IsMember({"pm", "bell"}));
    infer->add_option("--party", party, "conditioned party for bell input (A|B)")
        ->check(CLI::IsMember({"A", "B"}));

    auto* boundary = app.add_subcommand("boundary", "feasible-frontier curves");
    boundary->add_option("--family", family, "correlation family (qbell|qpm)")
        ->check(CLI::IsMember({"qbell", "qpm"}));
    boundary->add_option("--criterion", mode, "criterion (pvm|povm)")
        ->check(CLI::IsMember({"pvm", "povm"}));
    boundary->add_option("--out", out_csv, "output CSV path")->required();

    auto* witness = app.add_subcommand("witness", "reference witness values");
    witness->add_option("--in", in_path, "input JSON file")->required();
    witness->add_option("--which", which, "witness (svw|npa|bqb)")
        ->check(CLI::IsMember({"svw", "npa", "bqb"}));

    auto* entangle = app.add_subcommand("entangle", "entanglement verdict");
    entangle->add_option("--in", in_path, "input bell JSON file")->required();

    auto* sample = app.add_subcommand("sample", "achievable-region point cloud");
    sample->add_option("--family", family, "correlation family (qbell|qpm)")
        ->check(CLI::IsMember({"qbell", "qpm"}));
    sample->add_flag("--projective", projective, "restrict to sharp measurements");
    sample->add_option("--out", out_csv, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(opt, in_path, mode, scenario);
        if (infer->parsed()) return cmd_infer(opt, in_path, scenario, party);
        if (boundary->parsed()) return cmd_boundary(opt, family, mode, out_csv);
        if (witness->parsed()) return cmd_witness(opt, in_path, which);
        if (entangle->parsed()) return cmd_entangle(opt, in_path);
        if (sample->parsed()) return cmd_sample(opt, family, projective, out_csv);
    } catch (const qcorr::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
