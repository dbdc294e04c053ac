#include "qcorr/witnesses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcorr {

WitnessValue svw_witness(const BellCorrelation& corr) {
    corr.validate();
    double best = 0.0;
    for (int beta = 0; beta < 2; ++beta) {
        for (int betap = 0; betap < 2; ++betap) {
            double sum = 0.0;
            for (int b = 0; b < 2; ++b) {
                for (int bp = 0; bp < 2; ++bp) {
                    double m = std::numeric_limits<double>::infinity();
                    for (int alpha = 0; alpha < 2; ++alpha) {
                        double s = 0.0;
                        for (int a = 0; a < 2; ++a) {
                            s += std::sqrt(std::max(corr.p[alpha][beta][a][b], 0.0)) *
                                 std::sqrt(std::max(corr.p[alpha][betap][a][bp], 0.0));
                        }
                        m = std::min(m, s * s);
                    }
                    sum += m;
                }
            }
            const double w = sum > 1e-15
                                 ? 1.0 / sum
                                 : std::numeric_limits<double>::infinity();
            best = std::max(best, w);
        }
    }
    WitnessValue out;
    out.value = best;
    out.threshold = 2.0;
    out.excluded = best > out.threshold + kTol;
    return out;
}

WitnessValue npa_arcsin(const BellCorrelation& corr, double tol) {
    corr.validate();
    WitnessValue out;
    out.threshold = M_PI;
    double total = 0.0;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            const double e = corr.correlator(alpha, beta);
            const double ma = corr.marginal_alice(alpha, beta);
            const double mb = corr.marginal_bob(beta, alpha);
            const double cov = e - ma * mb;
            double d;
            if (std::abs(ma) >= 1.0 - tol || std::abs(mb) >= 1.0 - tol) {
                if (std::abs(cov) <= tol) {
                    d = 0.0;  // deterministic marginal with vanishing covariance
                } else {
                    out.degenerate = true;
                    return out;
                }
            } else {
                d = cov / std::sqrt((1.0 - ma * ma) * (1.0 - mb * mb));
            }
            d = std::clamp(d, -1.0, 1.0);
            total += ((alpha & beta) ? -1.0 : 1.0) * std::asin(d);
        }
    }
    out.value = std::abs(total);
    out.excluded = out.value > out.threshold + kTol;
    return out;
}

namespace {

WitnessValue bqb_impl(const PMRecordSet& records,
                      const std::array<std::size_t, 4>& idx) {
    records.validate();
    if (records.measurement_count() != 2) {
        throw std::invalid_argument("bqb_det: needs exactly 2 measurements");
    }
    for (std::size_t k : idx) {
        if (k >= records.rows.size()) {
            throw std::invalid_argument("bqb_det: arrangement index out of range");
        }
    }
    double w[2][2];
    for (int m = 0; m < 2; ++m) {
        for (int n = 0; n < 2; ++n) {
            w[m][n] = records.rows[idx[2 * n]].expectations[m] -
                      records.rows[idx[2 * n + 1]].expectations[m];
        }
    }
    WitnessValue out;
    out.value = std::abs(w[0][0] * w[1][1] - w[0][1] * w[1][0]);
    out.threshold = 1.0;
    out.excluded = out.value > out.threshold + kTol;
    return out;
}

}  // namespace

WitnessValue bqb_det(const PMRecordSet& records,
                     const std::array<std::size_t, 4>& arrangement) {
    return bqb_impl(records, arrangement);
}

WitnessValue bqb_det(const PMRecordSet& records,
                     const std::array<std::string, 4>& arrangement) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
        auto i = records.row_index(arrangement[k]);
        if (!i) {
            throw std::invalid_argument("bqb_det: no row labeled '" + arrangement[k] +
                                        "'");
        }
        idx[k] = *i;
    }
    return bqb_impl(records, idx);
}

}  // namespace qcorr
