#include "qcorr/scenarios.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcorr {

double BellCorrelation::correlator(int alpha, int beta) const {
    double e = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            e += ((a + b) % 2 == 0 ? 1.0 : -1.0) * p[alpha][beta][a][b];
        }
    }
    return e;
}

double BellCorrelation::marginal_alice(int alpha, int beta) const {
    double e = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            e += (a == 0 ? 1.0 : -1.0) * p[alpha][beta][a][b];
        }
    }
    return e;
}

double BellCorrelation::marginal_bob(int beta, int alpha) const {
    double e = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            e += (b == 0 ? 1.0 : -1.0) * p[alpha][beta][a][b];
        }
    }
    return e;
}

void BellCorrelation::validate(double tol) const {
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            double sum = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double v = p[alpha][beta][a][b];
                    if (v < -tol || v > 1.0 + tol) {
                        throw std::invalid_argument(
                            "BellCorrelation: entry outside [0, 1]");
                    }
                    sum += v;
                }
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                throw std::invalid_argument(
                    "BellCorrelation: setting (" + std::to_string(alpha) + "," +
                    std::to_string(beta) + ") sums to " + std::to_string(sum));
            }
        }
    }
}

double nonsignaling_check(const BellCorrelation& corr) {
    double worst = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int alpha = 0; alpha < 2; ++alpha) {
            double m0 = corr.p[alpha][0][a][0] + corr.p[alpha][0][a][1];
            double m1 = corr.p[alpha][1][a][0] + corr.p[alpha][1][a][1];
            worst = std::max(worst, std::abs(m0 - m1));
        }
    }
    for (int b = 0; b < 2; ++b) {
        for (int beta = 0; beta < 2; ++beta) {
            double m0 = corr.p[0][beta][0][b] + corr.p[0][beta][1][b];
            double m1 = corr.p[1][beta][0][b] + corr.p[1][beta][1][b];
            worst = std::max(worst, std::abs(m0 - m1));
        }
    }
    return worst;
}

ConditionalPM bell_to_conditional(const BellCorrelation& corr, Party party,
                                  double tol) {
    corr.validate(tol);
    ConditionalPM out;
    out.party = party;
    out.records.measurement_labels = party == Party::Alice
                                         ? std::vector<std::string>{"A0", "A1"}
                                         : std::vector<std::string>{"B0", "B1"};

    // p(ab|alpha beta) viewed with "local" = the conditioned party's
    // (setting, outcome) and "remote" = the other party's.
    auto joint = [&](int local_setting, int local_outcome, int remote_setting,
                     int remote_outcome) {
        return party == Party::Alice
                   ? corr.p[local_setting][remote_setting][local_outcome][remote_outcome]
                   : corr.p[remote_setting][local_setting][remote_outcome][local_outcome];
    };

    for (int beta = 0; beta < 2; ++beta) {
        for (int b = 0; b < 2; ++b) {
            // Conditioning probability must not depend on the local setting.
            double w0 = joint(0, 0, beta, b) + joint(0, 1, beta, b);
            double w1 = joint(1, 0, beta, b) + joint(1, 1, beta, b);
            if (std::abs(w0 - w1) > std::max(tol, 1e-9)) {
                throw std::invalid_argument(
                    "bell_to_conditional: conditioning probability depends on the "
                    "local setting (signaling data)");
            }
            const double w = 0.5 * (w0 + w1);
            if (w <= tol) continue;  // never prepared
            PMRecordSet::Row row;
            row.label = std::to_string(b) + "|" + std::to_string(beta);
            row.weight = w;
            for (int local = 0; local < 2; ++local) {
                row.expectations.push_back(
                    (joint(local, 0, beta, b) - joint(local, 1, beta, b)) / w);
            }
            out.records.rows.push_back(std::move(row));
        }
    }
    out.records.validate(1e-6);
    return out;
}

BellCorrelation qbell(double x, double y, double tol) {
    BellCorrelation corr;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double pr = ((a ^ b) == (alpha & beta)) ? 0.5 : 0.0;
                    const double pl = (a == 0 && b == 0) ? 1.0 : 0.0;
                    corr.p[alpha][beta][a][b] =
                        x * pr + y * pl + (1.0 - x - y) * 0.25;
                }
            }
        }
    }
    try {
        corr.validate(tol);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("qbell: (x, y) = (" + std::to_string(x) + ", " +
                                    std::to_string(y) +
                                    ") produces entries outside [0, 1]");
    }
    return corr;
}

PMRecordSet qpm(double x, double y, double tol) {
    if (std::abs(1.0 + y) < 1e-12 || std::abs(1.0 - y) < 1e-12) {
        throw std::invalid_argument("qpm: |y| = 1 degenerates the mean values");
    }
    const double p0 = (1.0 + x + 3.0 * y) / (2.0 + 2.0 * y);
    const double q0 = (1.0 - x - y) / (2.0 - 2.0 * y);
    const double p1 = (1.0 - x + 3.0 * y) / (2.0 + 2.0 * y);
    const double q1 = (1.0 + x - y) / (2.0 - 2.0 * y);
    const double w0 = 0.5 * (1.0 + y);
    const double w1 = 0.5 * (1.0 - y);

    PMRecordSet rec;
    rec.measurement_labels = {"A0", "A1"};
    rec.rows = {
        {"0|0", {p0, p0}, w0},
        {"1|0", {q0, q0}, w1},
        {"0|1", {p0, p1}, w0},
        {"1|1", {q0, q1}, w1},
    };
    try {
        rec.validate(tol);
        if (w0 < -tol || w1 < -tol) throw std::invalid_argument("negative weight");
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("qpm: (x, y) = (" + std::to_string(x) + ", " +
                                    std::to_string(y) + ") leaves the valid domain");
    }
    return rec;
}

}  // namespace qcorr
