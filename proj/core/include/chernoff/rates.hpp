#ifndef CHERNOFF_RATES_HPP
#define CHERNOFF_RATES_HPP

#include <optional>
#include <string>
#include <vector>

#include "chernoff/errors.hpp"

namespace chernoff {

struct ConvergenceRow {
    double n = 0.0;
    double error = 0.0;
    std::optional<double> bound;  // predicted value or theoretical bound
};

struct OrderFit {
    double order = 0.0;      // negated log-log slope
    double r_squared = 0.0;
    int rows_used = 0;
    double n_min = 0.0;      // fit window actually used
    double n_max = 0.0;
};

struct ConvergenceReport {
    std::string scheme;
    std::vector<ConvergenceRow> rows;
    std::optional<OrderFit> fit;
    double noise_floor = 0.0;
};

// Least-squares slope of log(error) against log(n).  Rows with error at or
// below 10x the noise floor are excluded so flat roundoff tails cannot
// drag the slope; fewer than 4 usable rows is an InsufficientDataError.
OrderFit fit_order(const std::vector<ConvergenceRow>& rows, double noise_floor = 0.0);

struct BoundTrack {
    std::vector<double> slack;       // bound - error, one per row with a bound
    std::vector<double> ratio;       // error / bound where bound > 0
    std::vector<size_t> violations;  // row indices with negative slack
    double min_slack = 0.0;
    bool all_hold(double tol = 0.0) const { return min_slack >= -tol; }
};

// Slack bookkeeping for rows that carry a bound column.
BoundTrack track_bound(const std::vector<ConvergenceRow>& rows);

// CSV round-trip with columns n,error,bound (bound column may be empty).
// Files start with a "# generated ..." timestamp line; numbers are written
// with enough digits to reproduce the doubles exactly.
void write_convergence_csv(const std::string& path, const ConvergenceReport& report);
ConvergenceReport read_convergence_csv(const std::string& path);

}  // namespace chernoff

#endif
