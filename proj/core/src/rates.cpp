#include "chernoff/rates.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "chernoff/io_util.hpp"

namespace chernoff {

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_double(double v) {
    char buf[64];
    // %.17g reproduces any double exactly on read-back
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string timestamp_now() {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::localtime(&t));
    return buf;
}

OrderFit fit_order(const std::vector<ConvergenceRow>& rows, double noise_floor) {
    std::vector<std::pair<double, double>> pts;  // (log n, log error)
    double n_min = 0.0, n_max = 0.0;
    for (const auto& r : rows) {
        if (!(r.n > 0.0) || !(r.error > 0.0)) continue;
        if (r.error <= 10.0 * noise_floor) continue;
        pts.emplace_back(std::log(r.n), std::log(r.error));
        if (pts.size() == 1) {
            n_min = n_max = r.n;
        } else {
            n_min = std::min(n_min, r.n);
            n_max = std::max(n_max, r.n);
        }
    }
    if (pts.size() < 4) {
        std::ostringstream msg;
        msg << "order fit needs >= 4 rows above the noise floor, have " << pts.size();
        throw InsufficientDataError(msg.str());
    }
    double sx = 0.0, sy = 0.0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    OrderFit fit;
    fit.order = -sxy / sxx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.rows_used = int(pts.size());
    fit.n_min = n_min;
    fit.n_max = n_max;
    return fit;
}

BoundTrack track_bound(const std::vector<ConvergenceRow>& rows) {
    BoundTrack track;
    track.min_slack = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].bound) continue;
        double slack = *rows[i].bound - rows[i].error;
        track.slack.push_back(slack);
        if (*rows[i].bound > 0.0) track.ratio.push_back(rows[i].error / *rows[i].bound);
        if (slack < 0.0) track.violations.push_back(i);
        track.min_slack = std::min(track.min_slack, slack);
    }
    if (track.slack.empty()) track.min_slack = 0.0;
    return track;
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
    std::ostringstream out;
    out << "# generated " << timestamp_now() << "\n";
    out << "n,error,bound\n";
    for (const auto& r : report.rows) {
        out << format_double(r.n) << "," << format_double(r.error) << ",";
        if (r.bound) out << format_double(*r.bound);
        out << "\n";
    }
    atomic_write_text(path, out.str());
}

ConvergenceReport read_convergence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ConvergenceReport report;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header row
            continue;
        }
        std::istringstream row(line);
        std::string field;
        ConvergenceRow r;
        std::getline(row, field, ',');
        r.n = std::strtod(field.c_str(), nullptr);
        std::getline(row, field, ',');
        r.error = std::strtod(field.c_str(), nullptr);
        if (std::getline(row, field, ',') && !field.empty())
            r.bound = std::strtod(field.c_str(), nullptr);
        report.rows.push_back(r);
    }
    return report;
}

}  // namespace chernoff
