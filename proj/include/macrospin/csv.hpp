#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "macrospin/montecarlo.hpp"
#include "macrospin/solvers.hpp"

namespace macrospin {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_g17(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace detail

inline constexpr const char* trajectory_csv_header = "t,mx,my,mz,theta,phi,R,I,V";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << trajectory_csv_header << "\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const Vec3 m = tr.states[i].cartesian();
        detail::put_g17(os, tr.times[i]);
        for (double v : {m.x, m.y, m.z, tr.states[i].theta, tr.states[i].phi, tr.resistance[i],
                         tr.current[i], tr.voltage[i]}) {
            os << ',';
            detail::put_g17(os, v);
        }
        os << "\n";
    }
}

/// Reference trace for RMSE comparison: the same CSV schema, of which only
/// t and mz are consumed.
struct RefTrace {
    std::vector<double> t;
    std::vector<double> mz;
};

inline RefTrace read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvError("empty trajectory CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
    }
    int t_idx = -1, mz_idx = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "t") t_idx = static_cast<int>(i);
        if (cols[i] == "mz") mz_idx = static_cast<int>(i);
    }
    if (t_idx < 0 || mz_idx < 0)
        throw CsvError("trajectory CSV header must contain 't' and 'mz' columns (got '" + line +
                       "')");
    RefTrace out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        int idx = 0;
        double t = 0, mz = 0;
        bool have_t = false, have_mz = false;
        while (std::getline(ss, cell, ',')) {
            if (idx == t_idx) {
                t = std::strtod(cell.c_str(), nullptr);
                have_t = true;
            }
            if (idx == mz_idx) {
                mz = std::strtod(cell.c_str(), nullptr);
                have_mz = true;
            }
            ++idx;
        }
        if (!have_t || !have_mz)
            throw CsvError("trajectory CSV line " + std::to_string(lineno) + ": too few columns");
        out.t.push_back(t);
        out.mz.push_back(mz);
    }
    if (out.t.empty()) throw CsvError("trajectory CSV has no data rows");
    for (std::size_t i = 1; i < out.t.size(); ++i)
        if (out.t[i] <= out.t[i - 1])
            throw CsvError("trajectory CSV times must be strictly increasing (row " +
                           std::to_string(i + 1) + ")");
    return out;
}

/// Switching events: one row per debounced m_z = 0 crossing.
inline void write_events_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,direction\n";
    for (const auto& ev : tr.events) {
        detail::put_g17(os, ev.t);
        os << ',' << (ev.direction > 0 ? "1" : "-1") << "\n";
    }
}

/// Accepted-step log of the adaptive solver (solver.log_steps).
inline void write_steps_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,dt\n";
    for (const auto& st : tr.steps) {
        detail::put_g17(os, st.t);
        os << ',';
        detail::put_g17(os, st.dt);
        os << "\n";
    }
}

inline void write_ensemble_summary_csv(std::ostream& os, const EnsembleStats& st) {
    os << "n_total,n_switched,wer,wer_lo,wer_hi,t_p1,t_p5,t_p50,t_p95,t_p99,theta_sq_mean\n";
    os << st.n_total << ',' << st.n_switched;
    for (double v : {st.wer, st.wer_lo, st.wer_hi, st.switch_times.p1, st.switch_times.p5,
                     st.switch_times.p50, st.switch_times.p95, st.switch_times.p99,
                     st.theta_sq_mean}) {
        os << ',';
        detail::put_g17(os, v);
    }
    os << "\n";
}

inline void write_runs_csv(std::ostream& os, const std::vector<RunOutcome>& outcomes) {
    os << "run,switched,switch_time,theta_sq_time_avg\n";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        os << i << ',' << (outcomes[i].switched ? 1 : 0) << ',';
        detail::put_g17(os, outcomes[i].switch_time);
        os << ',';
        detail::put_g17(os, outcomes[i].theta_sq_time_avg);
        os << "\n";
    }
}

inline void write_wer_csv(std::ostream& os, const std::vector<double>& grid,
                          const std::vector<EnsembleStats>& stats) {
    if (grid.size() != stats.size()) throw CsvError("wer grid/stats size mismatch");
    os << "current,n_total,n_switched,wer,wer_lo,wer_hi\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        detail::put_g17(os, grid[i]);
        os << ',' << stats[i].n_total << ',' << stats[i].n_switched;
        for (double v : {stats[i].wer, stats[i].wer_lo, stats[i].wer_hi}) {
            os << ',';
            detail::put_g17(os, v);
        }
        os << "\n";
    }
}

} // namespace macrospin
