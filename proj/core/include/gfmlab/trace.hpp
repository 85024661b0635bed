#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gfm {

struct TraceSample {
    double t = 0.0;
    double f_grid = 0.0;
    double f_pll = 0.0;
    double p = 0.0;
    double q = 0.0;
    double p_ref_eff = 0.0;
    double delta_i = 0.0;    // wrapped to (-pi, pi]
    double delta_pcc = 0.0;  // wrapped
    double delta_g = 0.0;    // wrapped
    double i_d = 0.0;
    double i_q = 0.0;
    double i_mag = 0.0;
    double v_pcc_mag = 0.0;
    double soc = 0.0;
    bool sat_power = false;
    bool sat_current = false;

    friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct Trace {
    std::vector<TraceSample> samples;
    double output_interval = 1e-3;
    double soc_high = 0.9;
    double soc_low = 0.1;

    [[nodiscard]] double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

inline constexpr std::array<std::string_view, 16> kTraceColumns = {
    "time_s",    "f_grid_hz", "f_pll_hz", "p_pu",    "q_pu",         "p_ref_eff_pu", "delta_i_rad", "delta_pcc_rad",
    "delta_g_rad", "i_d_pu",  "i_q_pu",   "i_mag_pu", "v_pcc_mag_pu", "soc",         "sat_power",   "sat_current"};

/// Column value by canonical header name; throws std::out_of_range otherwise.
double trace_column(const TraceSample& s, std::string_view column);

/// CSV with the canonical header, 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);
/// Throws std::runtime_error on a header mismatch or malformed row.
Trace read_trace_csv(std::istream& in);

/// Writes through a temporary file and renames it into place.
void write_file_atomically(const std::string& path, const std::string& contents);

}  // namespace gfm
