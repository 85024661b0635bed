#include "gfmlab/trace.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

namespace gfm {

double trace_column(const TraceSample& s, std::string_view column) {
    if (column == "time_s") return s.t;
    if (column == "f_grid_hz") return s.f_grid;
    if (column == "f_pll_hz") return s.f_pll;
    if (column == "p_pu") return s.p;
    if (column == "q_pu") return s.q;
    if (column == "p_ref_eff_pu") return s.p_ref_eff;
    if (column == "delta_i_rad") return s.delta_i;
    if (column == "delta_pcc_rad") return s.delta_pcc;
    if (column == "delta_g_rad") return s.delta_g;
    if (column == "i_d_pu") return s.i_d;
    if (column == "i_q_pu") return s.i_q;
    if (column == "i_mag_pu") return s.i_mag;
    if (column == "v_pcc_mag_pu") return s.v_pcc_mag;
    if (column == "soc") return s.soc;
    if (column == "sat_power") return s.sat_power ? 1.0 : 0.0;
    if (column == "sat_current") return s.sat_current ? 1.0 : 0.0;
    throw std::out_of_range("unknown trace column '" + std::string(column) + "'");
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
        out << (k ? "," : "") << kTraceColumns[k];
    }
    out << '\n';
    char buf[32];
    for (const auto& s : trace.samples) {
        for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
            const double v = trace_column(s, kTraceColumns[k]);
            if (k >= 14) {
                out << (k ? "," : "") << (v != 0.0 ? '1' : '0');
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out << (k ? "," : "") << buf;
            }
        }
        out << '\n';
    }
}

Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trace CSV: empty input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    std::string expected;
    for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
        expected += (k ? "," : "") + std::string(kTraceColumns[k]);
    }
    if (line != expected) {
        throw std::runtime_error("trace CSV: header does not match the canonical column order");
    }

    Trace trace;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        double v[16];
        std::size_t n = 0;
        std::size_t pos = 0;
        while (n < 16) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                std::size_t used = 0;
                v[n] = std::stod(cell, &used);
                if (used != cell.size() && !(used + 1 == cell.size() && cell.back() == '\r')) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception&) {
                throw std::runtime_error("trace CSV: bad number '" + cell + "' on row " + std::to_string(row));
            }
            ++n;
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (n != 16) {
            throw std::runtime_error("trace CSV: row " + std::to_string(row) + " has " + std::to_string(n) +
                                     " fields, expected 16");
        }
        TraceSample s;
        s.t = v[0];
        s.f_grid = v[1];
        s.f_pll = v[2];
        s.p = v[3];
        s.q = v[4];
        s.p_ref_eff = v[5];
        s.delta_i = v[6];
        s.delta_pcc = v[7];
        s.delta_g = v[8];
        s.i_d = v[9];
        s.i_q = v[10];
        s.i_mag = v[11];
        s.v_pcc_mag = v[12];
        s.soc = v[13];
        s.sat_power = v[14] != 0.0;
        s.sat_current = v[15] != 0.0;
        trace.samples.push_back(s);
    }
    if (trace.samples.size() >= 2) {
        trace.output_interval = trace.samples[1].t - trace.samples[0].t;
    }
    return trace;
}

void write_file_atomically(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
    }
}

}  // namespace gfm
