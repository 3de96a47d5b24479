#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlfalsify/sim/result.hpp"
#include "stlfalsify/stl/number.hpp"
#include "stlfalsify/stl/trace.hpp"

namespace stlf::io {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t k = 0;
        while (k < cell.size() && cell[k] == ' ') ++k;
        out.push_back(cell.substr(k));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", t);
    return buf;
}

/// Header `t,<channel>...`, one row per step.
inline std::string trace_to_csv(const SignalTrace& trace) {
    std::string s = "t";
    for (const auto& c : trace.channels()) s += "," + c.id;
    s += "\n";
    for (std::size_t i = 0; i < trace.horizon(); ++i) {
        s += format_time(static_cast<double>(i) * trace.dt());
        for (std::size_t j = 0; j < trace.channel_count(); ++j) s += "," + trace.text(j, i);
        s += "\n";
    }
    return s;
}

/// Read a trace. With `channels`, only their columns are read (extra columns such as
/// simulator state are ignored); otherwise numeric columns become unbounded continuous
/// channels and the rest categorical. Rows whose channel cells are all empty are skipped.
inline SignalTrace trace_from_csv(std::istream& in, const ChannelList* channels = nullptr) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("trace CSV: empty input");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "t") throw std::invalid_argument("trace CSV: header must be 't,<channel>...'");

    std::vector<std::size_t> cols;  // CSV column of each channel
    ChannelList specs;
    if (channels) {
        for (const auto& c : *channels) {
            auto it = std::find(header.begin(), header.end(), c.id);
            if (it == header.end()) throw std::invalid_argument("trace CSV: missing channel '" + c.id + "'");
            cols.push_back(static_cast<std::size_t>(it - header.begin()));
            specs.push_back(c);
        }
    } else {
        for (std::size_t j = 1; j < header.size(); ++j) cols.push_back(j);
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("trace CSV: row " + std::to_string(rows.size() + 2) + " has the wrong cell count");
        bool blank = true;
        for (auto c : cols)
            if (!cells[c].empty()) blank = false;
        if (blank) continue;
        auto t = parse_number(cells[0]);
        if (!t) throw std::invalid_argument("trace CSV: bad time '" + cells[0] + "'");
        times.push_back(*t);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::invalid_argument("trace CSV: no rows");
    double dt = 1.0;
    if (rows.size() > 1) {
        if (!(times[1] > times[0])) throw std::invalid_argument("trace CSV: time must increase");
        dt = times[1] - times[0];
    }

    if (!channels) {
        for (auto c : cols) {
            bool numeric = true;
            std::vector<std::string> symbols;
            for (const auto& r : rows) {
                if (!parse_number(r[c])) numeric = false;
                if (std::find(symbols.begin(), symbols.end(), r[c]) == symbols.end()) symbols.push_back(r[c]);
            }
            if (numeric) specs.push_back(ChannelSpec::continuous(header[c], -1.0, 1.0, {}, true));
            else specs.push_back(ChannelSpec::categorical(header[c], symbols));
        }
    }

    SignalTrace trace(specs, rows.size(), dt);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < specs.size(); ++j) {
            const std::string& cell = rows[i][cols[j]];
            if (specs[j].is_categorical()) {
                auto s = specs[j].symbol_index(cell);
                if (!s) throw std::invalid_argument("trace CSV: unknown symbol '" + cell + "' in " + specs[j].id);
                trace.set_symbol(j, i, *s);
            } else {
                auto v = parse_number(cell);
                if (!v) throw std::invalid_argument("trace CSV: bad number '" + cell + "' in " + specs[j].id);
                trace.set_real(j, i, *v);
            }
        }
    trace.validate();
    return trace;
}

/// Rollout table: time, simulator state, then the disturbance applied from that row on.
/// Rows continue past a collision (state cells empty) so the full disturbance trace is kept.
inline std::string rollout_to_csv(const sim::SimResult& r) {
    std::string s = "t";
    for (const auto& c : r.columns) s += "," + c;
    for (const auto& c : r.disturbances.channels()) s += "," + c.id;
    s += "\n";
    const std::size_t rows = std::max(r.states.size(), r.disturbances.horizon());
    for (std::size_t k = 0; k < rows; ++k) {
        s += format_time(static_cast<double>(k) * r.dt);
        for (std::size_t c = 0; c < r.columns.size(); ++c)
            s += "," + (k < r.states.size() ? format_number(r.states[k][c]) : std::string());
        for (std::size_t j = 0; j < r.disturbances.channel_count(); ++j)
            s += "," + (k < r.disturbances.horizon() ? r.disturbances.text(j, k) : std::string());
        s += "\n";
    }
    return s;
}

}  // namespace stlf::io
