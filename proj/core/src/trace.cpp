#include "frtsim/trace.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "frtsim/error.hpp"

namespace frtsim {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::size_t Trace::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw ArgumentError("trace has no column '" + std::string(name) + "'");
}

bool Trace::has_column(std::string_view name) const {
    for (const auto& c : columns) {
        if (c == name) return true;
    }
    return false;
}

std::vector<double> Trace::series(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

void Trace::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    std::string line;
    for (const auto& r : rows) {
        line.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) line += ',';
            line += format_number(r[i]);
        }
        line += '\n';
        os << line;
    }
}

Trace Trace::read_csv(std::istream& is) {
    Trace trace;
    std::string line;
    if (!std::getline(is, line)) throw InputError("trace CSV is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) trace.columns.push_back(cell);
    }
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("non-numeric trace cell '" + cell + "'", line_no, static_cast<int>(row.size()) + 1);
            }
        }
        if (row.size() != trace.columns.size()) {
            throw InputError("trace row has " + std::to_string(row.size()) + " cells, expected " +
                                 std::to_string(trace.columns.size()),
                             line_no, 1);
        }
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

void write_event_csv(std::ostream& os, std::span<const EventMarker> markers) {
    os << "t,event,target\n";
    for (const auto& m : markers) os << format_number(m.t) << ',' << m.kind << ',' << m.target << '\n';
}

WindowStats window_stats(const Trace& trace, std::string_view column, double t_begin, double t_end) {
    const std::size_t c = trace.column(column);
    WindowStats s;
    double sum = 0.0;
    for (const auto& r : trace.rows) {
        if (r[0] >= t_begin && r[0] <= t_end) {
            sum += r[c];
            ++s.count;
        }
    }
    if (s.count == 0) return s;
    s.mean = sum / static_cast<double>(s.count);
    double var = 0.0;
    for (const auto& r : trace.rows) {
        if (r[0] >= t_begin && r[0] <= t_end) var += (r[c] - s.mean) * (r[c] - s.mean);
    }
    s.stddev = std::sqrt(var / static_cast<double>(s.count));
    return s;
}

}  // namespace frtsim
