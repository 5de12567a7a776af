#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frtsim {

/// Time-stamped simulation record. Column set is fixed when the first row is written.
struct Trace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const;  // throws ArgumentError
    bool has_column(std::string_view name) const;
    std::vector<double> series(std::string_view name) const;
    double end_time() const { return rows.empty() ? 0.0 : rows.back().front(); }

    /// UTF-8, header row, 9 significant digits.
    void write_csv(std::ostream& os) const;
    static Trace read_csv(std::istream& is);

    bool operator==(const Trace&) const = default;
};

struct EventMarker {
    double t = 0.0;
    std::string kind;
    std::string target;

    bool operator==(const EventMarker&) const = default;
};

void write_event_csv(std::ostream& os, std::span<const EventMarker> markers);

struct WindowStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

/// Mean and population standard deviation of a column over rows with t in [t_begin, t_end].
WindowStats window_stats(const Trace& trace, std::string_view column, double t_begin, double t_end);

/// "%.9g" formatting shared by every CSV writer.
std::string format_number(double value);

}  // namespace frtsim
