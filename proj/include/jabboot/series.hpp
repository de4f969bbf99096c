#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iosfwd>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace jabboot {

/// Ordered d-dimensional observations X_1..X_n, stored row-major.
class TimeSeries {
public:
    TimeSeries() = default;

    TimeSeries(std::vector<double> values, std::size_t dim) : values_(std::move(values)), dim_(dim) {
        if (dim_ == 0) {
            throw std::invalid_argument("TimeSeries: dimension must be at least 1");
        }
        if (values_.size() % dim_ != 0) {
            throw std::invalid_argument("TimeSeries: value count is not a multiple of the dimension");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("TimeSeries: non-finite observation");
            }
        }
    }

    /// Univariate series.
    static TimeSeries scalar(std::vector<double> values) { return TimeSeries(std::move(values), 1); }

    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    /// Observation t (0-based).
    [[nodiscard]] std::span<const double> operator[](std::size_t t) const noexcept {
        return {values_.data() + t * dim_, dim_};
    }

    [[nodiscard]] std::span<const double> flat() const noexcept { return values_; }

    [[nodiscard]] std::vector<double> mean() const {
        std::vector<double> m(dim_, 0.0);
        const std::size_t n = size();
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t k = 0; k < dim_; ++k) {
                m[k] += values_[t * dim_ + k];
            }
        }
        for (double& v : m) {
            v /= static_cast<double>(n);
        }
        return m;
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    std::size_t dim_ = 1;
};

/// Rejects series too short to bootstrap.
inline void require_bootstrappable(const TimeSeries& series) {
    if (series.size() < 2) {
        throw std::invalid_argument("series must have at least 2 observations");
    }
}

/// Appends the squares of a univariate series as a second coordinate, giving
/// (X_t, X_t^2) for the variance functional.
[[nodiscard]] inline TimeSeries augment_with_squares(const TimeSeries& series) {
    if (series.dim() != 1) {
        throw std::invalid_argument("augment_with_squares: series must be univariate");
    }
    std::vector<double> out;
    out.reserve(series.size() * 2);
    for (double x : series.flat()) {
        out.push_back(x);
        out.push_back(x * x);
    }
    return TimeSeries(std::move(out), 2);
}

namespace detail {

inline double parse_double(std::string_view field, std::size_t line_no) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse '" +
                                 std::string(field) + "' as a number");
    }
    return value;
}

}  // namespace detail

/// Reads one observation per row, d comma-separated numeric columns. Blank lines
/// are ignored. With skip_header the first line is discarded unparsed.
[[nodiscard]] inline TimeSeries read_series_csv(std::istream& in, bool skip_header = false) {
    std::vector<double> values;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header && line_no == 1) {
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::size_t cols = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            values.push_back(detail::parse_double(rest.substr(0, comma), line_no));
            ++cols;
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (dim == 0) {
            dim = cols;
        } else if (cols != dim) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(dim) + " columns, found " + std::to_string(cols));
        }
    }
    if (dim == 0) {
        throw std::runtime_error("series file contains no observations");
    }
    return TimeSeries(std::move(values), dim);
}

[[nodiscard]] inline TimeSeries read_series_csv(const std::string& path, bool skip_header = false) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_series_csv(in, skip_header);
}

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] inline std::string format_roundtrip(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

inline void write_series_csv(std::ostream& out, const TimeSeries& series) {
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto row = series[t];
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0) {
                out << ',';
            }
            out << format_roundtrip(row[k]);
        }
        out << '\n';
    }
}

}  // namespace jabboot
