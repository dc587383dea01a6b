#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace votermix {

/// Floats are printed with 12 significant digits everywhere CSV is emitted.
inline std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {
inline std::string csv_field(double v) { return csv_double(v); }
inline std::string csv_field(const std::string& v) { return v; }
inline std::string csv_field(const char* v) { return v; }
template <class T>
    requires std::is_integral_v<T>
std::string csv_field(T v) {
    return std::to_string(v);
}
}  // namespace detail

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    template <class... Fields>
    void row(const Fields&... fields) {
        std::string line;
        ((line += detail::csv_field(fields), line += ','), ...);
        if (!line.empty()) line.pop_back();
        out_ << line << '\n';
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

}  // namespace votermix
