#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "simwave/errors.hpp"

namespace simwave {

// Minimal CSV writer: header row then numeric rows at full double precision.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << values[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// Flat key=value summary file, one entry per line.
class SummaryWriter {
public:
    void set(const std::string& key, double value) {
        std::ostringstream s;
        s << std::setprecision(17) << value;
        entries_.emplace_back(key, s.str());
    }
    void set(const std::string& key, long value) {
        entries_.emplace_back(key, std::to_string(value));
    }
    void set(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
    }
    void set(const std::string& key, bool value) {
        entries_.emplace_back(key, value ? "true" : "false");
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot open output file: " + path);
        for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace simwave
