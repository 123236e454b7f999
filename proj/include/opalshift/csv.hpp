#ifndef OPALSHIFT_CSV_HPP
#define OPALSHIFT_CSV_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "opalshift/errors.hpp"

namespace opalshift {

/// CSV writer with deterministic number formatting (%.17g round-trips
/// doubles bit-exactly, so identical data gives identical bytes).
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header)
        : path_(path.string()), out_(path) {
        if (!out_) throw IoError("csv: cannot write '" + path_ + "'");
        out_ << header << "\n";
    }

    void field(const std::string& s) {
        sep();
        out_ << s;
    }
    void field(double v) {
        sep();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ << buf;
    }
    void field(int v) {
        sep();
        out_ << v;
    }
    void field(long v) {
        sep();
        out_ << v;
    }
    void endrow() {
        out_ << "\n";
        first_ = true;
    }

    template <class... Args>
    void row(const Args&... args) {
        (field(args), ...);
        endrow();
    }

private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::string path_;
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace opalshift

#endif
