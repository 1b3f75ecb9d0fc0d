#include "csv.hpp"

#include <cmath>
#include <cstdio>

#include "dynmix/error.hpp"

namespace dynmix::cli {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    // snprintf follows LC_NUMERIC; the CLI never changes it from "C", but be strict
    for (char* p = buf; *p; ++p) {
        if (*p == ',') *p = '.';
    }
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), file_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!file_) throw Error("cannot open " + path + " for writing");
    write_record(header);
}

void CsvWriter::write_record(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw Error("CSV record width does not match the header of " + path_);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) file_ << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            file_ << f;
        } else {
            file_ << '"';
            for (char c : f) {
                if (c == '"') file_ << '"';
                file_ << c;
            }
            file_ << '"';
        }
    }
    file_ << "\r\n";
    if (!file_) throw Error("write to " + path_ + " failed");
}

void CsvWriter::close() {
    file_.close();
    if (!file_) throw Error("closing " + path_ + " failed");
}

CsvWriter::Row& CsvWriter::Row::add(double value) {
    fields_.push_back(format_double(value));
    return *this;
}

CsvWriter::Row& CsvWriter::Row::add(std::uint64_t value) {
    fields_.push_back(std::to_string(value));
    return *this;
}

CsvWriter::Row& CsvWriter::Row::add(const std::string& value) {
    fields_.push_back(value);
    return *this;
}

CsvWriter::Row& CsvWriter::Row::empty() {
    fields_.emplace_back();
    return *this;
}

void CsvWriter::Row::end() { owner_.write_record(fields_); }

} // namespace dynmix::cli
