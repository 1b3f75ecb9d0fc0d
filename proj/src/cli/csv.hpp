#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace dynmix::cli {

// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_double(double value);

// Writes RFC 4180 records (CRLF line breaks, fields quoted only when needed).
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    class Row {
      public:
        explicit Row(CsvWriter& owner) : owner_(owner) {}
        Row& add(double value);
        Row& add(std::uint64_t value);
        Row& add(const std::string& value);
        Row& empty();
        void end();

      private:
        CsvWriter& owner_;
        std::vector<std::string> fields_;
    };

    Row row() { return Row(*this); }
    void close();

  private:
    void write_record(const std::vector<std::string>& fields);

    std::string path_;
    std::ofstream file_;
    std::size_t columns_;
};

} // namespace dynmix::cli
