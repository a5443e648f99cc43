#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qwalk {

// Shortest round-trip decimal form (std::to_chars); the same value always
// prints the same bytes, which is what makes CSV output reproducible.
std::string format_double(double value);

// Quote a cell if it contains a comma, quote or newline.
std::string csv_escape(const std::string& cell);

// Simple CSV assembler: fixed header, rows appended in caller order,
// written in one shot.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::string& path) const;

private:
    std::size_t columns_;
    std::string body_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace qwalk
