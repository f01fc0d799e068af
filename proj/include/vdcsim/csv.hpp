#ifndef VDCSIM_CSV_HPP
#define VDCSIM_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace vdcsim {

// Shortest representation that round-trips exactly (std::to_chars).
// All numeric output goes through these so repeated runs are byte-identical.
std::string fmt_double(double v);
std::string fmt_int(std::int64_t v);

// Locale-independent parses; throw validation_error on trailing garbage.
double parse_double(const std::string& s);
std::int64_t parse_int(const std::string& s);

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads a whole CSV file; first line is the header. Throws validation_error
// with the file name and 1-based line number on ragged rows.
CsvTable parse_csv(const std::string& text, const std::string& origin);
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace vdcsim

#endif
