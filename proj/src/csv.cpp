#include "vdcsim/csv.hpp"

#include "vdcsim/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vdcsim {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_int(std::int64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    if (s.empty())
        throw validation_error("empty numeric field");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw validation_error("malformed number: '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw validation_error("malformed integer: '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    return out;
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.eof()) break;
        auto fields = split_csv_line(line);
        if (lineno == 1) {
            t.header = std::move(fields);
        } else {
            if (fields.size() != t.header.size())
                throw validation_error(origin + ":" + fmt_int((std::int64_t)lineno) +
                                       ": expected " + fmt_int((std::int64_t)t.header.size()) +
                                       " fields, got " + fmt_int((std::int64_t)fields.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (t.header.empty())
        throw validation_error(origin + ": empty file, missing header");
    return t;
}

CsvTable read_csv(const std::string& path) {
    return parse_csv(read_text_file(path), path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("cannot write file: " + path);
    out << content;
    if (!out)
        throw validation_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace vdcsim
