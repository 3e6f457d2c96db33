#pragma once

#include <string>
#include <vector>

namespace skeetrl {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // data rows, field counts may vary
};

// RFC-4180-ish reader: quoted fields may contain commas, doubled quotes and
// newlines. CRLF and a missing final newline are tolerated. Throws
// std::runtime_error on unreadable files or a missing header line.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& content);

}  // namespace skeetrl
