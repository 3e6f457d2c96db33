#include "skeetrl/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skeetrl {

CsvTable parse_csv(const std::string& content) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;

    const auto end_field = [&]() {
        record.push_back(field);
        field.clear();
    };
    const auto end_record = [&]() {
        end_field();
        records.push_back(record);
        record.clear();
    };

    std::size_t i = 0;
    while (i < content.size()) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                continue;
            }
            field.push_back(c);
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                ++i;
                break;
            case ',':
                end_field();
                any = true;
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_record();
                any = false;
                ++i;
                break;
            default:
                field.push_back(c);
                any = true;
                ++i;
                break;
        }
    }
    if (any || !field.empty() || !record.empty()) end_record();

    if (records.empty()) throw std::runtime_error("csv: missing header line");
    CsvTable t;
    t.header = records.front();
    t.rows.assign(records.begin() + 1, records.end());
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace skeetrl
