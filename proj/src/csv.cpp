#include "cda/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cda {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", t);
    return buf;
}

std::string trade_tape_csv(const std::vector<Trade>& tape, const TraderNameFn& name) {
    std::ostringstream out;
    out << "time,price,quantity,buyer_id,seller_id,initiating_side\n";
    for (const Trade& t : tape) {
        out << format_time(t.time) << ',' << t.price << ',' << t.quantity << ',' << name(t.buyer)
            << ',' << name(t.seller) << ',' << to_cstr(t.initiating_side) << '\n';
    }
    return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& body,
                                                const std::string& expected_header) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(body);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header && line == expected_header) {
            seen_header = true;
            continue;
        }
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

}  // namespace cda
