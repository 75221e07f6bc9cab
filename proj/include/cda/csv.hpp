#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cda/types.hpp"

namespace cda {

// All file outputs go through write_file_atomic: write to a sibling temp file,
// flush, then rename over the destination. Readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Fixed-precision time formatting so identical runs serialize byte-identically.
[[nodiscard]] std::string format_time(double t);

using TraderNameFn = std::function<std::string(TraderId)>;

// Schema: time,price,quantity,buyer_id,seller_id,initiating_side
[[nodiscard]] std::string trade_tape_csv(const std::vector<Trade>& tape, const TraderNameFn& name);

// Splits a CSV line on commas (no quoting in any of our schemas).
[[nodiscard]] std::vector<std::string> split_csv_line(const std::string& line);

// Returns the data lines of a CSV file body: skips blank lines and '#' comments,
// drops the header line if present.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(const std::string& body,
                                                              const std::string& expected_header);

}  // namespace cda
