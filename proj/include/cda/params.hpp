#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace cda {

struct ParamsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric knobs for the adaptive strategies, keyed "strategy.param". The set
// of keys is closed: files may override defaults but not invent new keys.
// serialize() is canonical (sorted keys, fixed float format) so the hash is
// stable and can be embedded in results files.
class StrategyParams {
  public:
    static StrategyParams defaults();
    static StrategyParams from_file(const std::filesystem::path& path);
    static StrategyParams from_string(const std::string& body);  // same format as files

    [[nodiscard]] double get(const std::string& key) const;
    [[nodiscard]] int get_int(const std::string& key) const;
    void set(const std::string& key, double value);  // unknown key throws

    [[nodiscard]] std::string serialize() const;
    [[nodiscard]] std::uint64_t hash() const;

    // Range checks: learning/discount rates in [0,1], windows and horizons >= 1.
    void validate() const;

    [[nodiscard]] const std::map<std::string, double>& values() const { return values_; }

  private:
    std::map<std::string, double> values_;
};

}  // namespace cda
