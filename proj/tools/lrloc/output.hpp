#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lrloc::cli {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

/// CSV with '#' metadata lines (software version, rng id, master seed, config)
/// ahead of the header row. Comma separated, '.' decimal, LF line ends.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const nlohmann::json& metadata,
            std::initializer_list<std::string_view> columns);

  CsvWriter& cell(double x);
  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(long long x);
  void end_row();

private:
  void separator();

  std::ofstream out_;
  bool row_started_ = false;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace lrloc::cli
