#include "output.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "lrloc/errors.hpp"
#include "lrloc/records.hpp"

namespace lrloc::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const nlohmann::json& metadata,
                     std::initializer_list<std::string_view> columns)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw DomainError("cannot write " + path.string());
  out_ << "# lrloc " << software_version() << '\n';
  for (const auto& [key, value] : metadata.items()) out_ << "# " << key << ": " << value.dump() << '\n';
  bool first = true;
  for (auto c : columns) {
    if (!first) out_ << ',';
    out_ << c;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  out_ << text;
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  separator();
  out_ << x;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write " + path.string());
  out << dump_stable(j);
}

}  // namespace lrloc::cli
