#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace floqflow {

// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

// CSV file with a single header row and full-precision numeric rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<double>& values);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Throws ContractViolation when the column is absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace floqflow
