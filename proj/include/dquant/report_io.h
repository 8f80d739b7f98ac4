#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dquant {

/// Serializes with sorted keys, two-space indentation and every floating
/// point value printed as %.12e, so identical inputs give identical bytes.
std::string dump_json(const nlohmann::json& doc);

std::string format_double(double v);

/// Comma-separated rows; doubles use format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

}  // namespace dquant
