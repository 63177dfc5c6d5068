#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dnilab::cli {

/// File system failure; maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal, locale independent.
std::string format_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& config_hash);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

/// Output directory: explicit value, else $DNILAB_OUT_DIR, else ".".
std::string resolve_out_dir(const std::string& configured);

/// Writes `content` to dir/name, creating dir. Returns the path.
std::string write_output(const std::string& dir, const std::string& name,
                         const std::string& content);

std::string read_file(const std::string& path);

}  // namespace dnilab::cli
