#ifndef SPLR_IO_HPP
#define SPLR_IO_HPP

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "splr/types.hpp"

namespace splr::io {

// HSLF matrix file, all integers little-endian:
//   "HSLF" | u32 version (1) | u8 dtype (0 = f32, 1 = f64) | u64 rows | u64 cols | row-major payload
inline constexpr char kMagic[4] = {'H', 'S', 'L', 'F'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 25;

enum class Dtype : std::uint8_t { Float32 = 0, Float64 = 1 };

// Malformed files, bad headers, short payloads.
class FormatError : public ContractError {
 public:
  using ContractError::ContractError;
};

std::size_t dtype_size(Dtype dtype);

void save_matrix(const std::string& path, const MatrixXd& m, Dtype dtype = Dtype::Float64);
MatrixXd load_matrix(const std::string& path);

// Reads a matrix file a block of rows at a time; float32 is promoted.
class MatrixFileReader {
 public:
  explicit MatrixFileReader(const std::string& path);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Dtype dtype() const { return dtype_; }
  Index rows_remaining() const { return rows_ - next_row_; }

  // Up to max_rows rows; empty once the payload is exhausted.
  MatrixXd read_rows(Index max_rows);

 private:
  std::ifstream in_;
  std::string path_;
  Index rows_ = 0;
  Index cols_ = 0;
  Dtype dtype_ = Dtype::Float64;
  Index next_row_ = 0;
};

// X^T X of an activation file without loading it whole.
MatrixXd stream_gram(const std::string& path, Index block_rows = 1024);

std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);
  void row(std::initializer_list<std::string> fields) { row(std::vector<std::string>(fields)); }

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& field);

}  // namespace splr::io

#endif  // SPLR_IO_HPP
