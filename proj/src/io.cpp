#include "splr/io.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include "splr/gram.hpp"

namespace splr::io {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const unsigned char* bytes) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

double decode(const unsigned char* p, Dtype dtype) {
  if (dtype == Dtype::Float64) {
    const auto bits = get_le<std::uint64_t>(p);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  const auto bits = get_le<std::uint32_t>(p);
  float v;
  std::memcpy(&v, &bits, sizeof v);
  return static_cast<double>(v);
}

}  // namespace

std::size_t dtype_size(Dtype dtype) { return dtype == Dtype::Float64 ? 8 : 4; }

void save_matrix(const std::string& path, const MatrixXd& m, Dtype dtype) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(dtype));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (dtype == Dtype::Float64) {
        std::uint64_t bits;
        const double v = m(i, j);
        std::memcpy(&bits, &v, sizeof bits);
        put_le(out, bits);
      } else {
        std::uint32_t bits;
        const auto v = static_cast<float>(m(i, j));
        std::memcpy(&bits, &v, sizeof bits);
        put_le(out, bits);
      }
    }
  }
  if (!out) throw FormatError("failed writing '" + path + "'");
}

MatrixFileReader::MatrixFileReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw FormatError("cannot open '" + path + "'");
  std::array<unsigned char, kHeaderBytes> header{};
  in_.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in_.gcount() != static_cast<std::streamsize>(header.size())) throw FormatError("'" + path + "': truncated header");
  if (std::memcmp(header.data(), kMagic, 4) != 0) throw FormatError("'" + path + "': bad magic, not an HSLF file");
  const auto version = get_le<std::uint32_t>(header.data() + 4);
  if (version != kVersion) throw FormatError("'" + path + "': unsupported version " + std::to_string(version));
  const auto code = header[8];
  if (code > 1) throw FormatError("'" + path + "': unknown dtype code " + std::to_string(code));
  dtype_ = static_cast<Dtype>(code);
  const auto rows = get_le<std::uint64_t>(header.data() + 9);
  const auto cols = get_le<std::uint64_t>(header.data() + 17);
  rows_ = static_cast<Index>(rows);
  cols_ = static_cast<Index>(cols);

  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (!ec) {
    const auto expected = kHeaderBytes + rows * cols * dtype_size(dtype_);
    if (size != expected)
      throw FormatError("'" + path + "': payload is " + std::to_string(size - kHeaderBytes) + " bytes, expected " +
                        std::to_string(expected - kHeaderBytes));
  }
}

MatrixXd MatrixFileReader::read_rows(Index max_rows) {
  const Index n = std::min(max_rows, rows_remaining());
  MatrixXd block(n, cols_);
  if (n <= 0) return block;
  const std::size_t width = dtype_size(dtype_);
  std::vector<unsigned char> buffer(static_cast<std::size_t>(n * cols_) * width);
  in_.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  if (in_.gcount() != static_cast<std::streamsize>(buffer.size())) throw FormatError("'" + path_ + "': truncated payload");
  const unsigned char* p = buffer.data();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < cols_; ++j, p += width) block(i, j) = decode(p, dtype_);
  next_row_ += n;
  return block;
}

MatrixXd load_matrix(const std::string& path) {
  MatrixFileReader reader(path);
  return reader.read_rows(reader.rows());
}

MatrixXd stream_gram(const std::string& path, Index block_rows) {
  MatrixFileReader reader(path);
  GramAccumulator acc(reader.cols());
  while (reader.rows_remaining() > 0) acc.add_rows(reader.read_rows(block_rows));
  return acc.finish();
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

}  // namespace splr::io
