#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdsgen/text.hpp"

namespace wdsgen {

struct TableIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Columnar table on disk: CSV with an `index` column followed by one column
// per component. Doubles are written in shortest round-trip form, so
// re-reading reproduces the in-memory values bit for bit.
struct Table {
  std::vector<std::string> columns;    // component names (index excluded)
  std::vector<long long> index;        // scenario or scenario*steps+t
  std::vector<std::vector<double>> rows;
};

inline Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw TableIoError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw TableIoError("empty table " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t start = 0;
  bool first = true;
  while (start <= line.size()) {
    auto end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    const auto field = line.substr(start, end - start);
    if (first) {
      if (field != "index") throw TableIoError("first column must be index in " + path.string());
      first = false;
    } else {
      t.columns.push_back(field);
    }
    start = end + 1;
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    std::size_t s = 0;
    bool idx = true;
    while (s <= line.size()) {
      auto e = line.find(',', s);
      if (e == std::string::npos) e = line.size();
      const std::string_view field{line.data() + s, e - s};
      if (idx) {
        const auto v = text::parse_int(field);
        if (!v) throw TableIoError("bad index value in " + path.string());
        t.index.push_back(*v);
        idx = false;
      } else {
        const auto v = text::parse_double(field);
        if (!v) throw TableIoError("bad numeric value in " + path.string());
        row.push_back(*v);
      }
      s = e + 1;
    }
    if (row.size() != t.columns.size())
      throw TableIoError("ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Buffered appender. Rows accumulate in memory and reach the file only on
// flush(), so a crash between checkpoints leaves the file exactly at the
// last flushed byte count (which the checkpoint records).
class TableWriter {
public:
  TableWriter() = default;
  TableWriter(std::filesystem::path path, std::vector<std::string> columns)
      : path_(std::move(path)), columns_(std::move(columns)) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw TableIoError("cannot create " + path_.string());
    out << "index";
    for (const auto& c : columns_) out << ',' << c;
    out << '\n';
    out.flush();
    flushed_bytes_ = static_cast<std::uint64_t>(out.tellp());
  }

  // Reattach to an existing file, truncating to a recorded byte offset.
  static TableWriter resume(std::filesystem::path path, std::vector<std::string> columns,
                            std::uint64_t byte_offset, std::uint64_t row_count) {
    std::filesystem::resize_file(path, byte_offset);
    TableWriter w;
    w.path_ = std::move(path);
    w.columns_ = std::move(columns);
    w.flushed_bytes_ = byte_offset;
    w.rows_ = row_count;
    return w;
  }

  void append_row(long long index, std::span<const double> values) {
    if (values.size() != columns_.size())
      throw TableIoError("row width mismatch for " + path_.string());
    buffer_ += std::to_string(index);
    for (double v : values) {
      buffer_ += ',';
      buffer_ += text::format_double(v);
    }
    buffer_ += '\n';
    ++rows_;
  }

  void flush() {
    if (buffer_.empty()) return;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out.good()) throw TableIoError("cannot append to " + path_.string());
    out << buffer_;
    out.flush();
    flushed_bytes_ += buffer_.size();
    buffer_.clear();
  }

  const std::filesystem::path& path() const { return path_; }
  std::uint64_t flushed_bytes() const { return flushed_bytes_; }
  std::uint64_t row_count() const { return rows_; }
  std::uint64_t flushed_rows() const { return rows_ - pending_rows(); }

private:
  std::uint64_t pending_rows() const {
    std::uint64_t n = 0;
    for (char c : buffer_)
      if (c == '\n') ++n;
    return n;
  }

  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::string buffer_;
  std::uint64_t flushed_bytes_ = 0;
  std::uint64_t rows_ = 0;
};

}  // namespace wdsgen
