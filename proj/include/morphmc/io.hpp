#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace morphmc {

inline constexpr int kFormatVersion = 1;

/// Locale-independent decimal rendering with 17 significant digits (enough
/// to round-trip any double exactly).
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc())
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline mangling
  if (!out)
    throw std::runtime_error("cannot open output file: " + path);
  return out;
}

/// Draws as CSV: a format_version comment, a header row
/// iter,beta_1..beta_k[,gamma_1..gamma_k], then one row per kept draw.
/// iters are the chain iteration numbers the rows were recorded at.
inline void write_samples_csv(std::ostream& out,
                              const std::vector<std::int64_t>& iters,
                              const Eigen::MatrixXd& beta,
                              const Eigen::MatrixXd* gamma = nullptr) {
  const auto k = beta.cols();
  out << "# format_version = " << kFormatVersion << "\n";
  out << "iter";
  for (Eigen::Index j = 0; j < k; ++j) out << ",beta_" << (j + 1);
  if (gamma)
    for (Eigen::Index j = 0; j < k; ++j) out << ",gamma_" << (j + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < beta.rows(); ++i) {
    out << iters[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j)
      out << ',' << format_double(beta(i, j));
    if (gamma)
      for (Eigen::Index j = 0; j < k; ++j)
        out << ',' << format_double((*gamma)(i, j));
    out << "\n";
  }
}

/// Draws as JSON lines: a {"format_version":1} header object, then one
/// object per kept draw.
inline void write_samples_jsonl(std::ostream& out,
                                const std::vector<std::int64_t>& iters,
                                const Eigen::MatrixXd& beta,
                                const Eigen::MatrixXd* gamma = nullptr) {
  out << "{\"format_version\":" << kFormatVersion << "}\n";
  for (Eigen::Index i = 0; i < beta.rows(); ++i) {
    out << "{\"iter\":" << iters[static_cast<std::size_t>(i)] << ",\"beta\":[";
    for (Eigen::Index j = 0; j < beta.cols(); ++j)
      out << (j ? "," : "") << format_double(beta(i, j));
    out << "]";
    if (gamma) {
      out << ",\"gamma\":[";
      for (Eigen::Index j = 0; j < gamma->cols(); ++j)
        out << (j ? "," : "") << format_double((*gamma)(i, j));
      out << "]";
    }
    out << "}\n";
  }
}

/// Key-value report block: `key = value` lines in insertion order.
class ReportWriter {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + " = " + value);
  }
  void add(const std::string& key, double value) {
    add(key, format_double(value));
  }
  void add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }
  void add_block(const std::string& block) {
    if (!block.empty()) lines_.push_back(block);
  }
  std::string str() const {
    std::string out;
    for (const auto& l : lines_) {
      out += l;
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace morphmc
