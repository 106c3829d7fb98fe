#pragma once

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "housedict/experiment.hpp"

namespace housedict {

inline constexpr std::string_view kCsvHeader =
    "experiment_kind,n,p,m,theta,snr_db,trial,seed,method,linf_u,frob_v,"
    "x_err_per_entry,support_f1,wall_time_ms,flags";

namespace detail {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), end);
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

template <typename T>
T parse_number(std::string_view s, std::string_view field) {
  T value{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error("bad value '" + std::string(s) + "' in column " +
                             std::string(field));
  }
  return value;
}

inline std::optional<double> parse_optional(std::string_view s,
                                            std::string_view field) {
  if (s.empty()) return std::nullopt;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return parse_number<double>(s, field);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Streams rows to CSV; the header is written on construction.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) { out_ << kCsvHeader << '\n'; }

  void write(const ResultRow& r) {
    using detail::format_double;
    using detail::format_optional;
    out_ << to_string(r.kind) << ',' << r.n << ',' << r.p << ',' << r.m << ','
         << format_double(r.theta) << ',' << format_optional(r.snr_db) << ','
         << r.trial << ',' << r.seed << ',' << r.method << ','
         << format_optional(r.linf_u) << ',' << format_optional(r.frob_v) << ','
         << format_optional(r.x_err_per_entry) << ','
         << format_optional(r.support_f1) << ','
         << format_optional(r.wall_time_ms) << ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
      if (i) out_ << ';';
      out_ << r.flags[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  CsvWriter writer(out);
  for (const auto& r : rows) writer.write(r);
}

inline std::string to_csv_string(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_csv(rows, out);
  return out.str();
}

inline void write_csv(const std::vector<ResultRow>& rows,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<ResultRow> read_csv(std::istream& in,
                                       const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error(source + ": missing or unexpected CSV header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 15) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) +
                               ": expected 15 fields, got " +
                               std::to_string(f.size()));
    }
    try {
      ResultRow r;
      const auto kind = parse_experiment_kind(f[0]);
      if (!kind) throw std::runtime_error("unknown experiment_kind");
      r.kind = *kind;
      r.n = detail::parse_number<Index>(f[1], "n");
      r.p = detail::parse_number<Index>(f[2], "p");
      r.m = detail::parse_number<std::size_t>(f[3], "m");
      r.theta = detail::parse_number<double>(f[4], "theta");
      r.snr_db = detail::parse_optional(f[5], "snr_db");
      r.trial = detail::parse_number<int>(f[6], "trial");
      r.seed = detail::parse_number<std::uint64_t>(f[7], "seed");
      r.method = std::string(f[8]);
      r.linf_u = detail::parse_optional(f[9], "linf_u");
      r.frob_v = detail::parse_optional(f[10], "frob_v");
      r.x_err_per_entry = detail::parse_optional(f[11], "x_err_per_entry");
      r.support_f1 = detail::parse_optional(f[12], "support_f1");
      r.wall_time_ms = detail::parse_optional(f[13], "wall_time_ms");
      if (!f[14].empty()) {
        for (auto flag : detail::split(f[14], ';')) r.flags.emplace_back(flag);
      }
      rows.push_back(std::move(r));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return rows;
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in, path);
}

}  // namespace housedict
