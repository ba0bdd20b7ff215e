#include "ptse/dataset.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ptse/errors.hpp"
#include "ptse/format.hpp"

namespace ptse {

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

std::vector<std::string> read_lines(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  return lines;
}

[[noreturn]] void fail(const std::string& path, std::size_t line_no, const std::string& message)
{
  throw ParseError(path + ":" + std::to_string(line_no) + ": " + message);
}

bool all_digits(std::string_view s)
{
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

} // namespace

bool is_iso8601(const std::string& s)
{
  // YYYY-MM-DD[ T HH:MM[:SS[.frac]]][Z|+hh:mm|-hh:mm]
  if (s.size() < 10 || !all_digits(std::string_view(s).substr(0, 4)) || s[4] != '-' ||
      !all_digits(std::string_view(s).substr(5, 2)) || s[7] != '-' ||
      !all_digits(std::string_view(s).substr(8, 2))) {
    return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    return false;
  }
  std::string_view rest = std::string_view(s).substr(10);
  if (rest.empty()) {
    return true;
  }
  if (rest[0] != 'T' && rest[0] != ' ') {
    return false;
  }
  rest.remove_prefix(1);
  if (rest.size() < 5 || !all_digits(rest.substr(0, 2)) || rest[2] != ':' ||
      !all_digits(rest.substr(3, 2))) {
    return false;
  }
  rest.remove_prefix(5);
  if (!rest.empty() && rest[0] == ':') {
    if (rest.size() < 3 || !all_digits(rest.substr(1, 2))) {
      return false;
    }
    rest.remove_prefix(3);
    if (!rest.empty() && rest[0] == '.') {
      std::size_t i = 1;
      while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) {
        ++i;
      }
      if (i == 1) {
        return false;
      }
      rest.remove_prefix(i);
    }
  }
  if (rest.empty() || rest == "Z") {
    return true;
  }
  return (rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && all_digits(rest.substr(1, 2)) &&
         rest[3] == ':' && all_digits(rest.substr(4, 2));
}

Dataset read_dataset(const std::string& path, bool require_target)
{
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw ParseError(path + ": file is empty");
  }

  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "timestamp") {
    fail(path, 1, "first column must be 'timestamp'");
  }
  int target_col = -1;
  std::vector<std::pair<int, std::string>> member_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "y") {
      if (target_col >= 0) {
        fail(path, 1, "duplicate 'y' column");
      }
      target_col = static_cast<int>(c);
    } else if (name.rfind("m:", 0) == 0 && name.size() > 2) {
      member_cols.emplace_back(static_cast<int>(c), name.substr(2));
    } else {
      fail(path, 1, "unknown column '" + name + "' (expected 'y' or 'm:<label>')");
    }
  }
  if (require_target && target_col < 0) {
    fail(path, 1, "missing required column 'y'");
  }
  if (member_cols.empty()) {
    fail(path, 1, "no member columns ('m:<label>') found");
  }

  const std::size_t n_rows = lines.size() - 1;
  if (n_rows == 0) {
    fail(path, 1, "no data rows");
  }

  Dataset data;
  data.has_targets = target_col >= 0;
  data.timestamps.reserve(n_rows);
  if (data.has_targets) {
    data.targets.resize(static_cast<Eigen::Index>(n_rows));
  }
  data.member_predictions.resize(static_cast<Eigen::Index>(n_rows),
                                 static_cast<Eigen::Index>(member_cols.size()));
  for (const auto& [col, label] : member_cols) {
    (void)col;
    data.member_names.push_back(label);
  }

  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::size_t line_no = r + 2;
    const std::vector<std::string> cells = split_csv_line(lines[r + 1]);
    if (cells.size() != header.size()) {
      fail(path, line_no,
           "expected " + std::to_string(header.size()) + " cells, found " +
             std::to_string(cells.size()));
    }
    const std::string& stamp = cells[0];
    if (!is_iso8601(stamp)) {
      fail(path, line_no, "timestamp '" + stamp + "' is not ISO-8601");
    }
    if (r > 0 && stamp <= data.timestamps.back()) {
      fail(path, line_no, "timestamps must be strictly increasing");
    }
    data.timestamps.push_back(stamp);

    if (data.has_targets) {
      double y = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(target_col)], y)) {
        fail(path, line_no,
             "column 'y': not a finite number: '" + cells[static_cast<std::size_t>(target_col)] +
               "'");
      }
      data.targets[static_cast<Eigen::Index>(r)] = y;
    }
    for (std::size_t m = 0; m < member_cols.size(); ++m) {
      const auto& [col, label] = member_cols[m];
      double v = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(col)], v)) {
        fail(path, line_no,
             "column 'm:" + label + "': not a finite number: '" +
               cells[static_cast<std::size_t>(col)] + "'");
      }
      data.member_predictions(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) = v;
    }
  }
  return data;
}

TimeSeriesFrame to_frame(const Dataset& dataset, double q)
{
  if (!dataset.has_targets) {
    throw MissingData("dataset has no target column");
  }
  return TimeSeriesFrame(dataset.timestamps, dataset.targets, dataset.member_predictions, q,
                         dataset.member_names);
}

void write_forecast_csv(const std::string& path, const std::vector<ForecastRow>& rows)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << "timestamp,quantile_value,level,cdf_residual\n";
  for (const ForecastRow& row : rows) {
    out << row.timestamp << ',' << format_double(row.quantile_value) << ','
        << format_double(row.level) << ',' << format_double(row.cdf_residual) << '\n';
  }
}

std::vector<ForecastRow> read_forecast_csv(const std::string& path)
{
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) {
    throw ParseError(path + ": file is empty");
  }
  if (split_csv_line(lines[0]) !=
      std::vector<std::string>{ "timestamp", "quantile_value", "level", "cdf_residual" }) {
    fail(path, 1, "expected header 'timestamp,quantile_value,level,cdf_residual'");
  }
  std::vector<ForecastRow> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> cells = split_csv_line(lines[r]);
    if (cells.size() != 4) {
      fail(path, r + 1, "expected 4 cells");
    }
    ForecastRow row;
    row.timestamp = cells[0];
    if (!is_iso8601(row.timestamp)) {
      fail(path, r + 1, "timestamp '" + row.timestamp + "' is not ISO-8601");
    }
    if (!parse_double(cells[1], row.quantile_value) || !parse_double(cells[2], row.level) ||
        !parse_double(cells[3], row.cdf_residual)) {
      fail(path, r + 1, "non-numeric cell");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace ptse
