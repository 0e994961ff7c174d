#include "narme/datagen.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "narme/rng.hpp"

namespace narme {

std::string to_string(ArithOp op) { return op == ArithOp::add ? "add" : "mul"; }

ArithOp arith_op_from_string(const std::string& name) {
  if (name == "add") return ArithOp::add;
  if (name == "mul") return ArithOp::mul;
  throw std::invalid_argument("unknown arithmetic op: " + name);
}

LabeledDataset gen_arithmetic(std::uint64_t seed, std::size_t count, ArithOp op,
                              const RangeSpec& range) {
  range.validate();
  if (count == 0) throw std::invalid_argument("gen_arithmetic: count must be > 0");
  Rng rng(seed);
  LabeledDataset ds;
  ds.inputs = Matrix(count, 2);
  ds.targets = Matrix(count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double x1 = rng.uniform(range.low, range.high);
    const double x2 = rng.uniform(range.low, range.high);
    ds.inputs(i, 0) = x1;
    ds.inputs(i, 1) = x2;
    ds.targets(i, 0) = op == ArithOp::add ? x1 + x2 : x1 * x2;
  }
  ds.meta = {to_string(op), range, seed};
  return ds;
}

Series gen_synthetic_series(std::uint64_t seed, std::size_t length, double drift,
                            double vol, double start) {
  if (length == 0) throw std::invalid_argument("gen_synthetic_series: length must be > 0");
  if (!(start > 0.0)) throw std::invalid_argument("gen_synthetic_series: start must be > 0");
  if (vol < 0.0) throw std::invalid_argument("gen_synthetic_series: vol must be >= 0");
  Rng rng(seed);
  Series s;
  s.values.resize(length);
  s.values[0] = start;
  for (std::size_t t = 1; t < length; ++t)
    s.values[t] = s.values[t - 1] * std::exp(drift + vol * rng.gauss());
  std::ostringstream origin;
  origin << "synthetic(seed=" << seed << ", drift=" << drift << ", vol=" << vol
         << ", start=" << start << ")";
  s.origin = origin.str();
  return s;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

Series load_csv_series(const std::string& path, const std::string& column_name) {
  std::ifstream in(path);
  if (!in)
    throw CsvError(CsvError::Code::missing_file, "cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw CsvError(CsvError::Code::missing_column, "empty CSV file: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == column_name) {
      col = i;
      break;
    }
  if (col == header.size())
    throw CsvError(CsvError::Code::missing_column,
                   "column not found in " + path + ": " + column_name);

  Series s;
  std::size_t row = 1;  // data rows are 1-based, header is row 0
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (col >= cells.size())
      throw CsvError(CsvError::Code::bad_cell,
                     "row " + std::to_string(row) + " has no column '" + column_name + "'");
    const std::string& cell = cells[col];
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
      throw CsvError(CsvError::Code::bad_cell, "row " + std::to_string(row) +
                                                   ", column '" + column_name +
                                                   "': cannot parse '" + cell + "'");
    s.values.push_back(value);
    ++row;
  }
  s.origin = "csv(" + path + ", " + column_name + ")";
  return s;
}

WindowedSplit window_series(const Series& series, std::size_t window,
                            SeriesNormalize normalize) {
  if (window < 1) throw std::invalid_argument("window_series: window must be >= 1");
  const std::size_t length = series.values.size();
  if (length < window + 2)
    throw std::invalid_argument("window_series: series too short for window");

  const std::size_t samples = length - window;
  const std::size_t train_n =
      static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(samples)));
  const std::size_t test_n = samples - train_n;

  double lo = 0.0, hi = 1.0;
  if (normalize == SeriesNormalize::minmax_train) {
    // every value visible in a train sample: v_0 .. v_{train_n - 1 + window}
    lo = hi = series.values[0];
    for (std::size_t i = 0; i < train_n + window; ++i) {
      lo = std::min(lo, series.values[i]);
      hi = std::max(hi, series.values[i]);
    }
  }
  const double span = hi - lo;
  const auto scale = [&](double v) {
    if (normalize == SeriesNormalize::none) return v;
    return span > 0.0 ? (v - lo) / span : 0.0;
  };

  const auto build = [&](std::size_t begin, std::size_t n) {
    LabeledDataset ds;
    ds.inputs = Matrix(n, window);
    ds.targets = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < window; ++j)
        ds.inputs(i, j) = scale(series.values[begin + i + j]);
      ds.targets(i, 0) = scale(series.values[begin + i + window]);
    }
    ds.meta = {"series", {0.0, 1.0}, 0};
    return ds;
  };

  WindowedSplit out;
  out.train = build(0, train_n);
  out.test = build(train_n, test_n);
  out.split_fraction = static_cast<double>(train_n) / static_cast<double>(samples);
  out.scale_low = lo;
  out.scale_high = hi;
  return out;
}

std::pair<LabeledDataset, LabeledDataset> extrapolation_split(
    ArithOp op, const RangeSpec& train_range, const RangeSpec& test_range,
    std::size_t train_count, std::size_t test_count, std::uint64_t seed) {
  train_range.validate();
  test_range.validate();
  const bool disjoint =
      train_range.high <= test_range.low || test_range.high <= train_range.low;
  if (!disjoint)
    throw std::invalid_argument("extrapolation_split: ranges overlap");
  return {gen_arithmetic(mix_seed(seed, 1), train_count, op, train_range),
          gen_arithmetic(mix_seed(seed, 2), test_count, op, test_range)};
}

}  // namespace narme
