#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "narme/matrix.hpp"

namespace narme {

/// Half-open interval [low, high).
struct RangeSpec {
  double low = 0.0;
  double high = 1.0;
  void validate() const {
    if (!(low < high)) throw std::invalid_argument("RangeSpec: low must be < high");
  }
  bool operator==(const RangeSpec&) const = default;
};

enum class ArithOp { add, mul };

std::string to_string(ArithOp op);
ArithOp arith_op_from_string(const std::string& name);

struct DatasetMeta {
  std::string op;  // "add", "mul" or "series"
  RangeSpec range;
  std::uint64_t seed = 0;
};

struct LabeledDataset {
  Matrix inputs;   // [N, in]
  Matrix targets;  // [N, 1]
  DatasetMeta meta;
  std::size_t size() const { return targets.rows(); }
};

struct Series {
  std::vector<double> values;
  std::string origin;  // "synthetic(...)" or "csv(path, column)"
};

/// Error from load_csv_series, with the failing row/column identified.
struct CsvError : std::runtime_error {
  enum class Code { missing_file, missing_column, bad_cell };
  CsvError(Code code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  Code code;
};

/// `count` pairs drawn uniformly from range^2, targets x1+x2 or x1*x2 exactly.
LabeledDataset gen_arithmetic(std::uint64_t seed, std::size_t count, ArithOp op,
                              const RangeSpec& range);

/// Geometric random walk v[t+1] = v[t] * exp(drift + vol * z[t]); all values
/// stay positive. `length` values total, v[0] = start.
Series gen_synthetic_series(std::uint64_t seed, std::size_t length, double drift,
                            double vol, double start);

/// Reads one named column from a headered CSV file, values in file order.
Series load_csv_series(const std::string& path, const std::string& column_name);

enum class SeriesNormalize { none, minmax_train };

struct WindowedSplit {
  LabeledDataset train;
  LabeledDataset test;
  double split_fraction = 0.0;  // actual train share, floor(0.8 * samples) / samples
  double scale_low = 0.0;       // minmax parameters fit on the train portion
  double scale_high = 1.0;
};

/// Sliding windows: sample i is ([v_i .. v_{i+window-1}] -> v_{i+window}),
/// split chronologically with floor(0.8 * samples) train rows. Minmax
/// scaling, when selected, is fit on the values appearing in train samples
/// and applied to both splits.
WindowedSplit window_series(const Series& series, std::size_t window,
                            SeriesNormalize normalize);

/// Two arithmetic datasets over disjoint input ranges (train_range must not
/// overlap test_range).
std::pair<LabeledDataset, LabeledDataset> extrapolation_split(
    ArithOp op, const RangeSpec& train_range, const RangeSpec& test_range,
    std::size_t train_count, std::size_t test_count, std::uint64_t seed);

}  // namespace narme
