#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avgdiff/averaging.hpp"

namespace avgdiff {

enum class Variant { Single, AvgMC, AvgED, AvgLDS };

struct MethodVariant {
  MethodId method = MethodId::AFD;
  Variant variant = Variant::Single;

  friend bool operator==(const MethodVariant&, const MethodVariant&) = default;
};

/// Row label as used by the appendix fixtures: AFD, AFD_MC_AV, AFD_ED_AV, RE,
/// RE_AV, LDI, LDI_AV. Other combinations: <METHOD>_<ED|LDS>_AV, AFD_LDS_AV, ...
std::string label(MethodVariant mv);
MethodVariant parse_label(std::string_view text);
std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view text);

/// The seven reference rows, in table order.
std::vector<MethodVariant> paper_variants();

enum class OutputFormat { Csv, Markdown };

std::vector<double> default_h_grid();

struct RunConfig {
  std::vector<int> case_ids;  // empty: all 19
  std::vector<MethodVariant> variants = paper_variants();
  std::vector<double> h_grid = default_h_grid();
  std::size_t n_samples = 10'000;
  std::uint64_t seed = 1;
  QuadratureMode qmode = QuadratureMode::CorrectedComposite;
  LdiSignMode smode = LdiSignMode::Corrected;
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Throws std::invalid_argument when h_grid is not strictly decreasing and
/// positive, a case id is unknown, the variant list is empty, or n_samples is
/// unusable for a requested variant.
void validate(const RunConfig& cfg);

StepStrategy strategy_for(Variant v, std::size_t n_samples, std::uint64_t seed);

inline constexpr std::size_t kNoMinimum = std::numeric_limits<std::size_t>::max();

/// Rows are method variants, columns are step sizes, cells absolute errors.
struct ErrorTable {
  std::string title;
  std::vector<MethodVariant> rows;
  std::vector<double> cols;
  std::vector<double> cells;          // row-major
  std::vector<unsigned char> flagged; // 1 where the estimate was not finite
  std::vector<std::size_t> minima;    // per row; empty until mark_minima

  ErrorTable() = default;
  ErrorTable(std::string title, std::vector<MethodVariant> rows, std::vector<double> cols);

  double& at(std::size_t r, std::size_t c) { return cells[r * cols.size() + c]; }
  double at(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
  bool is_flagged(std::size_t r, std::size_t c) const { return flagged[r * cols.size() + c] != 0; }
  void set_flag(std::size_t r, std::size_t c) { flagged[r * cols.size() + c] = 1; }
  bool any_flagged() const;

  /// Index of the row with this label, or rows.size().
  std::size_t find_row(MethodVariant mv) const;
};

struct Cell {
  double value;
  bool flagged;
};

/// |approx - truth|; a non-finite input or result gives a flagged cell.
Cell abs_error(double approx, double truth);

/// Evaluates every (variant, h) cell for one case against the analytic derivative.
ErrorTable run_case(const FunctionCase& fcase, const RunConfig& cfg);

/// run_case for an arbitrary function; case_key feeds the substream seeds.
ErrorTable run_function(std::string title, const FunctionHandle& f, double x, double truth,
                        std::uint64_t case_key, const RunConfig& cfg);

/// Cell-wise arithmetic mean. Throws InvalidAggregation on label mismatch.
ErrorTable aggregate_case_average(std::span<const ErrorTable> tables);

/// Records the per-row argmin column; ties go to the leftmost (largest h).
/// Flagged cells never win.
ErrorTable mark_minima(ErrorTable table);

enum class Shift { Smaller, Equal, Larger };
std::string_view name(Shift s);

struct ShiftEntry {
  MethodVariant single;
  MethodVariant averaged;
  double h_single;
  double h_averaged;
  Shift shift;  // where the averaged optimum sits relative to the single one
};

/// Pairs every averaged row of `averaged` with the Single row of the same
/// method in `single` and compares their optimal steps. Both tables must share
/// columns. Rows without a counterpart are skipped.
std::vector<ShiftEntry> optimal_shift_report(const ErrorTable& single, const ErrorTable& averaged);

struct ScatterPoint {
  int case_id;
  double log10_d1;
  double log10_d2;
};

std::vector<ScatterPoint> scatter_data(std::span<const FunctionCase> cases);

/// Two significant digits in scientific notation: 0.00123 -> "1.2e-3".
std::string format_sci2(double v);
/// Step label: 1e-3 -> "1e-3", 2.5e-4 -> "2.5e-4".
std::string format_step(double h);

std::string render(const ErrorTable& table, OutputFormat format);

struct ScopedShifts {
  std::string scope;
  std::vector<ShiftEntry> entries;
};
std::string render_shift_report(std::span<const ScopedShifts> report, OutputFormat format);
std::string render_scatter(std::span<const ScatterPoint> points);

/// Parses the fixture layout: header "h,<step>,...", one row per label.
ErrorTable parse_table_csv(std::string_view text, std::string title);
ErrorTable read_table_csv(const std::filesystem::path& path);
/// All case_*.csv in a directory, ordered by file name.
std::vector<ErrorTable> read_fixture_dir(const std::filesystem::path& dir);

/// The printed case-averaged tables (7 rows x 6 steps).
const ErrorTable& published_case_average();

struct CellCheck {
  std::size_t row;
  std::size_t col;
  double published;
  double mean;       // mean of the displayed inputs
  double mean_lo;    // each input at the low end of its display interval
  double mean_hi;
  bool point_ok;     // |mean - published| <= one unit of the 2nd significant digit
  bool interval_ok;  // display intervals of published and mean overlap
};

/// Half-width of the interval a value printed with `digits` significant digits stands for.
double display_half_unit(double v, int digits = 2);

/// Aggregates `tables` and compares each cell with published_case_average().
std::vector<CellCheck> check_against_published(std::span<const ErrorTable> tables);

struct BenchResult {
  std::vector<int> case_ids;
  std::vector<ErrorTable> case_tables;  // minima marked
  ErrorTable averaged;                  // minima marked
  std::vector<ScopedShifts> shifts;     // one per case, then "average"
  std::vector<ScatterPoint> scatter;
};

/// Runs every case of the configuration. Cells are evaluated in parallel;
/// output does not depend on the thread count.
BenchResult run_bench(const RunConfig& cfg);

/// File name -> contents for a bench run, in the layout case_<id>.<ext>,
/// case_averaged.<ext>, shift_report.<ext>, scatter.csv.
std::vector<std::pair<std::string, std::string>> bench_outputs(const BenchResult& result,
                                                                OutputFormat format);

}  // namespace avgdiff
