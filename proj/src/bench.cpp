#include "avgdiff/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace avgdiff {

// ---------------------------------------------------------------- labels

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Single: return "single";
    case Variant::AvgMC: return "mc";
    case Variant::AvgED: return "ed";
    case Variant::AvgLDS: return "lds";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "single") return Variant::Single;
  if (t == "mc") return Variant::AvgMC;
  if (t == "ed") return Variant::AvgED;
  if (t == "lds") return Variant::AvgLDS;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

std::string label(MethodVariant mv) {
  std::string s(name(mv.method));
  switch (mv.variant) {
    case Variant::Single: return s;
    case Variant::AvgMC: return mv.method == MethodId::AFD ? s + "_MC_AV" : s + "_AV";
    case Variant::AvgED: return s + "_ED_AV";
    case Variant::AvgLDS: return s + "_LDS_AV";
  }
  return s;
}

MethodVariant parse_label(std::string_view text) {
  const auto us = text.find('_');
  const MethodId m = parse_method(text.substr(0, us));
  if (us == std::string_view::npos) return {m, Variant::Single};
  const auto rest = text.substr(us + 1);
  if (rest == "AV" || rest == "MC_AV") return {m, Variant::AvgMC};
  if (rest == "ED_AV") return {m, Variant::AvgED};
  if (rest == "LDS_AV") return {m, Variant::AvgLDS};
  throw std::invalid_argument("unknown row label '" + std::string(text) + "'");
}

std::vector<MethodVariant> paper_variants() {
  return {{MethodId::AFD, Variant::Single}, {MethodId::AFD, Variant::AvgMC},
          {MethodId::AFD, Variant::AvgED},  {MethodId::RE, Variant::Single},
          {MethodId::RE, Variant::AvgMC},   {MethodId::LDI, Variant::Single},
          {MethodId::LDI, Variant::AvgMC}};
}

std::vector<double> default_h_grid() { return {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}; }

// ---------------------------------------------------------------- config

void validate(const RunConfig& cfg) {
  if (cfg.h_grid.empty()) throw std::invalid_argument("h grid is empty");
  for (std::size_t i = 0; i < cfg.h_grid.size(); ++i) {
    const double h = cfg.h_grid[i];
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h grid values must be positive");
    if (i > 0 && !(h < cfg.h_grid[i - 1]))
      throw std::invalid_argument("h grid must be strictly decreasing");
  }
  for (int id : cfg.case_ids) (void)find_case(id);
  if (cfg.variants.empty()) throw std::invalid_argument("no method variants selected");
  if (cfg.n_samples < 1) throw std::invalid_argument("sample count must be at least 1");
  for (const auto& mv : cfg.variants)
    if (mv.variant == Variant::AvgED && cfg.n_samples < 2)
      throw InvalidStrategy("equidistant averaging needs --samples >= 2");
}

StepStrategy strategy_for(Variant v, std::size_t n_samples, std::uint64_t seed) {
  switch (v) {
    case Variant::Single: return StepStrategy::single();
    case Variant::AvgMC: return StepStrategy::mc_uniform(n_samples, seed);
    case Variant::AvgED: return StepStrategy::equidistant(n_samples);
    case Variant::AvgLDS: return StepStrategy::low_discrepancy(n_samples);
  }
  return StepStrategy::single();
}

// ---------------------------------------------------------------- tables

ErrorTable::ErrorTable(std::string t, std::vector<MethodVariant> r, std::vector<double> c)
    : title(std::move(t)),
      rows(std::move(r)),
      cols(std::move(c)),
      cells(rows.size() * cols.size(), 0.0),
      flagged(rows.size() * cols.size(), 0) {}

bool ErrorTable::any_flagged() const {
  return std::any_of(flagged.begin(), flagged.end(), [](unsigned char f) { return f != 0; });
}

std::size_t ErrorTable::find_row(MethodVariant mv) const {
  return static_cast<std::size_t>(std::find(rows.begin(), rows.end(), mv) - rows.begin());
}

Cell abs_error(double approx, double truth) {
  if (!std::isfinite(approx) || !std::isfinite(truth))
    return {std::numeric_limits<double>::quiet_NaN(), true};
  const double e = std::abs(approx - truth);
  if (!std::isfinite(e)) return {e, true};
  return {e, false};
}

namespace {

struct Target {
  FunctionHandle f;
  double x;
  double truth;
  std::uint64_t key;
};

Cell evaluate_cell(const Target& target, MethodVariant mv, double h, const RunConfig& cfg) {
  const std::uint64_t seed =
      substream_seed(cfg.seed, {target.key, static_cast<std::uint64_t>(mv.method),
                                static_cast<std::uint64_t>(mv.variant), std::bit_cast<std::uint64_t>(h)});
  try {
    const auto strategy = strategy_for(mv.variant, cfg.n_samples, seed);
    const auto r = averaged_derivative(mv.method, target.f, target.x, h, strategy, cfg.qmode, cfg.smode);
    return abs_error(r.mean, target.truth);
  } catch (const DomainError&) {
    return {std::numeric_limits<double>::quiet_NaN(), true};
  } catch (const NonFiniteEstimate&) {
    return {std::numeric_limits<double>::quiet_NaN(), true};
  }
}

void store(ErrorTable& t, std::size_t r, std::size_t c, Cell cell) {
  t.at(r, c) = cell.value;
  if (cell.flagged) t.set_flag(r, c);
}

std::string case_title(int id) { return "Case number: " + std::to_string(id); }

}  // namespace

ErrorTable run_function(std::string title, const FunctionHandle& f, double x, double truth,
                        std::uint64_t case_key, const RunConfig& cfg) {
  validate(cfg);
  const Target target{f, x, truth, case_key};
  ErrorTable t(std::move(title), cfg.variants, cfg.h_grid);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.cols.size(); ++c)
      store(t, r, c, evaluate_cell(target, t.rows[r], t.cols[c], cfg));
  return mark_minima(std::move(t));
}

ErrorTable run_case(const FunctionCase& fcase, const RunConfig& cfg) {
  return run_function(case_title(fcase.case_id), fcase.fn, fcase.x, d1_exact(fcase.fn, fcase.x),
                      static_cast<std::uint64_t>(fcase.case_id), cfg);
}

ErrorTable aggregate_case_average(std::span<const ErrorTable> tables) {
  if (tables.empty()) throw InvalidAggregation("nothing to aggregate");
  const auto& first = tables.front();
  ErrorTable out("Case-averaged results", first.rows, first.cols);
  for (const auto& t : tables) {
    if (t.rows != first.rows) throw InvalidAggregation("row labels differ in '" + t.title + "'");
    if (t.cols != first.cols) throw InvalidAggregation("step columns differ in '" + t.title + "'");
  }
  const double n = static_cast<double>(tables.size());
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    for (std::size_t c = 0; c < out.cols.size(); ++c) {
      double sum = 0.0;
      bool flag = false;
      for (const auto& t : tables) {
        sum += t.at(r, c);
        flag = flag || t.is_flagged(r, c);
      }
      out.at(r, c) = sum / n;
      if (flag) out.set_flag(r, c);
    }
  }
  return mark_minima(std::move(out));
}

ErrorTable mark_minima(ErrorTable table) {
  table.minima.assign(table.rows.size(), kNoMinimum);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::size_t best = kNoMinimum;
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      if (table.is_flagged(r, c) || std::isnan(table.at(r, c))) continue;
      if (best == kNoMinimum || table.at(r, c) < table.at(r, best)) best = c;
    }
    table.minima[r] = best;
  }
  return table;
}

std::string_view name(Shift s) {
  switch (s) {
    case Shift::Smaller: return "smaller";
    case Shift::Equal: return "equal";
    case Shift::Larger: return "larger";
  }
  return "?";
}

std::vector<ShiftEntry> optimal_shift_report(const ErrorTable& single, const ErrorTable& averaged) {
  if (single.cols != averaged.cols)
    throw InvalidAggregation("shift report needs tables with the same step columns");
  const ErrorTable s = mark_minima(single);
  const ErrorTable a = mark_minima(averaged);
  std::vector<ShiftEntry> out;
  for (std::size_t ra = 0; ra < a.rows.size(); ++ra) {
    const MethodVariant av = a.rows[ra];
    if (av.variant == Variant::Single) continue;
    const MethodVariant sv{av.method, Variant::Single};
    const std::size_t rs = s.find_row(sv);
    if (rs == s.rows.size()) continue;
    const std::size_t cs = s.minima[rs];
    const std::size_t ca = a.minima[ra];
    if (cs == kNoMinimum || ca == kNoMinimum) continue;
    const double hs = s.cols[cs];
    const double ha = a.cols[ca];
    const Shift shift = ha < hs ? Shift::Smaller : (ha > hs ? Shift::Larger : Shift::Equal);
    out.push_back({sv, av, hs, ha, shift});
  }
  return out;
}

std::vector<ScatterPoint> scatter_data(std::span<const FunctionCase> cases) {
  std::vector<ScatterPoint> out;
  out.reserve(cases.size());
  for (const auto& c : cases)
    out.push_back({c.case_id, std::log10(std::abs(d1_exact(c.fn, c.x))),
                   std::log10(std::abs(d2_exact(c.fn, c.x)))});
  return out;
}

// ---------------------------------------------------------------- formatting

namespace {

// "1.23e-04" -> mantissa "1.23", exponent -4
std::pair<std::string, int> split_scientific(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", decimals, v);
  std::string s(buf);
  const auto e = s.find('e');
  return {s.substr(0, e), std::stoi(s.substr(e + 1))};
}

}  // namespace

std::string format_sci2(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0.0e0";
  auto [mantissa, exponent] = split_scientific(v, 1);
  return mantissa + "e" + std::to_string(exponent);
}

std::string format_step(double h) {
  auto [mantissa, exponent] = split_scientific(h, 5);
  if (mantissa.find('.') != std::string::npos) {
    while (mantissa.back() == '0') mantissa.pop_back();
    if (mantissa.back() == '.') mantissa.pop_back();
  }
  return mantissa + "e" + std::to_string(exponent);
}

std::string render(const ErrorTable& table, OutputFormat format) {
  std::ostringstream os;
  auto is_min = [&](std::size_t r, std::size_t c) {
    return r < table.minima.size() && table.minima[r] == c;
  };
  if (format == OutputFormat::Csv) {
    os << "h";
    for (double h : table.cols) os << ',' << format_step(h);
    os << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      os << label(table.rows[r]);
      for (std::size_t c = 0; c < table.cols.size(); ++c)
        os << ',' << (table.is_flagged(r, c) ? std::string("nan") : format_sci2(table.at(r, c)));
      os << '\n';
    }
    return os.str();
  }
  if (!table.title.empty()) os << "### " << table.title << "\n\n";
  os << "| h |";
  for (double h : table.cols) os << ' ' << format_step(h) << " |";
  os << "\n|---|";
  for (std::size_t c = 0; c < table.cols.size(); ++c) os << "---:|";
  os << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << "| " << label(table.rows[r]) << " |";
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      std::string cell = table.is_flagged(r, c) ? std::string("nan") : format_sci2(table.at(r, c));
      if (is_min(r, c)) cell = "**" + cell + "**";
      os << ' ' << cell << " |";
    }
    os << '\n';
  }
  return os.str();
}

std::string render_shift_report(std::span<const ScopedShifts> report, OutputFormat format) {
  std::ostringstream os;
  const bool md = format == OutputFormat::Markdown;
  if (md)
    os << "| scope | single | averaged | h_single | h_averaged | shift |\n"
          "|---|---|---|---:|---:|---|\n";
  else
    os << "scope,single,averaged,h_single,h_averaged,shift\n";
  for (const auto& scoped : report) {
    for (const auto& e : scoped.entries) {
      if (md)
        os << "| " << scoped.scope << " | " << label(e.single) << " | " << label(e.averaged) << " | "
           << format_step(e.h_single) << " | " << format_step(e.h_averaged) << " | " << name(e.shift)
           << " |\n";
      else
        os << scoped.scope << ',' << label(e.single) << ',' << label(e.averaged) << ','
           << format_step(e.h_single) << ',' << format_step(e.h_averaged) << ',' << name(e.shift)
           << '\n';
    }
  }
  return os.str();
}

std::string render_scatter(std::span<const ScatterPoint> points) {
  std::ostringstream os;
  os << "case_id,log10_d1,log10_d2\n";
  char buf[96];
  for (const auto& p : points) {
    // +0.0 folds a negative zero into "0.000000".
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f\n", p.case_id, p.log10_d1 + 0.0, p.log10_d2 + 0.0);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------- fixtures

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw std::invalid_argument("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

ErrorTable parse_table_csv(std::string_view text, std::string title) {
  std::vector<std::string> lines;
  std::istringstream is{std::string(text)};
  for (std::string line; std::getline(is, line);) lines.push_back(line);

  std::size_t i = 0;
  auto next_nonblank = [&]() -> bool {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    return i < lines.size();
  };
  if (!next_nonblank()) throw std::invalid_argument("empty table");
  const auto header = split_csv(lines[i]);
  if (header.empty() || header[0] != "h") throw std::invalid_argument("table header must start with 'h'");
  std::vector<double> cols;
  for (std::size_t k = 1; k < header.size(); ++k) cols.push_back(parse_number(header[k], i + 1));
  ++i;

  std::vector<MethodVariant> rows;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<unsigned char>> flags;
  for (; next_nonblank(); ++i) {
    const auto fields = split_csv(lines[i]);
    if (fields.size() != cols.size() + 1)
      throw std::invalid_argument("line " + std::to_string(i + 1) + ": expected " +
                                  std::to_string(cols.size() + 1) + " fields");
    rows.push_back(parse_label(fields[0]));
    values.emplace_back();
    flags.emplace_back();
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const double v = parse_number(fields[k], i + 1);
      values.back().push_back(v);
      flags.back().push_back(std::isfinite(v) ? 0 : 1);
    }
  }
  ErrorTable t(std::move(title), rows, cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      t.at(r, c) = values[r][c];
      if (flags[r][c]) t.set_flag(r, c);
    }
  return mark_minima(std::move(t));
}

ErrorTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open table", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_table_csv(ss.str(), path.stem().string());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::vector<ErrorTable> read_fixture_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::filesystem::filesystem_error("not a directory", dir, std::make_error_code(std::errc::not_a_directory));
  static const std::regex pattern(R"(case_\d+\.csv)");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ErrorTable> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_table_csv(f));
  return out;
}

const ErrorTable& published_case_average() {
  static const ErrorTable table = [] {
    ErrorTable t("Case-averaged results (published)", paper_variants(), default_h_grid());
    const double v[7][6] = {
        {2.0e-3, 2.0e-5, 1.8e-7, 3.0e-7, 1.8e-6, 6.3e-2},
        {2.2e-3, 2.2e-5, 2.2e-7, 2.3e-9, 3.1e-9, 5.1e-5},
        {1.2e-3, 1.2e-5, 1.2e-7, 1.7e-9, 1.6e-9, 1.0e-6},
        {6.9e-9, 7.6e-9, 7.1e-8, 4.3e-7, 2.4e-6, 9.4e-2},
        {1.1e-8, 6.0e-12, 4.2e-11, 7.1e-10, 1.0e-9, 4.0e-5},
        {1.2e-3, 1.4e-5, 7.2e-4, 7.2e-2, 5.5e0, 1.2e7},
        {1.3e-3, 1.3e-5, 4.4e-7, 9.3e-5, 5.1e-3, 8.0e3},
    };
    for (std::size_t r = 0; r < 7; ++r)
      for (std::size_t c = 0; c < 6; ++c) t.at(r, c) = v[r][c];
    return mark_minima(std::move(t));
  }();
  return table;
}

double display_half_unit(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return 0.0;
  const int exponent = split_scientific(std::abs(v), digits - 1).second;
  return 0.5 * std::pow(10.0, exponent - (digits - 1));
}

std::vector<CellCheck> check_against_published(std::span<const ErrorTable> tables) {
  const ErrorTable mean = aggregate_case_average(tables);
  const ErrorTable& pub = published_case_average();
  if (mean.rows != pub.rows || mean.cols != pub.cols)
    throw InvalidAggregation("fixtures do not have the published row/column layout");
  const double n = static_cast<double>(tables.size());
  std::vector<CellCheck> out;
  for (std::size_t r = 0; r < pub.rows.size(); ++r) {
    for (std::size_t c = 0; c < pub.cols.size(); ++c) {
      double lo = 0.0, hi = 0.0;
      for (const auto& t : tables) {
        const double v = t.at(r, c);
        const double half = display_half_unit(v);
        lo += std::max(0.0, v - half);
        hi += v + half;
      }
      CellCheck chk{r, c, pub.at(r, c), mean.at(r, c), lo / n, hi / n, false, false};
      const double half_p = display_half_unit(chk.published);
      // Slack of a few ulps: both sides went through decimal -> binary conversion.
      const double slack = 1e-12 * chk.published;
      chk.point_ok = std::abs(chk.mean - chk.published) <= 2.0 * half_p + slack;
      chk.interval_ok = chk.mean_lo <= chk.published + half_p + slack &&
                        chk.mean_hi >= chk.published - half_p - slack;
      out.push_back(chk);
    }
  }
  return out;
}

// ---------------------------------------------------------------- bench

BenchResult run_bench(const RunConfig& cfg) {
  validate(cfg);
  std::vector<FunctionCase> cases;
  if (cfg.case_ids.empty()) {
    cases = case_table();
  } else {
    for (int id : cfg.case_ids) cases.push_back(find_case(id));
  }

  BenchResult result;
  std::vector<Target> targets;
  for (const auto& c : cases) {
    result.case_ids.push_back(c.case_id);
    result.case_tables.emplace_back(case_title(c.case_id), cfg.variants, cfg.h_grid);
    targets.push_back({c.fn, c.x, d1_exact(c.fn, c.x), static_cast<std::uint64_t>(c.case_id)});
  }

  const std::size_t per_case = cfg.variants.size() * cfg.h_grid.size();
  const std::size_t total = per_case * cases.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job; (job = next.fetch_add(1, std::memory_order_relaxed)) < total;) {
      const std::size_t ci = job / per_case;
      const std::size_t r = (job % per_case) / cfg.h_grid.size();
      const std::size_t c = job % cfg.h_grid.size();
      // Each job owns a distinct cell; no two threads touch the same slot.
      store(result.case_tables[ci], r, c, evaluate_cell(targets[ci], cfg.variants[r], cfg.h_grid[c], cfg));
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& t : result.case_tables) t = mark_minima(std::move(t));
  result.averaged = aggregate_case_average(result.case_tables);
  for (std::size_t i = 0; i < cases.size(); ++i)
    result.shifts.push_back({"case_" + std::to_string(cases[i].case_id),
                             optimal_shift_report(result.case_tables[i], result.case_tables[i])});
  result.shifts.push_back({"average", optimal_shift_report(result.averaged, result.averaged)});
  result.scatter = scatter_data(cases);
  return result;
}

std::vector<std::pair<std::string, std::string>> bench_outputs(const BenchResult& result,
                                                                OutputFormat format) {
  const std::string ext = format == OutputFormat::Csv ? ".csv" : ".md";
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < result.case_tables.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "case_%02d", result.case_ids[i]);
    out.emplace_back(name + ext, render(result.case_tables[i], format));
  }
  out.emplace_back("case_averaged" + ext, render(result.averaged, format));
  out.emplace_back("shift_report" + ext, render_shift_report(result.shifts, format));
  out.emplace_back("scatter.csv", render_scatter(result.scatter));
  return out;
}

}  // namespace avgdiff
