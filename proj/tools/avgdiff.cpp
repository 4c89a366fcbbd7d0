// avgdiff: benchmark driver for step-averaged numerical differentiation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "avgdiff/bench.hpp"
#include "avgdiff/kernels.hpp"

namespace fs = std::filesystem;
using namespace avgdiff;

namespace {

enum Exit { kOk = 0, kUsage = 1, kMismatch = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw UsageError(flag + ": not a number: '" + s + "'");
  return v;
}

// Shortest decimal that round-trips, so 1e-3 / 10^k lands on the literal 1e-(3+k).
double snap(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::stod(buf);
}

// "start:stop:factor" or a comma list.
std::vector<double> parse_h_grid(const std::string& text) {
  const std::string flag = "--h-grid";
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(flag + ": expected start:stop:factor");
    const double start = to_double(parts[0], flag);
    const double stop = to_double(parts[1], flag);
    const double factor = to_double(parts[2], flag);
    if (!(start > 0) || !(stop > 0) || !(factor > 1) || stop > start)
      throw UsageError(flag + ": need start >= stop > 0 and factor > 1");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
      const double h = snap(start / std::pow(factor, k));
      if (h < stop * (1 - 1e-9)) break;
      grid.push_back(h);
      if (grid.size() > 64) throw UsageError(flag + ": more than 64 steps");
    }
    return grid;
  }
  std::vector<double> grid;
  for (const auto& p : split(text, ',')) grid.push_back(to_double(p, flag));
  return grid;
}

std::vector<int> parse_cases(const std::string& text) {
  std::vector<int> ids;
  for (const auto& p : split(text, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(p, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != p.size()) throw UsageError("--cases: not an integer: '" + p + "'");
    if (id < 1 || id > 19) throw UsageError("--cases: case ids run from 1 to 19, got " + p);
    ids.push_back(id);
  }
  return ids;
}

template <class F>
auto parse_list(const std::string& text, const std::string& flag, F parse_one) {
  std::vector<decltype(parse_one(std::string_view{}))> out;
  for (const auto& p : split(text, ',')) {
    try {
      out.push_back(parse_one(p));
    } catch (const std::invalid_argument& e) {
      throw UsageError(flag + ": " + e.what());
    }
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

QuadratureMode parse_quadrature(const std::string& s) {
  if (s == "paper") return QuadratureMode::PaperVerbatim;
  if (s == "corrected") return QuadratureMode::CorrectedComposite;
  throw UsageError("--quadrature: expected paper or corrected");
}

LdiSignMode parse_sign(const std::string& s) {
  if (s == "paper") return LdiSignMode::PaperVerbatim;
  if (s == "corrected") return LdiSignMode::Corrected;
  throw UsageError("--ldi-sign: expected corrected or paper");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "md" || s == "markdown") return OutputFormat::Markdown;
  throw UsageError("--format: expected csv or md");
}

void apply_isa(const std::string& s) {
  if (s == "auto") return;
  kernels::Isa isa;
  if (s == "scalar") isa = kernels::Isa::Scalar;
  else if (s == "avx2") isa = kernels::Isa::Avx2;
  else throw UsageError("--isa: expected auto, scalar or avx2");
  if (!kernels::select(isa)) throw UsageError("--isa: " + s + " is not available on this machine");
}

// Files go to --out when given, otherwise to stdout in order.
void emit(const std::vector<std::pair<std::string, std::string>>& files, const std::string& out_dir) {
  if (out_dir.empty()) {
    for (const auto& [name, text] : files) {
      if (files.size() > 1) std::cout << "# " << name << "\n";
      std::cout << text;
      if (files.size() > 1) std::cout << "\n";
    }
    return;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  for (const auto& [name, text] : files) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw IoError("cannot write " + p.string());
  }
}

struct Options {
  std::string cases, methods, variants, h_grid;
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  std::string quadrature = "corrected", ldi_sign = "corrected", format = "csv", out, isa = "auto";
  bool paper_scale = false;
  unsigned threads = 0;

  // eval
  std::string fn, method = "afd", variant = "single";
  double x = 0.0, h = 1e-3;

  // aggregate
  std::string fixtures = "data/appendix";
  bool check = false;
};

std::vector<MethodVariant> select_variants(const Options& o) {
  if (o.methods.empty() && o.variants.empty()) return paper_variants();
  const auto methods = o.methods.empty()
                           ? std::vector<MethodId>(kAllMethods.begin(), kAllMethods.end())
                           : parse_list(o.methods, "--methods", parse_method);
  std::vector<MethodVariant> out;
  if (o.variants.empty()) {
    for (const auto& mv : paper_variants())
      if (std::find(methods.begin(), methods.end(), mv.method) != methods.end()) out.push_back(mv);
    return out;
  }
  const auto variants = parse_list(o.variants, "--variants", parse_variant);
  for (MethodId m : methods)
    for (Variant v : variants) out.push_back({m, v});
  return out;
}

RunConfig make_config(const Options& o) {
  RunConfig cfg;
  if (!o.cases.empty()) cfg.case_ids = parse_cases(o.cases);
  cfg.variants = select_variants(o);
  if (!o.h_grid.empty()) cfg.h_grid = parse_h_grid(o.h_grid);
  cfg.n_samples = o.paper_scale ? 1'000'000 : o.samples;
  cfg.seed = o.seed;
  cfg.qmode = parse_quadrature(o.quadrature);
  cfg.smode = parse_sign(o.ldi_sign);
  cfg.format = parse_format(o.format);
  cfg.threads = o.threads;
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_bench(const Options& o) {
  const RunConfig cfg = make_config(o);
  const BenchResult res = run_bench(cfg);
  emit(bench_outputs(res, cfg.format), o.out);
  bool flagged = res.averaged.any_flagged();
  for (const auto& t : res.case_tables) flagged = flagged || t.any_flagged();
  if (flagged) {
    std::cerr << "avgdiff: some cells overflowed or left the function domain (printed as nan)\n";
    return kMismatch;
  }
  return kOk;
}

int cmd_eval(const Options& o) {
  if (o.fn.empty()) throw UsageError("--fn is required");
  FunctionId fn;
  MethodId method;
  Variant variant;
  try {
    fn = parse_function(o.fn);
    method = parse_method(o.method);
    variant = parse_variant(o.variant);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::size_t n = o.paper_scale ? 1'000'000 : o.samples;
  StepStrategy strategy = StepStrategy::single();
  try {
    strategy = strategy_for(variant, n, o.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto qmode = parse_quadrature(o.quadrature);
  const auto smode = parse_sign(o.ldi_sign);
  const FunctionHandle f(fn);
  double truth = 0.0;
  AveragedResult r;
  try {
    truth = d1_exact(fn, o.x);
    r = averaged_derivative(method, f, o.x, o.h, strategy, qmode, smode);
  } catch (const DomainError& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kMismatch;
  } catch (const NonFiniteEstimate& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kMismatch;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Cell err = abs_error(r.mean, truth);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "estimate,truth,abs_error,n,sample_std,predicted_sigma\n"
                "%.17g,%.17g,%.17g,%zu,%.17g,%.17g\n",
                r.mean, truth, err.value, r.n, r.sample_std, r.predicted_sigma);
  std::cout << buf;
  return err.flagged ? kMismatch : kOk;
}

int cmd_validate(const Options&) {
  bool all = true;
  for (const auto& c : validate_case_table()) {
    const auto& row = find_case(c.case_id);
    char buf[256];
    std::snprintf(buf, sizeof buf, "case %2d %-9s x=%-9g |f'|=%-12.6g (table %-8g) |f''|=%-12.6g (table %-8g) %s\n",
                  c.case_id, std::string(name(row.fn)).c_str(), row.x, c.abs_d1, row.abs_d1_published,
                  c.abs_d2, row.abs_d2_published, c.pass() ? "pass" : "FAIL");
    std::cout << buf;
    all = all && c.pass();
  }
  return all ? kOk : kMismatch;
}

int cmd_aggregate(const Options& o) {
  const OutputFormat format = parse_format(o.format);
  std::vector<ErrorTable> tables;
  try {
    tables = read_fixture_dir(o.fixtures);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  if (tables.empty()) throw IoError("no case_*.csv files in " + o.fixtures);
  ErrorTable avg;
  try {
    avg = aggregate_case_average(tables);
  } catch (const InvalidAggregation& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kMismatch;
  }
  const std::string ext = format == OutputFormat::Csv ? ".csv" : ".md";
  emit({{"case_averaged" + ext, render(avg, format)}}, o.out);
  if (!o.check) return kOk;

  std::vector<CellCheck> checks;
  try {
    checks = check_against_published(tables);
  } catch (const InvalidAggregation& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kMismatch;
  }
  int bad = 0;
  for (const auto& c : checks) {
    if (c.interval_ok) continue;
    ++bad;
    std::cerr << "mismatch " << label(avg.rows[c.row]) << " @ " << format_step(avg.cols[c.col])
              << ": published " << format_sci2(c.published) << ", mean " << format_sci2(c.mean) << "\n";
  }
  std::cerr << checks.size() - static_cast<std::size_t>(bad) << " of " << checks.size()
            << " cells consistent with the published table\n";
  return bad ? kMismatch : kOk;
}

int cmd_scatter(const Options& o) {
  const auto pts = scatter_data(case_table());
  emit({{"scatter.csv", render_scatter(pts)}}, o.out);
  return kOk;
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--cases", o.cases, "Comma-separated case ids (default: all 19)");
  app->add_option("--methods", o.methods, "afd,re,ldi (default: all)");
  app->add_option("--variants", o.variants,
                  "single,mc,ed,lds; crossed with --methods (default: the seven published rows)");
  app->add_option("--h-grid", o.h_grid, "start:stop:factor or a comma list (default: 1e-3:1e-8:10)");
  auto* samples = app->add_option("--samples", o.samples, "Steps per averaged estimate")->capture_default_str();
  app->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app->add_option("--quadrature", o.quadrature, "LDI weights: corrected (17-node composite) or paper")
      ->capture_default_str();
  app->add_option("--ldi-sign", o.ldi_sign, "LDI kernel sign: corrected or paper")->capture_default_str();
  app->add_flag("--paper-scale", o.paper_scale, "Use 1e6 samples")->excludes(samples);
}

void add_common_flags(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "csv or md")->capture_default_str();
  app->add_option("--out", o.out, "Output directory (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Step-size averaging for numerical differentiation"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--isa", o.isa, "Kernel ISA: auto, scalar or avx2")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads for bench (0: all cores)")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Run the error-table benchmark");
  add_run_flags(bench, o);
  add_common_flags(bench, o);

  auto* eval = app.add_subcommand("eval", "Estimate one derivative");
  eval->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  eval->add_option("--fn", o.fn, "cos, exp, ln, atan, laguerre7")->required();
  eval->add_option("--x", o.x, "Evaluation point")->required();
  eval->add_option("--method", o.method, "afd, re or ldi")->capture_default_str();
  eval->add_option("--variant", o.variant, "single, mc, ed or lds")->capture_default_str();
  eval->add_option("--h", o.h, "Base step")->capture_default_str();
  auto* esamples = eval->add_option("--samples", o.samples, "Steps for averaged variants")->capture_default_str();
  eval->add_option("--seed", o.seed, "Seed for mc")->capture_default_str();
  eval->add_option("--quadrature", o.quadrature, "corrected or paper")->capture_default_str();
  eval->add_option("--ldi-sign", o.ldi_sign, "corrected or paper")->capture_default_str();
  eval->add_flag("--paper-scale", o.paper_scale, "Use 1e6 samples")->excludes(esamples);

  auto* validate_cmd = app.add_subcommand("validate", "Check the built-in case table");

  auto* aggregate = app.add_subcommand("aggregate", "Average per-case tables from CSV files");
  aggregate->add_option("--fixtures", o.fixtures, "Directory of case_*.csv tables")->capture_default_str();
  aggregate->add_flag("--check", o.check, "Compare with the published case-averaged table");
  add_common_flags(aggregate, o);

  auto* scatter = app.add_subcommand("scatter", "Emit log10 |f'|, log10 |f''| per case");
  scatter->add_option("--out", o.out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    apply_isa(o.isa);
    if (*bench) return cmd_bench(o);
    if (*eval) return cmd_eval(o);
    if (*validate_cmd) return cmd_validate(o);
    if (*aggregate) return cmd_aggregate(o);
    if (*scatter) return cmd_scatter(o);
  } catch (const UsageError& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "avgdiff: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
