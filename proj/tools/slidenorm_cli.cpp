// slidenorm: stream generation and estimator runs with CSV output.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "slidenorm/errors.hpp"
#include "slidenorm/gfunction.hpp"
#include "slidenorm/orlicz.hpp"
#include "slidenorm/sliding_hh.hpp"
#include "slidenorm/stream_io.hpp"
#include "slidenorm/streamlab.hpp"
#include "slidenorm/symnorm.hpp"

namespace sn = slidenorm;
using sn::cli::RunConfig;

namespace {

constexpr int kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitCapacity = 3, kExitNumeric = 4;

const char* kCsvVersion = "# slidenorm run csv v1";
const char* kCsvColumns = "algo,norm,m,n,W,eps,seed,estimate,exact,rel_error,space_entries,nonconforming";

struct CsvRow {
  std::string algo, norm;
  uint64_t m = 0, n = 0, W = 0;
  double eps = 0.0;
  uint64_t seed = 0;
  double estimate = 0.0, exact = 0.0;
  size_t space = 0;
  bool nonconforming = false;
};

std::string format_rows(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << kCsvVersion << "\n" << kCsvColumns << "\n";
  for (const auto& r : rows) {
    os << r.algo << "," << r.norm << "," << r.m << "," << r.n << "," << r.W << "," << r.eps << "," << r.seed << ","
       << r.estimate << "," << r.exact << "," << sn::relative_error(r.estimate, r.exact) << "," << r.space << ","
       << (r.nonconforming ? 1 : 0) << "\n";
  }
  return os.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw sn::IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw sn::IoError("write failed for '" + path + "'");
}

void cmd_gen(const RunConfig& c) {
  if (c.variant == "gaussian") {
    sn::RowFile f;
    f.d = c.d;
    f.response = c.response;
    f.rows = sn::gen_gaussian_rows(c.m, c.d, c.seed, c.response);
    if (c.out.empty()) throw sn::ParameterError("gen gaussian needs --out");
    sn::write_rows(c.out, f);
    return;
  }
  sn::SyntheticSpec spec;
  spec.m = c.m;
  spec.n = c.n;
  spec.seed = c.seed;
  spec.variant = sn::variant_from_string(c.variant);
  spec.zipf_s = c.s;
  sn::StreamFile s{c.n, c.m, c.seed, sn::generate(spec)};
  emit(c.out, sn::format_stream(s));
}

uint64_t effective_window(uint64_t W, uint64_t len) { return W == 0 || W > len ? len : W; }

void run_hh(const RunConfig& c) {
  if (c.in.empty()) throw sn::ParameterError("run hh needs --in");
  sn::StreamFile s = sn::read_stream(c.in);
  if (s.items.empty()) throw sn::InputError(c.in + ": stream has no updates");
  const uint64_t W = effective_window(c.W, s.items.size());
  auto exact = sn::window_frequencies(s.items, W);
  std::vector<std::vector<CsvRow>> per(c.reps);
  std::vector<std::string> diag(c.reps);
  sn::HHConfig hc;
  hc.window = W;
  hc.eta = c.eta;
  hc.nu = c.nu;
  hc.universe = s.n;
  hc.validate();
  const long reps = static_cast<long>(c.reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (long r = 0; r < reps; ++r) {
    uint64_t seed = c.seed + static_cast<uint64_t>(r);
    sn::SlidingHeavyHitters hh(hc, seed);
    for (uint64_t x : s.items) hh.update(x);
    auto d = hh.diagnostics();
    for (const auto& h : hh.report()) {
      auto it = exact.find(h.item);
      double f = it == exact.end() ? 0.0 : static_cast<double>(it->second);
      per[static_cast<size_t>(r)].push_back({"sliding_hh", "freq:" + std::to_string(h.item), s.items.size(), s.n, W,
                                             c.nu, seed, h.f_hat, f, d.space_entries(), hc.nonconforming()});
    }
    diag[static_cast<size_t>(r)] = "seed=" + std::to_string(seed) + "\n" + d.to_kv();
  }
  std::vector<CsvRow> rows;
  for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
  emit(c.out, format_rows(rows));
  if (!c.diag.empty()) {
    std::string all;
    for (const auto& d : diag) all += d;
    emit(c.diag, all);
  }
}

void run_norm(const RunConfig& c) {
  if (c.in.empty()) throw sn::ParameterError("run norm needs --in");
  sn::StreamFile s = sn::read_stream(c.in);
  if (s.items.empty()) throw sn::InputError(c.in + ": stream has no updates");
  const uint64_t W = effective_window(c.W, s.items.size());
  auto reg = sn::NormRegistry::with_defaults();
  auto norm = reg.create(c.norm, sn::NormParams{c.p, c.k});
  const double exact = norm->evaluate_values(sn::window_frequency_values(s.items, W));
  sn::PracticalOverrides ov;
  if (c.R > 0) ov.R = c.R;
  const sn::Mode mode = sn::mode_from_string(c.mode);
  auto params = sn::param_select(c.eps, std::max(1.0, norm->mmc_bound(s.n)), s.n, mode, ov);
  std::cerr << params.to_kv();
  sn::GridOptions go;
  go.window = W;
  std::vector<std::vector<CsvRow>> per(c.reps);
  const long reps = static_cast<long>(c.reps);
  const std::string label = norm->name();
  // Each repetition owns its grid; the grid itself runs cells serially here.
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
  for (long r = 0; r < reps; ++r) {
    try {
      uint64_t seed = c.seed + static_cast<uint64_t>(r);
      sn::LayerGrid g(params, go, seed);
      g.update_batch(s.items);
      double est = sn::symnorm_estimate(g, W, *norm);
      auto& out = per[static_cast<size_t>(r)];
      out.push_back({"symnorm", label, s.items.size(), s.n, W, c.eps, seed, est, exact, g.space_entries(),
                     params.nonconforming});
      for (double rate : c.rates) {
        auto bs = sn::baseline_uniform(s.items, rate, sn::BaselineMode::Stream, W, *norm, seed);
        auto bu = sn::baseline_uniform(s.items, rate, sn::BaselineMode::Universe, W, *norm, seed);
        std::ostringstream rs;
        rs << rate;
        out.push_back({"stream_sampling@" + rs.str(), label, s.items.size(), s.n, W, c.eps, seed, bs.estimate, exact,
                       0, false});
        out.push_back({std::string("universe_sampling@") + rs.str() + (bu.unscaled ? ":unscaled" : ""), label,
                       s.items.size(), s.n, W, c.eps, seed, bu.estimate, exact, 0, false});
      }
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  std::vector<CsvRow> rows;
  for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
  emit(c.out, format_rows(rows));
}

void run_orlicz(const RunConfig& c) {
  if (c.in.empty()) throw sn::ParameterError("run orlicz needs --in");
  sn::RowFile f = sn::read_rows(c.in);
  if (f.rows.empty()) throw sn::InputError(c.in + ": no rows");
  const sn::GFunction g = sn::g_by_name(c.g);
  const uint64_t nrows = f.rows.size();
  const uint64_t W = effective_window(c.W, nrows);
  const bool windowed = W < nrows;
  std::vector<Eigen::VectorXd> window(f.rows.end() - static_cast<std::ptrdiff_t>(W), f.rows.end());
  const size_t width = static_cast<size_t>(f.rows.front().size());
  std::vector<CsvRow> rows;
  for (uint64_t r = 0; r < c.reps; ++r) {
    uint64_t seed = c.seed + r;
    std::vector<sn::CoresetRow> cs =
        windowed ? sn::window_coreset(f.rows, W, c.eps, 1.0, c.C, seed) : sn::stream_sample(f.rows, c.eps, 1.0, c.C, seed);
    std::mt19937_64 gen(sn::derive_seed(seed, 17));
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> dirs(1000, Eigen::VectorXd(static_cast<Eigen::Index>(width)));
    for (auto& x : dirs)
      for (auto& v : x) v = nd(gen);
    auto ratios = sn::embedding_ratios(cs, window, dirs, g);
    double worst = 1.0;
    for (double q : ratios)
      if (std::fabs(q - 1.0) > std::fabs(worst - 1.0)) worst = q;
    std::cerr << "seed=" << seed << " sampled_rows=" << cs.size() << " window_rows=" << W << "\n";
    rows.push_back({windowed ? "orlicz_window" : "orlicz_stream", "g:" + g.name, nrows, width, W, c.eps, seed, worst,
                    1.0, cs.size(), false});
    if (!c.coreset.empty() && r + 1 == c.reps) sn::write_coreset_csv(c.coreset, cs);
  }
  emit(c.out, format_rows(rows));
}

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--seed", c.seed, "Master seed (default: $SLIDENORM_SEED or 1)");
  app->add_option("--out", c.out, "Output path, '-' or empty for stdout");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  c.seed = sn::cli::default_seed(1);
  CLI::App app{"slidenorm: sliding-window heavy hitters, symmetric norms and Orlicz coresets"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Load a RunConfig JSON file; flags given afterwards override it")
      ->check(CLI::ExistingFile);
  bool dump_config = false;
  app.add_flag("--print-config", dump_config, "Print the resolved RunConfig as JSON and continue");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic stream or row file");
  gen->add_option("--variant", c.variant, "appendix-c | zipf | uniform | gaussian")->capture_default_str();
  gen->add_option("--m", c.m, "Stream length (rows for gaussian)")->capture_default_str();
  gen->add_option("--n", c.n, "Universe size")->capture_default_str();
  gen->add_option("--d", c.d, "Row width for gaussian")->capture_default_str();
  gen->add_flag("--response", c.response, "Append a regression response column (gaussian)");
  gen->add_option("--s", c.s, "Zipf exponent")->capture_default_str();
  add_common(gen, c);

  auto* run = app.add_subcommand("run", "Run an estimator over a stream file and write CSV");
  run->require_subcommand(1);
  auto* hh = run->add_subcommand("hh", "Sliding-window heavy hitters");
  auto* norm = run->add_subcommand("norm", "Symmetric-norm estimate plus sampling baselines");
  auto* orl = run->add_subcommand("orlicz", "Orlicz coreset and embedding check over a row file");
  for (auto* sc : {hh, norm, orl}) {
    sc->add_option("--in", c.in, "Input stream or row file")->required();
    sc->add_option("--W", c.W, "Window length, 0 = whole stream")->capture_default_str();
    sc->add_option("--eps", c.eps, "Accuracy")->capture_default_str();
    sc->add_option("--reps", c.reps, "Repetitions (seeds seed..seed+reps-1)")->capture_default_str();
    add_common(sc, c);
  }
  hh->add_option("--eta", c.eta, "Heaviness")->capture_default_str();
  hh->add_option("--nu", c.nu, "Frequency accuracy")->capture_default_str();
  hh->add_option("--diag", c.diag, "Write key=value diagnostics here");
  norm->add_option("--norm", c.norm, "lp | topk | ksupport")->capture_default_str();
  norm->add_option("--p", c.p, "L_p exponent")->capture_default_str();
  norm->add_option("--k", c.k, "k for top-k / k-support")->capture_default_str();
  norm->add_option("--mode", c.mode, "provable | practical")->capture_default_str();
  norm->add_option("--R", c.R, "Practical repetition count (0 = default clip)")->capture_default_str();
  norm->add_option("--rate", c.rates, "Baseline sampling rates")->delimiter(',')->capture_default_str();
  orl->add_option("--g", c.g, "square | identity | huber")->capture_default_str();
  orl->add_option("--C", c.C, "Oversampling constant")->capture_default_str();
  orl->add_option("--coreset", c.coreset, "Dump the last repetition's coreset as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw sn::IoError("cannot open '" + config_path + "'");
      nlohmann::json j;
      try {
        is >> j;
      } catch (const nlohmann::json::exception& e) {
        throw sn::ParameterError(config_path + ": " + e.what());
      }
      RunConfig base = sn::cli::from_json(j);
      // flags on the command line win over the file
      CLI::App* leaf = gen->parsed() ? gen : (hh->parsed() ? hh : (norm->parsed() ? norm : orl));
      nlohmann::json merged = sn::cli::to_json(base);
      nlohmann::json cur = sn::cli::to_json(c);
      for (auto* opt : leaf->get_options()) {
        if (opt->count() == 0) continue;
        std::string key = opt->get_name();
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key == "rate") key = "rates";
        if (cur.contains(key)) merged[key] = cur[key];
      }
      c = sn::cli::from_json(merged);
    }
    if (gen->parsed()) {
      c.subcommand = "gen";
    } else {
      c.subcommand = "run";
      c.target = hh->parsed() ? "hh" : (norm->parsed() ? "norm" : "orlicz");
    }
    c.validate();
    if (dump_config) std::cerr << sn::cli::to_json(c).dump(2) << "\n";
    if (c.subcommand == "gen") {
      cmd_gen(c);
    } else if (c.target == "hh") {
      run_hh(c);
    } else if (c.target == "norm") {
      run_norm(c);
    } else {
      run_orlicz(c);
    }
  } catch (const sn::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const sn::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const sn::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {  // ParameterError, InputError
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {  // RangeError
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
