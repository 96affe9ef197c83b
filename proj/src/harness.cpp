#include "infbo/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "infbo/errors.hpp"

namespace infbo {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace

std::string trace_to_csv(const RegretTrace& trace) {
  std::string out = "iter";
  for (int k = 1; k <= trace.dim; ++k) out += ",x" + std::to_string(k);
  out += ",y,r,R_cum,K_n,wall_ms\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.iter);
    for (int k = 0; k < trace.dim; ++k) out += "," + fmt_double(row.x[k]);
    out += "," + fmt_double(row.y);
    out += "," + fmt_double(row.regret);
    out += "," + fmt_double(row.regret_cum);
    out += "," + std::to_string(row.k_n);
    out += "," + fmt_double(row.wall_ms);
    out += "\n";
  }
  return out;
}

RegretTrace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("trace_from_csv: empty input");
  const auto header = split(line, ',');
  if (header.size() < 7 || header.front() != "iter" || header.back() != "wall_ms")
    throw Error("trace_from_csv: unexpected header");
  const int d = static_cast<int>(header.size()) - 6;
  RegretTrace trace;
  trace.dim = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != d + 6)
      throw Error("trace_from_csv: wrong column count");
    TraceRow row;
    row.iter = std::stoi(cells[0]);
    row.x.resize(d);
    for (int k = 0; k < d; ++k) row.x[k] = std::strtod(cells[1 + k].c_str(), nullptr);
    row.y = std::strtod(cells[d + 1].c_str(), nullptr);
    row.regret = std::strtod(cells[d + 2].c_str(), nullptr);
    row.regret_cum = std::strtod(cells[d + 3].c_str(), nullptr);
    row.k_n = std::stoi(cells[d + 4]);
    row.wall_ms = std::strtod(cells[d + 5].c_str(), nullptr);
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

std::string surface_weights_to_csv(const std::vector<Eigen::VectorXd>& weights_per_iter,
                                   int every) {
  if (every < 1) throw InvalidParameter("surface_weights_to_csv: cadence must be >= 1");
  Eigen::Index width = 0;
  for (size_t t = every - 1; t < weights_per_iter.size(); t += every)
    width = std::max(width, weights_per_iter[t].size());
  std::string out = "iter";
  for (Eigen::Index l = 1; l <= width; ++l) out += ",w" + std::to_string(l);
  out += "\n";
  for (size_t t = every - 1; t < weights_per_iter.size();
       t += static_cast<size_t>(every)) {
    out += std::to_string(t + 1);
    const Eigen::VectorXd& w = weights_per_iter[t];
    for (Eigen::Index l = 0; l < width; ++l)
      out += "," + fmt_double(l < w.size() ? w[l] : 0.0);
    out += "\n";
  }
  return out;
}

std::string aggregate_to_csv(const AlgorithmSummary& summary) {
  std::string out = "iter,mean_R_cum,se_R_cum\n";
  for (Eigen::Index i = 0; i < summary.mean_cumulative.size(); ++i) {
    out += std::to_string(i + 1);
    out += "," + fmt_double(summary.mean_cumulative[i]);
    out += "," + fmt_double(summary.se_cumulative[i]);
    out += "\n";
  }
  return out;
}

std::string regret_svg(const std::string& title, const std::vector<SvgCurve>& curves) {
  const int width = 860, height = 520;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  Eigen::Index rows = 0;
  double y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const SvgCurve& c : curves) {
    rows = std::max(rows, c.mean.size());
    for (Eigen::Index i = 0; i < c.mean.size(); ++i) {
      const double lo = c.mean[i] - c.se[i];
      const double hi = c.mean[i] + c.se[i];
      if (first) {
        y_min = lo;
        y_max = hi;
        first = false;
      } else {
        y_min = std::min(y_min, lo);
        y_max = std::max(y_max, hi);
      }
    }
  }
  if (rows < 2) rows = 2;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

  auto sx = [&](double iter) { return ml + plot_w * (iter - 1.0) / (rows - 1.0); };
  auto sy = [&](double v) { return mt + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

  // Axes and ticks.
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
         "\" y2=\"" + num(mt + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + plot_h) + "\" x2=\"" +
         num(ml + plot_w) + "\" y2=\"" + num(mt + plot_h) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fy = y_min + (y_max - y_min) * t / 5.0;
    svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(fy) +
           "</text>\n";
    const double fx = 1.0 + (rows - 1.0) * t / 5.0;
    svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(mt + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(std::round(fx)) + "</text>\n";
  }
  svg += "<text x=\"" + num(ml + plot_w / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration"
         "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(mt + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(mt + plot_h / 2) + ")\">cumulative regret"
         "</text>\n";

  for (size_t c = 0; c < curves.size(); ++c) {
    const SvgCurve& curve = curves[c];
    const char* color = kColors[c % 6];
    // SE band as a closed polygon.
    std::string band = "<polygon fill=\"" + std::string(color) +
                       "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (Eigen::Index i = 0; i < curve.mean.size(); ++i)
      band += num(sx(i + 1.0)) + "," + num(sy(curve.mean[i] + curve.se[i])) + " ";
    for (Eigen::Index i = curve.mean.size() - 1; i >= 0; --i)
      band += num(sx(i + 1.0)) + "," + num(sy(curve.mean[i] - curve.se[i])) + " ";
    band += "\"/>\n";
    svg += band;
    std::string line = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                       "\" stroke-width=\"1.8\" points=\"";
    for (Eigen::Index i = 0; i < curve.mean.size(); ++i)
      line += num(sx(i + 1.0)) + "," + num(sy(curve.mean[i])) + " ";
    line += "\"/>\n";
    svg += line;
    const double ly = mt + 14.0 + 16.0 * c;
    svg += "<line x1=\"" + num(ml + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(ml + 34) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(ml + 40) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + curve.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

namespace {

AlgorithmSummary summarize(const std::string& algorithm,
                           const std::vector<OptimizeResult>& results) {
  AlgorithmSummary summary;
  summary.algorithm = algorithm;
  Eigen::Index rows = 0;
  for (size_t r = 0; r < results.size(); ++r) {
    if (results[r].failed) {
      summary.failed_replications.push_back(static_cast<int>(r));
      summary.failure_messages.push_back(results[r].failure);
      continue;
    }
    rows = std::max(rows, static_cast<Eigen::Index>(results[r].trace.rows.size()));
    summary.final_cumulative.push_back(results[r].trace.final_cumulative());
  }
  summary.mean_cumulative = Eigen::VectorXd::Zero(rows);
  summary.se_cumulative = Eigen::VectorXd::Zero(rows);
  if (rows == 0) return summary;

  std::vector<const RegretTrace*> ok;
  for (const auto& r : results)
    if (!r.failed) ok.push_back(&r.trace);
  const int reps = static_cast<int>(ok.size());
  for (Eigen::Index i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (const RegretTrace* t : ok) sum += t->rows[static_cast<size_t>(i)].regret_cum;
    const double mean = sum / reps;
    double ss = 0.0;
    for (const RegretTrace* t : ok) {
      const double d = t->rows[static_cast<size_t>(i)].regret_cum - mean;
      ss += d * d;
    }
    summary.mean_cumulative[i] = mean;
    summary.se_cumulative[i] =
        reps > 1 ? std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps)) : 0.0;
  }
  return summary;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const Objective objective = make_objective(config.benchmark, config.dimension);
  std::filesystem::create_directories(config.output_dir);

  RunSummary summary;
  std::vector<SvgCurve> curves;
  const RngStream root(config.seed);

  for (const std::string& algo_name : config.algorithms) {
    const Algorithm algo = algorithm_from_name(algo_name);
    const OptimizeConfig oc = config.optimize_config(algo);

    std::vector<OptimizeResult> results(static_cast<size_t>(config.replications));
    std::atomic<int> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = std::min(config.replications,
                                 config.workers > 0 ? config.workers : static_cast<int>(hw));
    auto run_reps = [&]() {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= config.replications) return;
        // Replication streams fork from the root by index only, so every
        // algorithm sees the same seeding designs and noise draws.
        RngStream rep_rng = root.fork("rep").fork(static_cast<std::uint64_t>(rep));
        try {
          results[static_cast<size_t>(rep)] = optimize(objective, oc, rep_rng);
        } catch (const Error& e) {
          results[static_cast<size_t>(rep)].failed = true;
          results[static_cast<size_t>(rep)].failure = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run_reps);
    run_reps();
    for (auto& th : pool) th.join();

    for (int rep = 0; rep < config.replications; ++rep) {
      const OptimizeResult& res = results[static_cast<size_t>(rep)];
      if (res.failed) continue;
      const std::string base = config.output_dir + "/" + config.benchmark + "_" + algo_name +
                               "_rep" + std::to_string(rep);
      write_file(base + ".csv", trace_to_csv(res.trace));
      summary.files_written.push_back(base + ".csv");
      if (algo == Algorithm::kInfGpTs && !res.surface_weights.empty()) {
        write_file(base + "_weights.csv",
                   surface_weights_to_csv(res.surface_weights,
                                          config.weights_checkpoint_every));
        summary.files_written.push_back(base + "_weights.csv");
      }
    }

    AlgorithmSummary algo_summary = summarize(algo_name, results);
    const std::string agg_path =
        config.output_dir + "/" + config.benchmark + "_" + algo_name + "_aggregate.csv";
    write_file(agg_path, aggregate_to_csv(algo_summary));
    summary.files_written.push_back(agg_path);
    curves.push_back(SvgCurve{algo_name, algo_summary.mean_cumulative,
                              algo_summary.se_cumulative});
    summary.algorithms.push_back(std::move(algo_summary));
  }

  const std::string svg_path = config.output_dir + "/" + config.benchmark + "_regret.svg";
  write_file(svg_path, regret_svg(config.benchmark + ": cumulative regret", curves));
  summary.files_written.push_back(svg_path);

  summary.total_wall_seconds = std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - t_start)
                                   .count();
  return summary;
}

namespace {

std::string resolve_output_dir(const std::string& flag_value, const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("INFBO_OUT"); env != nullptr && *env != '\0') return env;
  return config_value;
}

void print_summary(const ExperimentConfig& cfg, const RunSummary& summary) {
  for (const AlgorithmSummary& a : summary.algorithms) {
    const Eigen::Index last = a.mean_cumulative.size() - 1;
    std::printf("%-10s %-9s final mean R_cum %.4f (se %.4f), %d/%d replications ok\n",
                cfg.benchmark.c_str(), a.algorithm.c_str(),
                last >= 0 ? a.mean_cumulative[last] : 0.0,
                last >= 0 ? a.se_cumulative[last] : 0.0,
                static_cast<int>(a.final_cumulative.size()), cfg.replications);
    for (size_t f = 0; f < a.failed_replications.size(); ++f)
      std::printf("  rep %d failed: %s\n", a.failed_replications[f],
                  a.failure_messages[f].c_str());
  }
  std::printf("artifacts in %s (%zu files), wall %.1fs\n", cfg.output_dir.c_str(),
              summary.files_written.size(), summary.total_wall_seconds);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Bayesian-optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_help = "Config file keys (key = value per line, # comments):\n";
  for (const auto& [key, help] : config_key_help())
    config_help += "  " + key + "\n      " + help + "\n";

  // run
  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->footer(config_help);
  std::string run_config;
  std::string run_outdir;
  int run_workers = -1;
  run->add_option("--config", run_config, "path to the experiment config")->required();
  run->add_option("--output-dir", run_outdir, "override the config output directory");
  run->add_option("--workers", run_workers, "override the worker count");

  // bench
  auto* bench = app.add_subcommand("bench", "run the synthetic benchmark grid");
  std::string suite = "synthetic";
  int bench_budget = 100, bench_reps = 10, bench_dim = 2, bench_workers = 0;
  std::uint64_t bench_seed = 12345;
  std::string bench_algorithms = "infgp_ts,gp_ts,gp_ucb,gp_ei";
  std::string bench_outdir;
  bench->add_option("--suite", suite, "benchmark suite (synthetic)");
  bench->add_option("--budget", bench_budget, "iterations per replication");
  bench->add_option("--reps", bench_reps, "replications per benchmark");
  bench->add_option("--seed", bench_seed, "root seed");
  bench->add_option("--dimension", bench_dim, "benchmark dimension");
  bench->add_option("--algorithms", bench_algorithms, "comma list of algorithms");
  bench->add_option("--workers", bench_workers, "parallel replication workers");
  bench->add_option("--output-dir", bench_outdir, "artifact directory (default bench_out)");

  // validate
  auto* validate = app.add_subcommand("validate", "parse and validate a config file");
  std::string validate_config;
  validate->add_option("--config", validate_config, "path to the experiment config")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = load_config_file(run_config);
      cfg.output_dir = resolve_output_dir(run_outdir, cfg.output_dir);
      if (run_workers >= 0) cfg.workers = run_workers;
      cfg.validate();
      const RunSummary summary = run_experiment(cfg);
      print_summary(cfg, summary);
      for (const AlgorithmSummary& a : summary.algorithms)
        if (static_cast<int>(a.final_cumulative.size()) == 0) return 2;
      return 0;
    }
    if (bench->parsed()) {
      if (suite != "synthetic") throw ConfigError("config: unknown suite '" + suite + "'");
      const std::vector<std::string> benchmarks = {"ackley_ht",     "ackley_ns",
                                                   "rosenbrock_ht", "rosenbrock_ns",
                                                   "stybtang_ht",   "stybtang_ns"};
      for (const std::string& bench_name : benchmarks) {
        ExperimentConfig cfg;
        cfg.benchmark = bench_name;
        cfg.dimension = bench_dim;
        cfg.algorithms.clear();
        std::stringstream ss(bench_algorithms);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) cfg.algorithms.push_back(item);
        cfg.budget = bench_budget;
        cfg.replications = bench_reps;
        cfg.seed = bench_seed;
        cfg.workers = bench_workers;
        cfg.output_dir = resolve_output_dir(bench_outdir, "bench_out");
        cfg.validate();
        const RunSummary summary = run_experiment(cfg);
        print_summary(cfg, summary);
      }
      return 0;
    }
    if (validate->parsed()) {
      ExperimentConfig cfg = load_config_file(validate_config);
      cfg.validate();
      std::printf("config ok: %s\n", validate_config.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace infbo
