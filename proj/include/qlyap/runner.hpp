#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "qlyap/config.hpp"
#include "qlyap/growth.hpp"
#include "qlyap/io.hpp"
#include "qlyap/series.hpp"
#include "qlyap/spectral.hpp"

namespace qlyap {

struct RunOptions {
  std::string out_dir = "out";
  int workers = 1;
  bool plot = true;
  unsigned long long seed = 0;  // recorded only; the pipeline is deterministic
  bool quiet = false;
};

struct RunOutcome {
  std::string dir;
  GrowthReport growth;
  double delta_last = 0.0;
  double leakage_final = 0.0;
  double wall_seconds = 0.0;
};

namespace detail {

inline double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

inline std::string sanitize_token(const std::string& s) {
  std::string out;
  for (const char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += c;
    else if (c == '.')
      out += 'p';
    else if (c == '-')
      out += 'm';
    else
      out += '_';
  return out;
}

}  // namespace detail

inline RunOutcome run_one(const RunConfig& cfg, const RunOptions& opt,
                          const std::string& subdir = "") {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir =
      std::filesystem::path(opt.out_dir) / (subdir.empty() ? cfg.name : subdir);
  std::filesystem::create_directories(dir);

  const Lattice lat(cfg.model.cutoff);
  const TraceSeries series = run_series(lat, cfg.model, cfg.rho0, cfg.steps,
                                        cfg.beta0);
  const GrowthReport growth = fit_growth(series, cfg.fit);

  write_text_file(dir / "series.csv", series_csv(series));
  if (opt.plot) {
    std::vector<double> xs, ys;
    for (std::size_t m = 0; m < series.size(); ++m) {
      xs.push_back(static_cast<double>(series.step[m]));
      ys.push_back(series.delta[m]);
    }
    std::vector<double> fit_xs, fit_ys;
    if (growth.points_used >= 2) {
      for (int n = growth.window_lo; n <= growth.window_hi; ++n) {
        const double x = static_cast<double>(n);
        fit_xs.push_back(x);
        fit_ys.push_back(
            growth.verdict == "polynomial"
                ? std::exp(growth.loglog_intercept +
                           growth.degree * std::log(x))
                : std::exp(growth.log_intercept + growth.lambda_per_kick * x));
      }
    }
    write_line_svg(dir / "delta.svg", cfg.name + ": growth of Delta", "kick n",
                   "Delta(n)", xs, ys, fit_xs, fit_ys);
  }

  RunOutcome out;
  out.dir = dir.string();
  out.growth = growth;
  out.delta_last = series.delta.back();
  out.leakage_final = series.leakage.back();
  out.wall_seconds = detail::seconds_since(start);

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kind"] = "run";
  summary["name"] = cfg.name;
  summary["config_hash"] = cfg.hash;
  summary["seed"] = opt.seed;
  summary["config"] = cfg.canonical;
  summary["tau"] = series.tau;
  summary["steps"] = cfg.steps;
  summary["delta_first"] = series.delta.front();
  summary["delta_last"] = out.delta_last;
  summary["leakage_final"] = out.leakage_final;
  summary["growth"] = growth_json(growth);
  summary["outputs"] = {{"series_csv", "series.csv"},
                        {"plot_svg", opt.plot ? json("delta.svg") : json()}};
  summary["wall_time_seconds"] = out.wall_seconds;
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");

  if (!opt.quiet)
    std::printf(
        "%s: %s  lambda/kick=%.6g  lambda/time=%.6g  degree=%.4g  "
        "Delta(N)=%.6g  leakage=%.3g  [%s]\n",
        cfg.name.c_str(), growth.verdict.c_str(), growth.lambda_per_kick,
        growth.lambda_per_time, growth.degree, out.delta_last,
        out.leakage_final, out.dir.c_str());
  return out;
}

// Applies `value` at a dotted path inside a JSON document, preserving an
// integer target's type when the value is integral.
inline void set_json_path(json& doc, const std::string& path, double value) {
  json* node = &doc;
  std::size_t pos = 0;
  std::vector<std::string> parts;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    parts.push_back(path.substr(pos, dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    require(!parts[i].empty(), "empty segment in sweep.parameter");
    node = &(*node)[parts[i]];
  }
  const std::string& leaf = parts.back();
  require(!leaf.empty(), "empty segment in sweep.parameter");
  if (node->contains(leaf) && (*node)[leaf].is_number_integer() &&
      value == std::floor(value))
    (*node)[leaf] = static_cast<long long>(value);
  else
    (*node)[leaf] = value;
}

struct SweepOutcome {
  std::vector<RunOutcome> runs;
  std::string dir;
};

inline SweepOutcome run_sweep(const RunConfig& cfg, const RunOptions& opt) {
  require(cfg.sweep.has_value(), "config has no sweep block");
  const SweepSpec& sw = *cfg.sweep;

  std::vector<RunConfig> variants;
  std::vector<std::string> subdirs;
  for (const double v : sw.values) {
    json doc = cfg.canonical;
    doc.erase("sweep");
    set_json_path(doc, sw.parameter, v);
    const std::string tag = detail::sanitize_token(fmt_double(v));
    doc["name"] = cfg.name + "_" + tag;
    variants.push_back(parse_config(doc));
    subdirs.push_back(cfg.name + "/" + tag);
  }

  SweepOutcome out;
  out.dir = (std::filesystem::path(opt.out_dir) / cfg.name).string();
  out.runs.resize(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());

  RunOptions worker_opt = opt;
  worker_opt.quiet = true;  // results are printed in order afterwards
  const int nworkers = std::max(
      1, std::min<int>(opt.workers, static_cast<int>(variants.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= variants.size()) return;
      try {
        out.runs[i] = run_one(variants[i], worker_opt, subdirs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nworkers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < nworkers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string csv =
      "value,verdict,lambda_per_kick,lambda_per_time,degree,log_r2,loglog_r2,"
      "delta_last,leakage_final\n";
  json runs = json::array();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& r = out.runs[i];
    csv += fmt_double(sw.values[i]) + "," + r.growth.verdict + "," +
           fmt_double(r.growth.lambda_per_kick) + "," +
           fmt_double(r.growth.lambda_per_time) + "," +
           fmt_double(r.growth.degree) + "," + fmt_double(r.growth.log_r2) +
           "," + fmt_double(r.growth.loglog_r2) + "," +
           fmt_double(r.delta_last) + "," + fmt_double(r.leakage_final) + "\n";
    json entry;
    entry["value"] = sw.values[i];
    entry["name"] = variants[i].name;
    entry["config_hash"] = variants[i].hash;
    entry["growth"] = growth_json(r.growth);
    entry["delta_last"] = r.delta_last;
    entry["leakage_final"] = r.leakage_final;
    runs.push_back(entry);
    if (!opt.quiet)
      std::printf("%s = %s: %s  lambda/kick=%.6g  degree=%.4g\n",
                  sw.parameter.c_str(), fmt_double(sw.values[i]).c_str(),
                  r.growth.verdict.c_str(), r.growth.lambda_per_kick,
                  r.growth.degree);
  }
  const std::filesystem::path dir(out.dir);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "sweep_summary.csv", csv);
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kind"] = "sweep";
  summary["name"] = cfg.name;
  summary["config_hash"] = cfg.hash;
  summary["seed"] = opt.seed;
  summary["parameter"] = sw.parameter;
  summary["runs"] = runs;
  write_text_file(dir / "sweep_summary.json", summary.dump(2) + "\n");
  return out;
}

struct SpectrumOutcome {
  std::string dir;
  double defect = 0.0;
  double unitarity_dev = 0.0;
  bool reconstructed = false;
  double recon_max_rel_err = 0.0;
};

inline SpectrumOutcome run_spectrum(const RunConfig& cfg,
                                    const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir =
      std::filesystem::path(opt.out_dir) / cfg.name;
  std::filesystem::create_directories(dir);

  const Lattice lat(cfg.model.cutoff);
  const Mat u = step_matrix(lat, cfg.model, cfg.beta0);
  const SchurSpectrum spec = schur_spectrum(u);

  // Eigenvalues sorted by phase then modulus for a stable presentation.
  std::vector<int> order(lat.dim());
  for (int i = 0; i < lat.dim(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = std::arg(spec.eigenvalues(a));
    const double pb = std::arg(spec.eigenvalues(b));
    if (pa != pb) return pa < pb;
    return std::abs(spec.eigenvalues(a)) < std::abs(spec.eigenvalues(b));
  });
  std::string csv = "index,re,im,modulus,phase\n";
  for (int i = 0; i < lat.dim(); ++i) {
    const cplx ev = spec.eigenvalues(order[i]);
    csv += std::to_string(i) + "," + fmt_double(ev.real()) + "," +
           fmt_double(ev.imag()) + "," + fmt_double(std::abs(ev)) + "," +
           fmt_double(std::arg(ev)) + "\n";
  }
  write_text_file(dir / "eigenvalues.csv", csv);

  const KernelProfile prof =
      kernel_profile(lat, cfg.model, cfg.rho0, cfg.beta0, cfg.spectral.bins);
  std::string pcsv = "bin_lo,bin_hi,mass\n";
  const double width = kPi / cfg.spectral.bins;
  for (int b = 0; b < cfg.spectral.bins; ++b)
    pcsv += fmt_double(b * width) + "," + fmt_double((b + 1) * width) + "," +
            fmt_double(prof.mass[b]) + "\n";
  write_text_file(dir / "kernel_profile.csv", pcsv);
  if (opt.plot)
    write_bars_svg(dir / "kernel_profile.svg",
                   cfg.name + ": kernel mass vs eigenphase distance",
                   "eigenphase distance", "mass fraction", prof.mass);

  SpectrumOutcome out;
  out.dir = dir.string();
  out.defect = spec.defect;
  out.unitarity_dev = unitarity_deviation(spec);

  json recon;
  if (spec.defect < kDefectGate) {
    const SpectralTraceModel model(lat, cfg.model, cfg.rho0, cfg.beta0);
    const TraceSeries direct = run_series(lat, cfg.model, cfg.rho0,
                                          cfg.spectral.compare_steps, cfg.beta0);
    double worst = 0.0;
    for (std::size_t m = 0; m < direct.size(); ++m) {
      const auto rec = model.traces(direct.step[m]);
      for (int o = 0; o < 4; ++o) {
        const double scale = std::max(std::abs(direct.raw[o][m]), 1e-9);
        worst = std::max(worst,
                         std::abs(rec[o] - direct.raw[o][m]) / scale);
      }
    }
    out.reconstructed = true;
    out.recon_max_rel_err = worst;
    recon["performed"] = true;
    recon["compare_steps"] = cfg.spectral.compare_steps;
    recon["max_rel_err"] = worst;
  } else {
    recon["performed"] = false;
    recon["reason"] = "defect gate: operator too far from normal";
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kind"] = "spectrum";
  summary["name"] = cfg.name;
  summary["config_hash"] = cfg.hash;
  summary["seed"] = opt.seed;
  summary["config"] = cfg.canonical;
  summary["defect"] = out.defect;
  summary["unitarity_max_dev"] = out.unitarity_dev;
  summary["kernel_profile"] = {{"bins", cfg.spectral.bins},
                               {"mass", prof.mass},
                               {"nonzero_bins", prof.nonzero_bins}};
  summary["reconstruction"] = recon;
  summary["outputs"] = {
      {"eigenvalues_csv", "eigenvalues.csv"},
      {"kernel_profile_csv", "kernel_profile.csv"},
      {"kernel_profile_svg", opt.plot ? json("kernel_profile.svg") : json()}};
  summary["wall_time_seconds"] = detail::seconds_since(start);
  write_text_file(dir / "spectrum.json", summary.dump(2) + "\n");

  if (!opt.quiet) {
    std::printf("%s: defect=%.3g unitarity_dev=%.3g ", cfg.name.c_str(),
                out.defect, out.unitarity_dev);
    if (out.reconstructed)
      std::printf("reconstruction max_rel_err=%.3g  [%s]\n",
                  out.recon_max_rel_err, out.dir.c_str());
    else
      std::printf("reconstruction refused (defect gate)  [%s]\n",
                  out.dir.c_str());
  }
  return out;
}

// Fast structural checks for a config: parseability is already established;
// this exercises one step of dynamics and the t = 0 identities.
inline int run_check(const std::vector<std::string>& paths,
                     const RunOptions& opt) {
  int failures = 0;
  auto report = [&](const std::string& cfg, const std::string& what, bool ok,
                    const std::string& detail) {
    if (!ok) ++failures;
    if (!opt.quiet || !ok)
      std::printf("[%s] %s: %s%s%s\n", ok ? "PASS" : "FAIL", cfg.c_str(),
                  what.c_str(), detail.empty() ? "" : " - ", detail.c_str());
  };
  for (const auto& path : paths) {
    RunConfig cfg;
    try {
      cfg = load_config(path);
    } catch (const std::exception& e) {
      report(path, "parse", false, e.what());
      continue;
    }
    report(cfg.name, "parse", true, "hash " + cfg.hash);
    try {
      const Lattice lat(cfg.model.cutoff);
      TraceEvaluator ev(lat, cfg.model, cfg.rho0, cfg.beta0);
      const auto t0 = ev.traces();
      if (cfg.rho0.uses_v2()) {
        double err = 0.0;
        err = std::max(err, std::abs(t0[2] - cplx(-2.0 * cfg.rho0.v2(0))));
        err = std::max(err, std::abs(t0[3] - cplx(-2.0 * cfg.rho0.v2(1))));
        report(cfg.name, "t0 momentum identity Tr[rho p] = -2 v2", err < 1e-8,
               "err " + fmt_double(err));
      }
      ev.step();
      const double leak = ev.leakage();
      const bool leak_ok = cfg.model.type == ModelType::kCatMap
                               ? (leak >= 0.0 && leak <= 1.0)
                               : leak == 0.0;
      report(cfg.name, "one-step leakage sane", leak_ok,
             "leakage " + fmt_double(leak));
      const TraceSeries s =
          run_series(lat, cfg.model, cfg.rho0, 1, cfg.beta0);
      report(cfg.name, "t0 normalization Delta(0)", s.delta[0] > 0.0,
             "Delta(0) " + fmt_double(s.delta[0]));
    } catch (const std::exception& e) {
      report(cfg.name, "dynamics", false, e.what());
    }
  }
  return failures;
}

}  // namespace qlyap
