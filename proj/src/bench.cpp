#include "pitnet/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pitnet {

namespace {

std::string engine_name(const Engine& e) {
  return e.kind == EngineKind::Exact ? "exact" : "bmps";
}

std::string series_key(const BenchRecord& r) {
  return r.chi ? r.engine + ":" + std::to_string(*r.chi) : r.engine;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchOptions& opt,
                                   const EngineLimits& limits) {
  if (opt.seeds_per_size < 1)
    throw std::invalid_argument("bench: seeds_per_size must be >= 1");
  if (opt.engines.empty())
    throw std::invalid_argument("bench: no engines");
  for (int L : opt.sizes)
    if (L < 1) throw std::invalid_argument("bench: sizes must be >= 1");

  std::vector<int> sizes = opt.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::vector<BenchRecord> records;
  for (int L : sizes) {
    const int depth = (L + 1) / 2;
    for (int s = 0; s < opt.seeds_per_size; ++s) {
      const auto seed = static_cast<std::uint64_t>(s);
      const MineInstance inst = generate_instance(L, depth, seed);
      const size_t n_blocks = excavatable_blocks(inst).size();

      std::vector<BenchRecord> rows;
      for (const Engine& eng : opt.engines) {
        BenchRecord r;
        r.width = L;
        r.depth = depth;
        r.seed = seed;
        r.engine = engine_name(eng);
        if (eng.kind == EngineKind::Bmps) r.chi = eng.chi;
        r.tau = opt.tau;
        try {
          SolverConfig cfg;
          cfg.tau = opt.tau;
          cfg.engine = eng;
          const SolveResult res = solve(inst, cfg, limits);
          r.wall_time_seconds = res.wall_seconds;
          r.profit = res.solution.profit;
          r.violations = res.solution.violations;
          r.max_bond = res.stats.max_bond;
        } catch (const std::exception& e) {
          r.error = sanitize(e.what());
        }
        rows.push_back(std::move(r));
      }

      // reference: exhaustive optimum when feasible, otherwise this sweep's
      // own exact-engine profit
      std::optional<double> reference;
      std::string ref_kind;
      if (n_blocks <= 24) {
        reference = brute_force_oracle(inst).profit;
        ref_kind = "oracle";
      } else {
        for (const BenchRecord& r : rows)
          if (r.engine == "exact" && r.error.empty()) {
            reference = r.profit;
            ref_kind = "exact";
            break;
          }
      }
      for (BenchRecord& r : rows) {
        if (!reference || !r.error.empty()) continue;
        r.reference = ref_kind;
        if (*reference != 0.0)
          r.normalized_profit = r.profit / *reference;
        else if (r.profit == 0.0)
          r.normalized_profit = 1.0;
        if (ref_kind == "oracle")
          r.matched_oracle =
              std::abs(r.profit - *reference) <= 1e-9 && r.violations == 0;
      }
      for (BenchRecord& r : rows) records.push_back(std::move(r));
    }
  }
  return records;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "width,depth,seed,engine,chi,tau,wall_time_seconds,profit,"
         "normalized_profit,violations,matched_oracle,reference,error\n";
  for (const BenchRecord& r : records) {
    out << r.width << ',' << r.depth << ',' << r.seed << ',' << r.engine << ','
        << (r.chi ? std::to_string(*r.chi) : "") << ',' << fmt(r.tau) << ',';
    if (r.error.empty())
      out << fmt(r.wall_time_seconds) << ',' << fmt(r.profit) << ','
          << (r.normalized_profit ? fmt(*r.normalized_profit) : "") << ','
          << r.violations << ','
          << (r.matched_oracle ? (*r.matched_oracle ? "true" : "false") : "")
          << ',' << r.reference << ',';
    else
      out << ",,,,,," << sanitize(r.error);
    out << '\n';
  }
  return out.str();
}

namespace {

struct Series {
  std::string name;
  // x -> values across seeds; plotted point is the mean
  std::map<double, std::vector<double>> ys;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

std::string render_chart(const std::string& title, const std::string& y_label,
                         std::vector<Series> series, bool log_y) {
  const double w = 640, h = 420, ml = 64, mr = 170, mt = 40, mb = 52;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"15\">"
      << xml_escape(title) << "</text>\n";

  struct Pt {
    double x, y;
  };
  std::vector<std::vector<Pt>> pts(series.size());
  std::set<double> xs;
  double ymin = 0, ymax = 0;
  bool any = false;
  for (size_t i = 0; i < series.size(); ++i)
    for (const auto& [x, vals] : series[i].ys) {
      double m = 0;
      for (double v : vals) m += v;
      m /= static_cast<double>(vals.size());
      if (log_y) {
        if (!(m > 0)) continue;
        m = std::log10(m);
      }
      if (!std::isfinite(m)) continue;
      pts[i].push_back({x, m});
      xs.insert(x);
      ymin = any ? std::min(ymin, m) : m;
      ymax = any ? std::max(ymax, m) : m;
      any = true;
    }

  if (!any) {
    out << "<text x=\"" << w / 2 << "\" y=\"" << h / 2
        << "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
    return out.str();
  }

  double xmin = *xs.begin(), xmax = *xs.rbegin();
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.07 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto Y = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\"/>\n";
  out << "</g>\n";

  for (double x : xs) {
    out << "<line x1=\"" << X(x) << "\" y1=\"" << h - mb << "\" x2=\"" << X(x)
        << "\" y2=\"" << h - mb + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << X(x) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 14
      << "\" text-anchor=\"middle\">problem size L (L x ceil(L/2) grid)</text>\n";

  if (log_y) {
    for (int d = static_cast<int>(std::floor(ymin)); d <= static_cast<int>(std::ceil(ymax)); ++d) {
      if (d < ymin || d > ymax) continue;
      out << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(d) << "\" x2=\"" << w - mr
          << "\" y2=\"" << Y(d) << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(d) + 4
          << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double yv = ymin + (ymax - ymin) * k / 4.0;
      out << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << w - mr
          << "\" y2=\"" << Y(yv) << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(yv) + 4
          << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
  }
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!pts[i].empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (const Pt& p : pts[i]) out << X(p.x) << ',' << Y(p.y) << ' ';
      out << "\"/>\n";
      for (const Pt& p : pts[i])
        out << "<circle cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y)
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = mt + 18 * static_cast<double>(i);
    out << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
        << w - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << w - mr + 40 << "\" y=\"" << ly + 4 << "\">"
        << xml_escape(series[i].name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<Series> collect(const std::vector<BenchRecord>& records,
                            double (*value)(const BenchRecord&),
                            bool (*usable)(const BenchRecord&)) {
  std::vector<Series> series;
  std::map<std::string, size_t> index;
  for (const BenchRecord& r : records) {
    const std::string key = series_key(r);
    if (!index.count(key)) {
      index[key] = series.size();
      series.push_back({key, {}});
    }
    if (!r.error.empty() || !usable(r)) continue;
    series[index[key]].ys[static_cast<double>(r.width)].push_back(value(r));
  }
  return series;
}

}  // namespace

std::string bench_svg_time(const std::vector<BenchRecord>& records) {
  return render_chart(
      "wall-clock time", "seconds (log)",
      collect(records, [](const BenchRecord& r) { return r.wall_time_seconds; },
              [](const BenchRecord&) { return true; }),
      true);
}

std::string bench_svg_profit(const std::vector<BenchRecord>& records) {
  return render_chart(
      "profit relative to reference", "profit / reference",
      collect(records, [](const BenchRecord& r) { return *r.normalized_profit; },
              [](const BenchRecord& r) { return r.normalized_profit.has_value(); }),
      false);
}

std::string bench_svg_violations(const std::vector<BenchRecord>& records) {
  return render_chart(
      "slope constraint violations", "violations",
      collect(records,
              [](const BenchRecord& r) { return static_cast<double>(r.violations); },
              [](const BenchRecord&) { return true; }),
      false);
}

void write_bench_outputs(const std::vector<BenchRecord>& records,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::pair<const char*, std::string> files[] = {
      {"bench.csv", bench_csv(records)},
      {"time.svg", bench_svg_time(records)},
      {"profit.svg", bench_svg_profit(records)},
      {"violations.svg", bench_svg_violations(records)},
  };
  for (const auto& [name, text] : files) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p);
    if (!f) throw std::runtime_error("bench: cannot write " + p.string());
    f << text;
  }
}

}  // namespace pitnet
