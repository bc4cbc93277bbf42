#include "srld/bench/report.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srld::bench {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trace_csv_path(const std::string& out_dir,
                           const std::string& method, std::uint64_t seed) {
  return (std::filesystem::path(out_dir) / "traces" /
          (method + "_" + std::to_string(seed) + ".csv"))
      .string();
}

void write_trace_csv(const Trace& trace, const std::string& path,
                     Eigen::Index keep_every) {
  if (keep_every < 1)
    throw std::invalid_argument("write_trace_csv: keep_every must be >= 1");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_trace_csv: cannot open '" + path + "'");
  const Eigen::Index d = trace.dim();
  out << "iter";
  for (Eigen::Index c = 0; c < d; ++c) out << ",x" << c;
  out << ",phase\n";
  for (Eigen::Index k = 0; k < trace.size(); k += keep_every) {
    out << k;
    const Eigen::VectorXd& s = trace.states[static_cast<std::size_t>(k)];
    for (Eigen::Index c = 0; c < d; ++c) out << ',' << format_double(s[c]);
    out << ',' << (k <= trace.burnin_steps ? "burnin" : "repulsive") << '\n';
  }
  if (!out)
    throw std::runtime_error("write_trace_csv: write failed for '" + path +
                             "'");
}

TraceCsv read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_trace_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_trace_csv: '" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const bool has_iter = !header.empty() && header.front() == "iter";
  const bool has_phase = !header.empty() && header.back() == "phase";
  const Eigen::Index d = static_cast<Eigen::Index>(header.size()) -
                         (has_iter ? 1 : 0) - (has_phase ? 1 : 0);
  if (d < 1)
    throw std::runtime_error("read_trace_csv: '" + path +
                             "' has no coordinate columns");
  TraceCsv result;
  std::vector<Eigen::VectorXd> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<Eigen::Index>(cells.size()) !=
        static_cast<Eigen::Index>(header.size()))
      throw std::runtime_error("read_trace_csv: '" + path + "' line " +
                               std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(cells.size()));
    std::size_t c = 0;
    if (has_iter) result.iters.push_back(std::stoll(cells[c++]));
    Eigen::VectorXd row(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      try {
        row[i] = std::stod(cells[c++]);
      } catch (const std::exception&) {
        throw std::runtime_error("read_trace_csv: '" + path + "' line " +
                                 std::to_string(lineno) +
                                 ": cannot parse number '" + cells[c - 1] +
                                 "'");
      }
    }
    if (has_phase) result.phases.push_back(cells[c]);
    rows.push_back(std::move(row));
  }
  result.states.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    result.states.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return result;
}

void write_reference_csv(const Eigen::MatrixXd& samples,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("write_reference_csv: cannot open '" + path +
                             "'");
  for (Eigen::Index c = 0; c < samples.cols(); ++c)
    out << (c == 0 ? "" : ",") << 'x' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < samples.cols(); ++c)
      out << (c == 0 ? "" : ",") << format_double(samples(r, c));
    out << '\n';
  }
}

json metrics_to_json(const ComparisonResult& result) {
  json j;
  j["target"] = result.target;
  j["methods"] = result.method_names;
  j["seeds"] = result.seeds;
  json per_seed = json::object();
  for (const auto& method : result.methods) {
    json entries = json::array();
    for (const auto& m : method.per_seed) {
      json e;
      e["failed"] = m.failed;
      e["mmd2"] = m.mmd2;
      e["w1"] = m.w1;
      e["ess_mean"] = m.ess_mean;
      e["bandwidth_used"] = m.bandwidth_used;
      e["autocorr"] = m.autocorr;
      entries.push_back(std::move(e));
    }
    per_seed[method.name] = std::move(entries);
  }
  j["per_seed"] = std::move(per_seed);
  json agg;
  agg["medians"] = result.aggregate.medians;
  agg["paired_diffs"] = result.aggregate.paired_diffs;
  agg["sign_test_p"] = result.aggregate.sign_test_p;
  j["aggregate"] = std::move(agg);
  return j;
}

namespace {

double number_or_nan(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

ComparisonResult metrics_from_json(const json& j) {
  ComparisonResult result;
  result.target = j.at("target");
  result.method_names = j.at("methods").get<std::vector<std::string>>();
  result.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& name : result.method_names) {
    MethodResult mr;
    mr.name = name;
    for (const auto& e : j.at("per_seed").at(name)) {
      SeedMetrics m;
      m.failed = e.at("failed").get<bool>();
      m.mmd2 = number_or_nan(e.at("mmd2"));
      m.w1 = number_or_nan(e.at("w1"));
      m.ess_mean = number_or_nan(e.at("ess_mean"));
      m.bandwidth_used = number_or_nan(e.at("bandwidth_used"));
      for (const auto& a : e.at("autocorr"))
        m.autocorr.push_back(number_or_nan(a));
      mr.per_seed.push_back(std::move(m));
    }
    result.methods.push_back(std::move(mr));
  }
  const json& agg = j.at("aggregate");
  result.aggregate.medians =
      agg.at("medians")
          .get<std::map<std::string, std::map<std::string, double>>>();
  result.aggregate.paired_diffs =
      agg.at("paired_diffs").get<std::map<std::string, std::vector<double>>>();
  result.aggregate.sign_test_p =
      agg.at("sign_test_p").get<std::map<std::string, double>>();
  return result;
}

namespace {

// Minimal SVG canvas: polylines, circles and text on a fixed viewport.
class SvgCanvas {
 public:
  SvgCanvas(int width, int height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
          << height << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0) {
    body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
          << "\" y2=\"" << y2 << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << width << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
          << "\" fill=\"" << fill << "\" fill-opacity=\"0.7\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body_ << x << ',' << y << ' ';
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& fill = "black") {
    body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << s
          << "</text>\n";
  }

  void save(const std::string& path) {
    body_ << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw std::runtime_error("svg: cannot open '" + path + "'");
    out << body_.str();
  }

 private:
  int width_, height_;
  std::ostringstream body_;
};

const std::vector<std::string> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                           "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
  double lo = 0.0, hi = 1.0;
  void grow(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
};

// Per-seed values as dots per method plus a median bar.
void metric_scatter_svg(const ComparisonResult& result,
                        const std::string& metric, const std::string& path) {
  const int w = 480, h = 320, ml = 70, mr = 20, mt = 30, mb = 40;
  SvgCanvas svg(w, h);
  auto value_of = [&](const SeedMetrics& m) {
    if (metric == "mmd2") return m.mmd2;
    if (metric == "w1") return m.w1;
    return m.ess_mean;
  };
  Range range;
  range.lo = std::numeric_limits<double>::infinity();
  range.hi = -std::numeric_limits<double>::infinity();
  for (const auto& method : result.methods)
    for (const auto& m : method.per_seed)
      if (!m.failed) range.grow(value_of(m));
  if (!(range.lo < range.hi)) {
    range.lo -= 1.0;
    range.hi += 1.0;
  }
  const double pad = 0.05 * (range.hi - range.lo);
  const double lo = range.lo - pad, hi = range.hi + pad;
  auto ypix = [&](double v) {
    return mt + (h - mt - mb) * (hi - v) / (hi - lo);
  };
  svg.line(ml, mt, ml, h - mb, "black");
  svg.line(ml, h - mb, w - mr, h - mb, "black");
  svg.text(8, mt - 10, metric + " (per seed, bar = median)", 12);
  svg.text(8, ypix(hi) + 4, format_double(hi).substr(0, 8), 10);
  svg.text(8, ypix(lo) + 4, format_double(lo).substr(0, 8), 10);
  const std::size_t nm = result.methods.size();
  for (std::size_t i = 0; i < nm; ++i) {
    const double cx =
        ml + (w - ml - mr) * (static_cast<double>(i) + 0.5) /
                 static_cast<double>(nm);
    const std::string& color = kPalette[i % kPalette.size()];
    std::vector<double> values;
    for (const auto& m : result.methods[i].per_seed)
      if (!m.failed) {
        svg.circle(cx, ypix(value_of(m)), 3.0, color);
        values.push_back(value_of(m));
      }
    if (!values.empty()) {
      const double med = median(std::move(values));
      svg.line(cx - 25, ypix(med), cx + 25, ypix(med), color, 2.5);
    }
    svg.text(cx - 20, h - mb + 16, result.methods[i].name, 11, color);
  }
  svg.save(path);
}

void autocorr_svg(const ComparisonResult& result, const std::string& path) {
  const int w = 480, h = 320, ml = 55, mr = 20, mt = 30, mb = 40;
  SvgCanvas svg(w, h);
  std::size_t max_len = 0;
  double lo = 0.0, hi = 1.0;
  for (const auto& method : result.methods)
    for (const auto& m : method.per_seed)
      if (!m.failed) {
        max_len = std::max(max_len, m.autocorr.size());
        for (double v : m.autocorr) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
  if (max_len < 2) max_len = 2;
  auto xpix = [&](std::size_t lag) {
    return ml + (w - ml - mr) * static_cast<double>(lag) /
                    static_cast<double>(max_len - 1);
  };
  auto ypix = [&](double v) {
    return mt + (h - mt - mb) * (hi - v) / (hi - lo);
  };
  svg.line(ml, mt, ml, h - mb, "black");
  svg.line(ml, ypix(0.0), w - mr, ypix(0.0), "#888888");
  svg.text(8, mt - 10, "autocorrelation vs lag (mean over seeds)", 12);
  svg.text(w - mr - 40, h - mb + 16, "lag " + std::to_string(max_len - 1), 10);
  for (std::size_t i = 0; i < result.methods.size(); ++i) {
    // mean curve across non-failed seeds
    std::vector<double> sum(max_len, 0.0);
    std::vector<int> count(max_len, 0);
    for (const auto& m : result.methods[i].per_seed) {
      if (m.failed) continue;
      for (std::size_t t = 0; t < m.autocorr.size(); ++t) {
        sum[t] += m.autocorr[t];
        count[t] += 1;
      }
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t t = 0; t < max_len; ++t)
      if (count[t] > 0) pts.emplace_back(xpix(t), ypix(sum[t] / count[t]));
    const std::string& color = kPalette[i % kPalette.size()];
    if (!pts.empty()) svg.polyline(pts, color);
    svg.text(ml + 10, mt + 14 + 14 * static_cast<int>(i),
             result.methods[i].name, 11, color);
  }
  svg.save(path);
}

}  // namespace

void emit_reports(const ComparisonResult& result, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir / "plots");
  std::filesystem::create_directories(dir / "traces");
  {
    std::ofstream out(dir / "metrics.json", std::ios::binary);
    if (!out)
      throw std::runtime_error("emit_reports: cannot open '" +
                               (dir / "metrics.json").string() + "'");
    out << metrics_to_json(result).dump(2) << '\n';
  }
  for (const std::string metric : {"mmd2", "w1", "ess_mean"})
    metric_scatter_svg(result, metric,
                       (dir / "plots" / (metric + ".svg")).string());
  autocorr_svg(result, (dir / "plots" / "autocorr.svg").string());
}

}  // namespace srld::bench
