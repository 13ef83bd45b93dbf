#include "pcnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "pcnet/errors.hpp"
#include "pcnet/rng.hpp"

namespace pcnet::svg {

namespace {

constexpr const char* kIndexColors[] = {"#d62728", "#1f77b4", "#2ca02c"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

class Canvas {
 public:
  Canvas(double width, double height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
          << height << "\">\n";
    body_ << "<rect width=\"" << width << "\" height=\"" << height
          << "\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double stroke_width = 1.0,
            const std::string& dash = "") {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
          << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << stroke_width << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0, const std::string& stroke = "none") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(std::max(0.0, w)) << "\" height=\"" << fmt(std::max(0.0, h))
          << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity
          << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "black") {
    body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\""
          << fmt(r) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start",
            const std::string& fill = "black") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\""
          << size << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
          << "\" fill=\"" << fill << "\">" << escape(s) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double stroke_width = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << stroke_width << "\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << "," << fmt(y) << " ";
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts,
               const std::string& fill, double opacity) {
    body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << opacity
          << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << "," << fmt(y) << " ";
    body_ << "\"/>\n";
  }

  void save(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << body_.str() << "</svg>\n";
  }

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '&')
        out += "&amp;";
      else if (c == '<')
        out += "&lt;";
      else if (c == '>')
        out += "&gt;";
      else
        out += c;
    }
    return out;
  }

  double width_, height_;
  std::ostringstream body_;
};

// Linear axis mapping data range to pixel range.
struct Scale {
  double d0, d1, p0, p1;
  double operator()(double v) const {
    if (d1 == d0) return (p0 + p1) / 2.0;
    return p0 + (v - d0) / (d1 - d0) * (p1 - p0);
  }
};

}  // namespace

void network_plot(const Network& network, const std::string& path,
                  std::uint64_t seed) {
  const int p = network.p();
  const double size = 520.0, margin = 60.0;
  Canvas canvas(size, size);

  // Fruchterman-Reingold style layout, seeded for reproducibility.
  auto rng = make_rng(seed, RngStream::Layout);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(p)), y(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    x[static_cast<std::size_t>(i)] = unit(rng);
    y[static_cast<std::size_t>(i)] = unit(rng);
  }
  double k = std::sqrt(4.0 / std::max(1, p));
  for (int iter = 0; iter < 300; ++iter) {
    double temp = 0.1 * (1.0 - iter / 300.0);
    std::vector<double> dx(static_cast<std::size_t>(p), 0.0),
        dy(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i == j) continue;
        double ddx = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
        double ddy = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)];
        double dist = std::max(1e-3, std::hypot(ddx, ddy));
        double rep = k * k / dist;
        dx[static_cast<std::size_t>(i)] += ddx / dist * rep;
        dy[static_cast<std::size_t>(i)] += ddy / dist * rep;
        double w = std::abs(network.weights(i, j));
        if (w > 0.0) {
          double att = dist * dist / k * w;
          dx[static_cast<std::size_t>(i)] -= ddx / dist * att;
          dy[static_cast<std::size_t>(i)] -= ddy / dist * att;
        }
      }
    }
    for (int i = 0; i < p; ++i) {
      double len = std::max(1e-9, std::hypot(dx[static_cast<std::size_t>(i)],
                                             dy[static_cast<std::size_t>(i)]));
      double step = std::min(len, temp);
      x[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)] / len * step;
      y[static_cast<std::size_t>(i)] += dy[static_cast<std::size_t>(i)] / len * step;
    }
  }
  double xmin = *std::min_element(x.begin(), x.end());
  double xmax = *std::max_element(x.begin(), x.end());
  double ymin = *std::min_element(y.begin(), y.end());
  double ymax = *std::max_element(y.begin(), y.end());
  Scale sx{xmin, xmax, margin, size - margin};
  Scale sy{ymin, ymax, margin, size - margin};

  double max_w = 1e-12;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      max_w = std::max(max_w, std::abs(network.weights(i, j)));
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      double w = network.weights(i, j);
      if (w == 0.0) continue;
      canvas.line(sx(x[static_cast<std::size_t>(i)]), sy(y[static_cast<std::size_t>(i)]),
                  sx(x[static_cast<std::size_t>(j)]), sy(y[static_cast<std::size_t>(j)]),
                  w > 0 ? "#2ca02c" : "#d62728",
                  0.5 + 3.5 * std::abs(w) / max_w);
    }
  }
  for (int i = 0; i < p; ++i) {
    canvas.circle(sx(x[static_cast<std::size_t>(i)]),
                  sy(y[static_cast<std::size_t>(i)]), 14, "#f0f0f0");
    canvas.text(sx(x[static_cast<std::size_t>(i)]),
                sy(y[static_cast<std::size_t>(i)]) + 4,
                network.node_labels[static_cast<std::size_t>(i)], 10, "middle");
  }
  canvas.save(path);
}

void edge_ci_plot(const std::vector<EdgeCi>& cis, const std::string& path) {
  std::vector<EdgeCi> ordered = cis;
  // Descending reference weight; ties (typically exact zeros) break on the
  // bootstrap mean.
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EdgeCi& a, const EdgeCi& b) {
                     if (a.reference != b.reference)
                       return a.reference > b.reference;
                     return a.boot_mean > b.boot_mean;
                   });
  const double width = 640.0, row_h = std::max(3.0, 420.0 / std::max<std::size_t>(1, ordered.size()));
  const double height = 60.0 + row_h * static_cast<double>(ordered.size());
  const double left = 70.0, right = width - 30.0;

  double lo = 0.0, hi = 0.0;
  for (const auto& ci : ordered) {
    lo = std::min({lo, ci.lower, ci.reference});
    hi = std::max({hi, ci.upper, ci.reference});
  }
  Scale sx{lo, hi == lo ? lo + 1.0 : hi, left, right};
  Canvas canvas(width, height);
  canvas.text(width / 2, 20, "Bootstrapped edge-weight CIs", 13, "middle");
  canvas.line(sx(0.0), 35, sx(0.0), height - 20, "#bbbbbb", 1.0, "4,3");

  std::vector<std::pair<double, double>> ref_pts, mean_pts;
  double ypos = 40.0;
  for (const auto& ci : ordered) {
    canvas.rect(sx(ci.lower), ypos, sx(ci.upper) - sx(ci.lower), row_h * 0.9,
                "#bbbbbb", 0.55);
    ref_pts.emplace_back(sx(ci.reference), ypos + row_h * 0.45);
    mean_pts.emplace_back(sx(ci.boot_mean), ypos + row_h * 0.45);
    ypos += row_h;
  }
  canvas.polyline(mean_pts, "black", 1.0);
  canvas.polyline(ref_pts, "#d62728", 1.5);
  canvas.line(left, height - 20, right, height - 20, "black");
  for (double t : {lo, 0.0, hi}) {
    canvas.line(sx(t), height - 20, sx(t), height - 16, "black");
    canvas.text(sx(t), height - 5, fmt(t), 10, "middle");
  }
  canvas.save(path);
}

void stability_plot(const SubsetBootstrapResult& result,
                    const std::string& path) {
  const double width = 600.0, height = 400.0;
  const double left = 60.0, right = width - 20.0, top = 40.0, bottom = height - 50.0;
  Canvas canvas(width, height);
  canvas.text(width / 2, 20,
              result.node_dropping ? "Node-dropping stability"
                                   : "Case-dropping stability",
              13, "middle");

  // x axis: sampled proportion (1 - drop level), decreasing to the right in
  // the reference figures; keep increasing here and label accordingly.
  double xmin = 1.0, xmax = 0.0;
  for (double q : result.drop_levels) {
    xmin = std::min(xmin, 1.0 - q);
    xmax = std::max(xmax, 1.0 - q);
  }
  Scale sx{xmax, xmin, left, right};  // descending sampled proportion
  Scale sy{-1.0, 1.0, bottom, top};

  canvas.line(left, bottom, right, bottom, "black");
  canvas.line(left, sy(1.0), left, bottom, "black");
  for (double g : {-1.0, -0.5, 0.0, 0.5, 0.7, 1.0}) {
    canvas.line(left, sy(g), right, sy(g), g == 0.7 ? "#888888" : "#dddddd",
                1.0, g == 0.7 ? "4,3" : "");
    canvas.text(left - 5, sy(g) + 4, fmt(g), 10, "end");
  }
  int li = 0;
  for (double q : result.drop_levels) {
    canvas.text(sx(1.0 - q), bottom + 15, fmt(1.0 - q), 9, "middle");
    ++li;
  }
  canvas.text((left + right) / 2, height - 10, "sampled cases (proportion)",
              11, "middle");

  Statistic indices[] = {Statistic::Strength, Statistic::Closeness,
                         Statistic::Betweenness};
  for (int s = 0; s < 3; ++s) {
    std::vector<std::pair<double, double>> mean_line;
    std::vector<std::pair<double, double>> band_hi, band_lo;
    for (std::size_t level = 0; level < result.drop_levels.size(); ++level) {
      std::vector<double> vals;
      for (const auto& rep : result.replicates)
        if (rep.level_index == static_cast<int>(level))
          vals.push_back(rep.value(indices[s]));
      if (vals.empty()) continue;
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      std::sort(vals.begin(), vals.end());
      double xq = sx(1.0 - result.drop_levels[level]);
      mean_line.emplace_back(xq, sy(mean));
      band_hi.emplace_back(xq, sy(quantile_type6_sorted(vals, 0.975)));
      band_lo.emplace_back(xq, sy(quantile_type6_sorted(vals, 0.025)));
    }
    std::vector<std::pair<double, double>> band = band_hi;
    band.insert(band.end(), band_lo.rbegin(), band_lo.rend());
    canvas.polygon(band, kIndexColors[s], 0.15);
    canvas.polyline(mean_line, kIndexColors[s]);
    canvas.text(right - 110, top + 16.0 * s + 4, to_string(indices[s]), 11,
                "start", kIndexColors[s]);
  }
  canvas.save(path);
}

void difference_matrix_plot(const DifferenceMatrix& matrix,
                            const std::string& path) {
  const int k = static_cast<int>(matrix.elements.size());
  const double cell = std::clamp(540.0 / std::max(1, k), 4.0, 28.0);
  const double left = 90.0, top = 90.0;
  const double width = left + cell * k + 30.0, height = top + cell * k + 30.0;
  Canvas canvas(width, height);
  canvas.text(width / 2, 20,
              "Bootstrapped difference tests (" + to_string(matrix.statistic) +
                  ", alpha=" + fmt(matrix.alpha) + ")",
              12, "middle");
  bool show_labels = cell >= 9.0;
  for (int a = 0; a < k; ++a) {
    if (show_labels) {
      canvas.text(left - 4, top + cell * a + cell * 0.7,
                  matrix.labels[static_cast<std::size_t>(a)], 8, "end");
      canvas.text(left + cell * a + cell * 0.5, top - 6,
                  matrix.labels[static_cast<std::size_t>(a)], 8, "middle");
    }
    for (int b = 0; b < k; ++b) {
      std::string fill = "#ffffff";
      if (a == b)
        fill = "#f5f5f5";
      else
        fill = matrix.significance(a, b) == 1 ? "#222222" : "#bbbbbb";
      canvas.rect(left + cell * b, top + cell * a, cell - 0.5, cell - 0.5,
                  fill, 1.0);
    }
  }
  canvas.save(path);
}

void simulation_plot(const SimulationResult& result, const std::string& path) {
  // Collect condition grids.
  std::set<double> rewirings;
  std::set<int> sizes;
  std::set<std::string> metrics;
  std::set<double> alphas;
  for (const auto& agg : result.aggregates) {
    rewirings.insert(agg.rewiring);
    sizes.insert(agg.sample_size);
    metrics.insert(agg.metric);
    alphas.insert(agg.alpha);
  }
  std::vector<double> rw(rewirings.begin(), rewirings.end());
  std::vector<int> ns(sizes.begin(), sizes.end());

  if (result.study == StudyKind::Cs) {
    // Panels: rows = metric, cols = rewiring; boxplots over sample size.
    std::vector<std::string> ms(metrics.begin(), metrics.end());
    const double pw = 170.0, ph = 150.0, left = 60.0, top = 40.0;
    const double width = left + pw * static_cast<double>(rw.size()) + 20.0;
    const double height = top + ph * static_cast<double>(ms.size()) + 30.0;
    Canvas canvas(width, height);
    canvas.text(width / 2, 18, "CS-coefficient by condition", 13, "middle");
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      canvas.text(12, top + ph * mi + ph / 2, ms[mi], 10);
      for (std::size_t ri = 0; ri < rw.size(); ++ri) {
        double x0 = left + pw * ri, y0 = top + ph * mi;
        Scale sy{0.0, 0.8, y0 + ph - 25.0, y0 + 10.0};
        canvas.rect(x0, y0, pw - 12, ph - 18, "none", 1.0, "#cccccc");
        if (mi == 0)
          canvas.text(x0 + (pw - 12) / 2, y0 - 4,
                      "rewiring " + fmt(rw[ri]), 10, "middle");
        double slot = (pw - 12) / static_cast<double>(ns.size());
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
          const SimulationAggregate* agg = nullptr;
          for (const auto& a : result.aggregates)
            if (a.metric == ms[mi] && a.rewiring == rw[ri] &&
                a.sample_size == ns[ni])
              agg = &a;
          if (!agg) continue;
          double cx = x0 + slot * (static_cast<double>(ni) + 0.5);
          double bw = slot * 0.5;
          canvas.line(cx, sy(agg->q025), cx, sy(agg->q975), "black");
          canvas.rect(cx - bw / 2, sy(agg->q75), bw, sy(agg->q25) - sy(agg->q75),
                      "#9ecae1", 1.0, "black");
          canvas.line(cx - bw / 2, sy(agg->median), cx + bw / 2,
                      sy(agg->median), "black", 1.5);
          if (mi + 1 == ms.size())
            canvas.text(cx, y0 + ph - 10, std::to_string(ns[ni]), 8, "middle");
        }
      }
    }
    canvas.save(path);
    return;
  }

  // Rejection-rate line plots: per alpha (edge-diff) or per metric
  // (centrality-diff), panelled by rewiring for the centrality study.
  std::vector<std::string> ms(metrics.begin(), metrics.end());
  std::vector<double> as(alphas.begin(), alphas.end());
  const bool edge_study = result.study == StudyKind::EdgeDiff;
  std::vector<double> panels = edge_study ? std::vector<double>{0.0} : rw;
  const double pw = 230.0, ph = 210.0, left = 60.0, top = 40.0;
  const double width = left + pw * static_cast<double>(panels.size()) + 20.0;
  const double height = top + ph + 60.0;
  Canvas canvas(width, height);
  canvas.text(width / 2, 18,
              edge_study ? "Edge difference-test rejection rate"
                         : "Centrality difference-test rejection rate",
              13, "middle");

  // log-scale y per the reference layout
  auto ylog = [](double v) { return std::log10(std::max(v, 1e-4)); };
  Scale sy{ylog(1e-4), ylog(1.0), top + ph, top + 10.0};
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    double x0 = left + pw * pi;
    Scale sx{0.0, static_cast<double>(ns.size()) - 1.0, x0 + 10.0,
             x0 + pw - 25.0};
    canvas.rect(x0, top, pw - 15, ph + 5, "none", 1.0, "#cccccc");
    if (!edge_study)
      canvas.text(x0 + pw / 2, top - 5, "rewiring " + fmt(panels[pi]), 10,
                  "middle");
    for (double ref : {0.05, 0.01, 0.002}) {
      canvas.line(sx(0.0), sy(ylog(ref)), sx(static_cast<double>(ns.size()) - 1),
                  sy(ylog(ref)), "#888888", 0.8, ref == 0.002 ? "4,3" : "");
      if (pi == 0) canvas.text(x0 - 4, sy(ylog(ref)) + 3, fmt(ref), 8, "end");
    }
    for (std::size_t ni = 0; ni < ns.size(); ++ni)
      canvas.text(sx(static_cast<double>(ni)), top + ph + 20,
                  std::to_string(ns[ni]), 9, "middle");

    int color_idx = 0;
    auto draw_series = [&](const std::string& metric, double alpha,
                           const std::string& label) {
      std::vector<std::pair<double, double>> line, hi, lo;
      for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        for (const auto& agg : result.aggregates) {
          if (agg.metric != metric || agg.sample_size != ns[ni]) continue;
          if (edge_study && agg.alpha != alpha) continue;
          if (!edge_study && agg.rewiring != panels[pi]) continue;
          double x = sx(static_cast<double>(ni));
          line.emplace_back(x, sy(ylog(agg.mean)));
          hi.emplace_back(x, sy(ylog(agg.mean + 1.96 * agg.mc_se)));
          lo.emplace_back(x, sy(ylog(std::max(0.0, agg.mean - 1.96 * agg.mc_se))));
        }
      }
      if (line.empty()) return;
      std::vector<std::pair<double, double>> band = hi;
      band.insert(band.end(), lo.rbegin(), lo.rend());
      const char* color = kIndexColors[color_idx % 3];
      canvas.polygon(band, color, 0.15);
      canvas.polyline(line, color);
      if (pi == 0)
        canvas.text(x0 + 12, top + 14 + 12 * color_idx, label, 9, "start",
                    color);
      ++color_idx;
    };
    if (edge_study) {
      for (double alpha : as)
        if (alpha > 0) draw_series("edge_rejection_rate", alpha, "alpha " + fmt(alpha));
    } else {
      for (const auto& metric : ms) draw_series(metric, 0.0, metric);
    }
  }
  canvas.text((left + width) / 2 - 40, height - 8, "sample size", 11, "middle");
  canvas.save(path);
}

}  // namespace pcnet::svg
