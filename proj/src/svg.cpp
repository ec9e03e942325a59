#include "unigo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "unigo/errors.hpp"

namespace unigo {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 45;

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double px(double x) const {
    return kMarginLeft + (x - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom -
           (y - y0) / (y1 - y0) * (kHeight - kMarginTop - kMarginBottom);
  }
};

void open_svg(std::ofstream& f, const std::string& title) {
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  f << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"15\">"
    << title << "</text>\n";
}

void draw_axes(std::ofstream& f, const Frame& fr, const std::string& xlabel,
               const std::string& ylabel, int xticks, int yticks) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight,
                kHeight - kMarginBottom);
  f << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n",
                kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom);
  f << buf;
  for (int i = 0; i <= xticks; ++i) {
    const double x = fr.x0 + (fr.x1 - fr.x0) * i / xticks;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%g</text>\n",
                  fr.px(x), kHeight - kMarginBottom + 16, x);
    f << buf;
  }
  for (int i = 0; i <= yticks; ++i) {
    const double y = fr.y0 + (fr.y1 - fr.y0) * i / yticks;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  kMarginLeft - 6, fr.py(y) + 4, y);
    f << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                  kMarginLeft, fr.py(y), kWidth - kMarginRight, fr.py(y));
    f << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"12\">%s</text>\n",
                (kMarginLeft + kWidth - kMarginRight) / 2, kHeight - 8, xlabel.c_str());
  f << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"%d\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                "font-size=\"12\" transform=\"rotate(-90 14 %d)\">%s</text>\n",
                (kMarginTop + kHeight - kMarginBottom) / 2,
                (kMarginTop + kHeight - kMarginBottom) / 2, ylabel.c_str());
  f << buf;
}

void polyline(std::ofstream& f, const Frame& fr, const std::vector<double>& xs,
              const std::vector<double>& ys, const std::string& stroke, double opacity) {
  f << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1\" "
    << "stroke-opacity=\"" << opacity << "\" points=\"";
  char buf[48];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.1f,%.1f ", fr.px(xs[i]), fr.py(ys[i]));
    f << buf;
  }
  f << "\"/>\n";
}

}  // namespace

void save_trajectory_svg(const Trajectory& traj, const std::string& path,
                         const std::string& title) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_trajectory_svg: cannot open " + path);
  open_svg(f, title);
  Frame fr{0.0, static_cast<double>(traj.steps), 0.0, 1.0};
  draw_axes(f, fr, "time step", "opinion", 8, 5);
  std::vector<double> xs(traj.steps + 1), ys(traj.steps + 1);
  for (int t = 0; t <= traj.steps; ++t) xs[t] = t;
  const double opacity = traj.n > 100 ? 0.35 : 0.8;
  for (int i = 0; i < traj.n; ++i) {
    for (int t = 0; t <= traj.steps; ++t) ys[t] = traj.at(i, t);
    char color[32];
    std::snprintf(color, sizeof color, "hsl(%d,65%%,42%%)", (i * 47) % 360);
    polyline(f, fr, xs, ys, color, opacity);
  }
  f << "</svg>\n";
  if (!f) throw IoError("save_trajectory_svg: write failed for " + path);
}

void save_history_svg(const std::vector<HistoryRow>& history, const std::string& path,
                      const std::string& title) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("save_history_svg: cannot open " + path);
  if (history.empty()) throw ParamError("save_history_svg: empty history");
  double ymax = 0.0;
  for (const auto& row : history) {
    ymax = std::max(ymax, row.train_loss);
    if (row.val_mse) ymax = std::max(ymax, *row.val_mse);
  }
  if (ymax <= 0.0) ymax = 1.0;
  open_svg(f, title);
  Frame fr{1.0, static_cast<double>(history.back().step), 0.0, ymax * 1.05};
  draw_axes(f, fr, "optimizer step", "loss", 8, 5);

  std::vector<double> xs, ys;
  for (const auto& row : history) {
    xs.push_back(row.step);
    ys.push_back(row.train_loss);
  }
  polyline(f, fr, xs, ys, "hsl(210,70%,45%)", 0.9);
  xs.clear();
  ys.clear();
  for (const auto& row : history)
    if (row.val_mse) {
      xs.push_back(row.step);
      ys.push_back(*row.val_mse);
    }
  if (!xs.empty()) polyline(f, fr, xs, ys, "hsl(10,70%,45%)", 0.9);

  f << "<rect x=\"" << kWidth - 200 << "\" y=\"" << kMarginTop << "\" width=\"12\" "
    << "height=\"12\" fill=\"hsl(210,70%,45%)\"/>\n"
    << "<text x=\"" << kWidth - 182 << "\" y=\"" << kMarginTop + 11
    << "\" font-family=\"sans-serif\" font-size=\"12\">train loss</text>\n";
  if (!xs.empty()) {
    f << "<rect x=\"" << kWidth - 200 << "\" y=\"" << kMarginTop + 18
      << "\" width=\"12\" height=\"12\" fill=\"hsl(10,70%,45%)\"/>\n"
      << "<text x=\"" << kWidth - 182 << "\" y=\"" << kMarginTop + 29
      << "\" font-family=\"sans-serif\" font-size=\"12\">validation MSE</text>\n";
  }
  f << "</svg>\n";
  if (!f) throw IoError("save_history_svg: write failed for " + path);
}

}  // namespace unigo
