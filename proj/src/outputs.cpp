#include "bipolar_formation/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/ppc.hpp"
#include "bipolar_formation/scenario_io.hpp"

namespace bform {

using nlohmann::json;

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

const char* color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

// Keeps SVG files small: at most about this many vertices per polyline.
constexpr std::size_t kMaxPolylinePoints = 1500;

std::size_t stride_for(std::size_t rows) {
  return std::max<std::size_t>(1, rows / kMaxPolylinePoints);
}

std::string svg_num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = -1.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

struct Panel {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
  Range xr, yr;

  double px(double v) const { return x + (v - xr.lo) / (xr.hi - xr.lo) * w; }
  double py(double v) const { return y + h - (v - yr.lo) / (yr.hi - yr.lo) * h; }
};

void axes(std::ostream& os, const Panel& p, const std::string& title, const std::string& xlabel) {
  os << "<rect x=\"" << svg_num(p.x) << "\" y=\"" << svg_num(p.y) << "\" width=\""
     << svg_num(p.w) << "\" height=\"" << svg_num(p.h)
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = p.xr.lo + (p.xr.hi - p.xr.lo) * i / 4.0;
    const double yv = p.yr.lo + (p.yr.hi - p.yr.lo) * i / 4.0;
    os << "<text x=\"" << svg_num(p.px(xv)) << "\" y=\"" << svg_num(p.y + p.h + 14)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    os << "<text x=\"" << svg_num(p.x - 4) << "\" y=\"" << svg_num(p.py(yv) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << svg_num(p.x + p.w / 2) << "\" y=\"" << svg_num(p.y - 6)
     << "\" font-size=\"12\" text-anchor=\"middle\">" << title << "</text>\n";
  if (!xlabel.empty()) {
    os << "<text x=\"" << svg_num(p.x + p.w / 2) << "\" y=\"" << svg_num(p.y + p.h + 28)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  }
}

template <typename Fx, typename Fy>
void polyline(std::ostream& os, const Panel& p, std::size_t rows, Fx fx, Fy fy, const char* stroke,
              bool dashed) {
  if (rows == 0) return;
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\"";
  if (dashed) os << " stroke-dasharray=\"5,3\"";
  os << " points=\"";
  const std::size_t stride = stride_for(rows);
  for (std::size_t r = 0; r < rows; r += stride) {
    os << svg_num(p.px(fx(r))) << ',' << svg_num(p.py(fy(r))) << ' ';
  }
  os << svg_num(p.px(fx(rows - 1))) << ',' << svg_num(p.py(fy(rows - 1)));
  os << "\"/>\n";
}

std::string header(double width, double height) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width) << "\" height=\""
     << svg_num(height) << "\" viewBox=\"0 0 " << svg_num(width) << ' ' << svg_num(height)
     << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

std::size_t channel_index(const TrajectoryLog& log, const std::string& name) {
  for (std::size_t c = 0; c < log.channels.size(); ++c) {
    if (log.channels[c].name == name) return c;
  }
  throw FormationError(ErrorCode::kInvalidArgument, "no channel named " + name);
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw FormationError(ErrorCode::kIo, "cannot write " + path.string());
  out << body;
  if (!out) throw FormationError(ErrorCode::kIo, "write failed for " + path.string());
}

json failure_to_json(const RunFailure& f) {
  return {{"code", to_string(f.code)},
          {"message", f.message},
          {"channel", f.channel},
          {"agent", f.agent},
          {"t", f.t}};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t";
  for (int a = 1; a <= log.agents; ++a) out << ",x" << a << ",y" << a;
  for (int a = 1; a <= log.agents; ++a) out << ",ux" << a << ",uy" << a;
  for (const auto& e : log.edges) out << ",d_" << e.from << '_' << e.to;
  for (AgentId k : log.followers) out << ",alpha_" << k;
  out << "\r\n";
  for (const auto& row : log.rows) {
    out << format_number(row.t);
    for (const auto& p : row.positions) out << ',' << format_number(p.x) << ',' << format_number(p.y);
    for (const auto& u : row.commands) out << ',' << format_number(u.x) << ',' << format_number(u.y);
    for (double d : row.edge_distances) out << ',' << format_number(d);
    for (double a : row.edge_angles) out << ',' << format_number(a);
    out << "\r\n";
  }
}

void write_errors_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t";
  for (const auto& c : log.channels) {
    out << ",e_" << c.name << ",rho_" << c.name << ",lower_" << c.name << ",upper_" << c.name
        << ",sigma_" << c.name;
  }
  out << "\r\n";
  for (const auto& row : log.rows) {
    out << format_number(row.t);
    for (std::size_t c = 0; c < log.channels.size(); ++c) {
      const auto& st = row.channels[c];
      const auto& ch = log.channels[c].channel;
      out << ',' << format_number(st.e) << ',' << format_number(st.rho) << ','
          << format_number(-ch.b_lower * st.rho) << ',' << format_number(ch.b_upper * st.rho)
          << ',' << format_number(st.sigma);
    }
    out << "\r\n";
  }
}

json summary_to_json(const RunSummary& s, const ScenarioConfig& config) {
  json channels = json::array();
  for (const auto& c : s.channels) {
    channels.push_back({{"name", c.name},
                        {"agent", c.agent},
                        {"b_lower", c.b_lower},
                        {"b_upper", c.b_upper},
                        {"l", c.l},
                        {"rho_inf", c.rho_inf},
                        {"default_bounds", c.default_bounds},
                        {"max_abs_e_tilde", c.max_abs_e_tilde},
                        {"max_normalized_e_tilde", c.max_normalized_e_tilde},
                        {"steady_state_max_abs_e", c.steady_state_max_abs_e},
                        {"steady_state_band_occupancy", c.steady_state_band_occupancy}});
  }
  json doc;
  doc["scenario"] = s.scenario;
  doc["seed"] = s.seed;
  doc["integrator"] = s.integrator;
  doc["horizon"] = s.horizon;
  doc["dt"] = s.dt;
  doc["rows"] = s.rows;
  doc["completed"] = s.completed;
  doc["bound_violation"] = s.bound_violation;
  doc["failure"] = s.failure ? failure_to_json(*s.failure) : json(nullptr);
  doc["min_neighbor_distance"] = s.min_neighbor_distance;
  doc["wall_clock_seconds"] = s.wall_clock_seconds;
  doc["channels"] = channels;
  doc["config"] = scenario_to_json(config);
  return doc;
}

std::string trajectory_svg(const TrajectoryLog& log, const std::vector<double>& snapshot_times) {
  const double width = 900.0;
  const double margin = 50.0;
  Range xr, yr;
  for (const auto& row : log.rows) {
    for (const auto& p : row.positions) {
      xr.add(p.x);
      yr.add(p.y);
    }
  }
  xr.settle();
  yr.settle();
  // Equal scale on both axes.
  const double span_x = xr.hi - xr.lo;
  const double span_y = yr.hi - yr.lo;
  const double plot_w = width - 2 * margin;
  const double plot_h = std::clamp(plot_w * span_y / span_x, 200.0, 1400.0);
  const double scale = std::min(plot_w / span_x, plot_h / span_y);
  Panel p{margin, margin, span_x * scale, span_y * scale, xr, yr};

  std::ostringstream os;
  os << header(width, p.h + 2 * margin);
  axes(os, p, "agent paths and formation snapshots", "x");
  const std::size_t rows = log.rows.size();
  for (int a = 0; a < log.agents; ++a) {
    const auto ai = static_cast<std::size_t>(a);
    polyline(os, p, rows, [&](std::size_t r) { return log.rows[r].positions[ai].x; },
             [&](std::size_t r) { return log.rows[r].positions[ai].y; }, color(ai), false);
  }
  for (double t : snapshot_times) {
    if (rows == 0 || t < log.rows.front().t || t > log.rows.back().t + 1e-9) continue;
    const auto it = std::lower_bound(log.rows.begin(), log.rows.end(), t - 1e-9,
                                     [](const LogRow& row, double v) { return row.t < v; });
    const LogRow& row = it == log.rows.end() ? log.rows.back() : *it;
    for (const auto& e : log.edges) {
      const Vec2& a = row.positions[e.from - 1];
      const Vec2& b = row.positions[e.to - 1];
      os << "<line x1=\"" << svg_num(p.px(a.x)) << "\" y1=\"" << svg_num(p.py(a.y)) << "\" x2=\""
         << svg_num(p.px(b.x)) << "\" y2=\"" << svg_num(p.py(b.y))
         << "\" stroke=\"#333\" stroke-width=\"0.8\"/>\n";
    }
    for (std::size_t a = 0; a < row.positions.size(); ++a) {
      os << "<circle cx=\"" << svg_num(p.px(row.positions[a].x)) << "\" cy=\""
         << svg_num(p.py(row.positions[a].y)) << "\" r=\"3\" fill=\"" << color(a) << "\"/>\n";
    }
    os << "<text x=\"" << svg_num(p.px(row.positions[0].x)) << "\" y=\""
       << svg_num(p.py(row.positions[0].y) - 8) << "\" font-size=\"10\">t=" << tick_label(row.t)
       << "</text>\n";
  }
  for (int a = 0; a < log.agents; ++a) {
    os << "<text x=\"" << svg_num(margin + 10 + 40 * a) << "\" y=\"" << svg_num(margin + 14)
       << "\" font-size=\"11\" fill=\"" << color(static_cast<std::size_t>(a)) << "\">agent "
       << a + 1 << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string channel_plot_svg(const TrajectoryLog& log, const std::vector<std::string>& channels,
                             const std::string& title) {
  const double panel_w = 380.0;
  const double panel_h = 200.0;
  const double gap_x = 80.0;
  const double gap_y = 70.0;
  const std::size_t cols = channels.size() > 1 ? 2 : 1;
  const std::size_t grid_rows = std::max<std::size_t>(1, (channels.size() + cols - 1) / cols);
  const double width = gap_x + cols * (panel_w + gap_x);
  const double height = 40.0 + grid_rows * (panel_h + gap_y);
  std::ostringstream os;
  os << header(width, height);
  os << "<text x=\"" << svg_num(width / 2) << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
     << title << "</text>\n";
  if (channels.empty()) {
    os << "<text x=\"" << svg_num(width / 2) << "\" y=\"" << svg_num(height / 2)
       << "\" font-size=\"12\" text-anchor=\"middle\">no channels of this kind</text>\n";
  }
  const std::size_t rows = log.rows.size();
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::size_t c = channel_index(log, channels[i]);
    const auto& ch = log.channels[c].channel;
    Panel p;
    p.x = gap_x + static_cast<double>(i % cols) * (panel_w + gap_x);
    p.y = 50.0 + static_cast<double>(i / cols) * (panel_h + gap_y);
    p.w = panel_w;
    p.h = panel_h;
    for (const auto& row : log.rows) {
      p.xr.add(row.t);
      p.yr.add(row.channels[c].e);
      p.yr.add(-ch.b_lower * row.channels[c].rho);
      p.yr.add(ch.b_upper * row.channels[c].rho);
    }
    p.xr.settle();
    p.yr.settle();
    axes(os, p, "e_" + channels[i], "t [s]");
    const auto t_of = [&](std::size_t r) { return log.rows[r].t; };
    polyline(os, p, rows, t_of,
             [&](std::size_t r) { return -ch.b_lower * log.rows[r].channels[c].rho; }, "#d62728",
             true);
    polyline(os, p, rows, t_of,
             [&](std::size_t r) { return ch.b_upper * log.rows[r].channels[c].rho; }, "#d62728",
             true);
    polyline(os, p, rows, t_of, [&](std::size_t r) { return log.rows[r].channels[c].e; },
             "#1f77b4", false);
  }
  os << "</svg>\n";
  return os.str();
}

const std::vector<std::string>& output_file_names() {
  static const std::vector<std::string> names{
      "trajectory.csv", "errors.csv",    "summary.json",       "trajectory.svg",
      "errors_alpha.svg", "errors_r.svg", "errors_secondary.svg"};
  return names;
}

void write_outputs(const RunResult& result, const ScenarioConfig& config, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormationError(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  const fs::path base(dir);
  const auto& log = result.log;

  {
    std::ostringstream os;
    write_trajectory_csv(log, os);
    write_text_file(base / "trajectory.csv", os.str());
  }
  {
    std::ostringstream os;
    write_errors_csv(log, os);
    write_text_file(base / "errors.csv", os.str());
  }
  write_text_file(base / "summary.json", summary_to_json(result.summary, config).dump(2) + "\n");
  write_text_file(base / "trajectory.svg", trajectory_svg(log, config.snapshot_times));

  std::vector<std::string> alpha, ratio, secondary;
  for (const auto& c : log.channels) {
    switch (c.kind) {
      case ChannelKind::kAngle: alpha.push_back(c.name); break;
      case ChannelKind::kRatio: ratio.push_back(c.name); break;
      default: secondary.push_back(c.name); break;
    }
  }
  write_text_file(base / "errors_alpha.svg",
                  channel_plot_svg(log, alpha, "edge-angle errors and performance bounds"));
  write_text_file(base / "errors_r.svg",
                  channel_plot_svg(log, ratio, "log distance-ratio errors and performance bounds"));
  write_text_file(base / "errors_secondary.svg",
                  channel_plot_svg(log, secondary,
                                   "secondary leader distance and bearing errors"));
}

}  // namespace bform
