#include "cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "atyp/binarize.hpp"

namespace atyp::cli {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError(path.string() + ": read failed");
  return std::move(buf).str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw DataError(path.string() + ": write failed");
}

BitSequence load_bits_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return binarize::parse_bit_text(text);
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json manifest_base(std::string_view subcommand) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand;
  j["parameters"] = nlohmann::ordered_json::object();
  j["inputs"] = nlohmann::ordered_json::array();
  j["outputs"] = nlohmann::ordered_json::array();
  return j;
}

void write_manifest(const fs::path& path, const nlohmann::ordered_json& manifest) {
  write_text_file(path, manifest.dump(2) + "\n");
}

namespace {

double parse_double_strict(const std::string& token) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw UsageError("cannot parse number '" + token + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return std::string(buf);
}

// Linear [lo, hi] -> [plo, phi] pixel map; collapses gracefully when the
// data range is a single point.
struct LinMap {
  double lo = 0.0, hi = 1.0, plo = 0.0, phi = 1.0;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (plo + phi);
    return plo + (v - lo) / (hi - lo) * (phi - plo);
  }
};

void append_polyline(std::string& svg, const std::vector<double>& xs,
                     const std::vector<double>& ys, const char* color,
                     const char* extra = "") {
  svg += "<polyline fill=\"none\" stroke=\"";
  svg += color;
  svg += "\" stroke-width=\"1\" ";
  svg += extra;
  svg += " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) svg += ' ';
    svg += fmt(xs[i], "%.1f");
    svg += ',';
    svg += fmt(ys[i], "%.1f");
  }
  svg += "\"/>\n";
}

void append_text(std::string& svg, double x, double y, const std::string& s,
                 const char* anchor = "start") {
  svg += "<text x=\"" + fmt(x, "%.1f") + "\" y=\"" + fmt(y, "%.1f") +
         "\" font-family=\"monospace\" font-size=\"12\" fill=\"#444\" "
         "text-anchor=\"" +
         anchor + "\">" + s + "</text>\n";
}

void append_hline(std::string& svg, double x0, double x1, double y,
                  const char* color, const char* dash) {
  svg += "<line x1=\"" + fmt(x0, "%.1f") + "\" y1=\"" + fmt(y, "%.1f") +
         "\" x2=\"" + fmt(x1, "%.1f") + "\" y2=\"" + fmt(y, "%.1f") +
         "\" stroke=\"" + color + "\" stroke-width=\"1\"" +
         (dash[0] ? std::string(" stroke-dasharray=\"") + dash + "\"" : "") +
         "/>\n";
}

}  // namespace

std::vector<double> parse_value_grid(const std::string& text) {
  if (text.empty()) throw UsageError("empty value grid");
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw UsageError("range grids use start:stop:step, got '" + text + "'");
    }
    const double start = parse_double_strict(parts[0]);
    const double stop = parse_double_strict(parts[1]);
    const double step = parse_double_strict(parts[2]);
    if (step <= 0.0) throw UsageError("grid step must be positive");
    if (stop < start) throw UsageError("grid stop must not precede start");
    for (double v = start; v <= stop + 1e-9; v += step) values.push_back(v);
  } else {
    for (const std::string& token : split(text, ',')) {
      values.push_back(parse_double_strict(token));
    }
  }
  if (values.empty()) throw UsageError("empty value grid");
  return values;
}

std::string render_scan_svg(BitSpan x, const ScanProfile& profile,
                            const std::vector<FlaggedSegment>& flags,
                            std::optional<double> tau) {
  const std::size_t n_samples = x.size();
  const double px0 = 60.0, px1 = 980.0;
  const LinMap xmap{0.0, static_cast<double>(n_samples), px0, px1};

  const std::vector<std::int64_t> walk = random_walk(x);
  double wlo = 0.0, whi = 0.0;
  for (std::int64_t v : walk) {
    wlo = std::min(wlo, static_cast<double>(v));
    whi = std::max(whi, static_cast<double>(v));
  }
  // pixel y grows downward, so hi maps to the panel top
  const LinMap wmap{wlo, whi, 290.0, 30.0};

  double dlo = 0.0, dhi = 0.0;
  for (double v : profile.delta) {
    dlo = std::min(dlo, v);
    dhi = std::max(dhi, v);
  }
  if (tau) dlo = std::min(dlo, -*tau - 1.0);
  const LinMap dmap{dlo, dhi, 610.0, 350.0};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 640\">\n";
  svg += "<rect width=\"1000\" height=\"640\" fill=\"white\"/>\n";

  // flagged segments shaded across both panels
  for (const FlaggedSegment& f : flags) {
    const double rx = xmap(static_cast<double>(f.start));
    const double rw =
        xmap(static_cast<double>(f.start + f.length)) - rx;
    for (const auto& [top, bottom] : {std::pair{30.0, 290.0}, {350.0, 610.0}}) {
      svg += "<rect x=\"" + fmt(rx, "%.1f") + "\" y=\"" + fmt(top, "%.1f") +
             "\" width=\"" + fmt(rw, "%.1f") + "\" height=\"" +
             fmt(bottom - top, "%.1f") +
             "\" fill=\"#f2b8b5\" opacity=\"0.45\"/>\n";
    }
  }

  for (const auto& [top, bottom] : {std::pair{30.0, 290.0}, {350.0, 610.0}}) {
    svg += "<rect x=\"60\" y=\"" + fmt(top, "%.1f") +
           "\" width=\"920\" height=\"" + fmt(bottom - top, "%.1f") +
           "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  }

  // zero baselines
  if (wlo <= 0.0 && 0.0 <= whi) append_hline(svg, px0, px1, wmap(0.0), "#e0e0e0", "");
  if (dlo <= 0.0 && 0.0 <= dhi) append_hline(svg, px0, px1, dmap(0.0), "#e0e0e0", "");

  // random walk, downsampled to keep the file small
  {
    std::vector<double> xs, ys;
    const std::size_t stride = std::max<std::size_t>(1, walk.size() / 1600);
    for (std::size_t i = 0; i < walk.size(); i += stride) {
      xs.push_back(xmap(static_cast<double>(i)));
      ys.push_back(wmap(static_cast<double>(walk[i])));
    }
    if ((walk.size() - 1) % stride != 0) {
      xs.push_back(xmap(static_cast<double>(walk.size() - 1)));
      ys.push_back(wmap(static_cast<double>(walk.back())));
    }
    append_polyline(svg, xs, ys, "#1a73e8");
  }

  // code-length difference profile
  {
    std::vector<double> xs, ys;
    const std::size_t count = profile.delta.size();
    const std::size_t stride = std::max<std::size_t>(1, count / 1600);
    for (std::size_t i = 0; i < count; i += stride) {
      xs.push_back(xmap(static_cast<double>(i)));
      ys.push_back(dmap(profile.delta[i]));
    }
    if (count > 0 && (count - 1) % stride != 0) {
      xs.push_back(xmap(static_cast<double>(count - 1)));
      ys.push_back(dmap(profile.delta.back()));
    }
    append_polyline(svg, xs, ys, "#188038");
  }

  if (tau) {
    append_hline(svg, px0, px1, dmap(-*tau), "#c5221f", "6,4");
    append_text(svg, px1, dmap(-*tau) - 4.0,
                "threshold -" + fmt(*tau) + " bits", "end");
  }

  append_text(svg, px0, 22.0, "random walk of the stream");
  append_text(svg, px0, 342.0, "code-length difference (bits) per start");
  append_text(svg, px0 - 4.0, wmap(whi) + 10.0, fmt(whi), "end");
  append_text(svg, px0 - 4.0, wmap(wlo), fmt(wlo), "end");
  append_text(svg, px0 - 4.0, dmap(dhi) + 10.0, fmt(dhi), "end");
  append_text(svg, px0 - 4.0, dmap(dlo), fmt(dlo), "end");
  append_text(svg, px1, 632.0, "position 0.." + std::to_string(n_samples), "end");

  svg += "</svg>\n";
  return svg;
}

std::string render_grid_svg(const std::vector<GridRow>& rows,
                            std::string_view x_label, bool log_x, bool log_y) {
  static constexpr double kFloor = 1e-12;
  const auto tx = [log_x](double v) {
    return log_x ? std::log10(std::max(v, kFloor)) : v;
  };
  const auto ty = [log_y](double v) {
    return log_y ? std::log10(std::max(v, kFloor)) : v;
  };

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const GridRow& r : rows) {
    xlo = std::min(xlo, tx(r.x));
    xhi = std::max(xhi, tx(r.x));
    for (double v : {r.estimate, r.bound}) {
      if (std::isfinite(v)) {
        ylo = std::min(ylo, ty(v));
        yhi = std::max(yhi, ty(v));
      }
    }
  }
  if (!std::isfinite(ylo)) {
    ylo = 0.0;
    yhi = 1.0;
  }
  const LinMap xmap{xlo, xhi, 80.0, 700.0};
  const LinMap ymap{ylo, yhi, 460.0, 40.0};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 760 520\">\n";
  svg += "<rect width=\"760\" height=\"520\" fill=\"white\"/>\n";
  svg += "<rect x=\"80\" y=\"40\" width=\"620\" height=\"420\" fill=\"none\" "
         "stroke=\"#ccc\"/>\n";

  std::vector<double> exs, eys, bxs, bys;
  for (const GridRow& r : rows) {
    exs.push_back(xmap(tx(r.x)));
    eys.push_back(ymap(ty(r.estimate)));
    if (std::isfinite(r.bound)) {
      bxs.push_back(xmap(tx(r.x)));
      bys.push_back(ymap(ty(r.bound)));
    }
  }
  if (!bxs.empty()) {
    append_polyline(svg, bxs, bys, "#c5221f", "stroke-dasharray=\"6,4\"");
  }
  append_polyline(svg, exs, eys, "#1a73e8");
  for (std::size_t i = 0; i < exs.size(); ++i) {
    svg += "<circle cx=\"" + fmt(exs[i], "%.1f") + "\" cy=\"" +
           fmt(eys[i], "%.1f") + "\" r=\"3\" fill=\"#1a73e8\"/>\n";
  }

  append_text(svg, 390.0, 496.0, std::string(x_label), "middle");
  append_text(svg, 80.0, 32.0,
              std::string("estimate (blue) vs bound (red dashed)"));
  append_text(svg, 76.0, 466.0, fmt(log_y ? std::pow(10.0, ylo) : ylo), "end");
  append_text(svg, 76.0, 50.0, fmt(log_y ? std::pow(10.0, yhi) : yhi), "end");
  append_text(svg, 80.0, 478.0, fmt(log_x ? std::pow(10.0, xlo) : xlo), "middle");
  append_text(svg, 700.0, 478.0, fmt(log_x ? std::pow(10.0, xhi) : xhi), "middle");

  svg += "</svg>\n";
  return svg;
}

}  // namespace atyp::cli
