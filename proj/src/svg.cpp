#include "solarzoning/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <set>

namespace solarzoning::svg {
namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 160.0, kTop = 40.0, kBottom = 50.0;
constexpr std::array<const char*, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                 "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void header(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
}

void axes(std::ostream& out, double x_max, double y_max, const std::string& x_label, const std::string& y_label) {
  const double x1 = kWidth - kRight, y1 = kHeight - kBottom;
  out << "<line x1=\"" << kLeft << "\" y1=\"" << y1 << "\" x2=\"" << x1 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double y = y1 - f * (y1 - kTop);
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(f * y_max)
        << "</text>\n";
    if (x_max > 0) {
      const double x = kLeft + f * (x1 - kLeft);
      out << "<text x=\"" << num(x) << "\" y=\"" << y1 + 16 << "\" text-anchor=\"middle\">" << num(f * x_max)
          << "</text>\n";
    }
  }
  out << "<text x=\"" << (kLeft + x1) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << (kTop + y1) / 2 << "\" transform=\"rotate(-90 16 " << (kTop + y1) / 2
      << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

void legend(std::ostream& out, std::size_t k, const std::string& label) {
  const double x = kWidth - kRight + 14, y = kTop + 18.0 * k;
  out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[k % kPalette.size()]
      << "\"/>\n<text x=\"" << x + 18 << "\" y=\"" << y + 10 << "\">" << escape(label) << "</text>\n";
}

}  // namespace

void supply_curves(std::ostream& out, std::span<const supply::SupplyCurve> curves) {
  double x_max = 0.0, y_max = 0.0;
  for (const auto& c : curves) {
    x_max = std::max(x_max, c.total_mw());
    for (const auto& p : c.points) y_max = std::max(y_max, p.lcoe_usd_per_mwh);
  }
  if (x_max <= 0.0) x_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.1;
  header(out, "Solar supply curves");
  axes(out, x_max, y_max, "cumulative capacity (MW)", "LCOE (USD/MWh)");
  const double x1 = kWidth - kRight, y1 = kHeight - kBottom;
  const auto sx = [&](double v) { return num(kLeft + v / x_max * (x1 - kLeft)); };
  const auto sy = [&](double v) { return num(y1 - v / y_max * (y1 - kTop)); };
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    if (!c.points.empty()) {
      out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[k % kPalette.size()] << "\" points=\"";
      double prev = 0.0;
      for (const auto& p : c.points) {
        out << sx(prev) << ',' << sy(p.lcoe_usd_per_mwh) << ' ' << sx(p.cumulative_mw) << ','
            << sy(p.lcoe_usd_per_mwh) << ' ';
        prev = p.cumulative_mw;
      }
      out << "\"/>\n";
    }
    legend(out, k, c.label);
  }
  out << "</svg>\n";
}

void capacity_bars(std::ostream& out, const std::map<std::string, std::map<std::string, double>>& capacity,
                   const std::string& title) {
  std::set<std::string> techs;
  double y_max = 0.0;
  for (const auto& [region, by_tech] : capacity) {
    for (const auto& [tech, mw] : by_tech) {
      techs.insert(tech);
      y_max = std::max(y_max, mw);
    }
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.1;
  header(out, title);
  axes(out, 0.0, y_max, "region", "capacity (MW)");
  const double x1 = kWidth - kRight, y1 = kHeight - kBottom;
  const double group = capacity.empty() ? 0.0 : (x1 - kLeft) / capacity.size();
  const double bar = techs.empty() ? 0.0 : group * 0.8 / techs.size();
  std::size_t g = 0;
  for (const auto& [region, by_tech] : capacity) {
    const double gx = kLeft + g * group + group * 0.1;
    std::size_t k = 0;
    for (const auto& tech : techs) {
      const auto it = by_tech.find(tech);
      const double mw = it == by_tech.end() ? 0.0 : it->second;
      const double h = mw / y_max * (y1 - kTop);
      out << "<rect x=\"" << num(gx + k * bar) << "\" y=\"" << num(y1 - h) << "\" width=\"" << num(bar * 0.9)
          << "\" height=\"" << num(h) << "\" fill=\"" << kPalette[k % kPalette.size()] << "\"/>\n";
      ++k;
    }
    out << "<text x=\"" << num(gx + group * 0.4) << "\" y=\"" << y1 + 16 << "\" text-anchor=\"middle\">"
        << escape(region) << "</text>\n";
    ++g;
  }
  std::size_t k = 0;
  for (const auto& tech : techs) legend(out, k++, tech);
  out << "</svg>\n";
}

}  // namespace solarzoning::svg
