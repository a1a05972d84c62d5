#include "sbrnn/results.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "sbrnn/error.hpp"
#include "sbrnn/text.hpp"

namespace sbrnn {

namespace {

constexpr double kBerFloor = 1e-7;

int labeling_rank(const std::string& s) { return s == "optimized" ? 0 : s == "gray" ? 1 : 2; }
int weights_rank(const std::string& s) { return s == "uniform" ? 1 : 0; }

}  // namespace

void ResultRow::validate() const {
  require(!system.empty(), "result row: empty system");
  require(distance_km >= 0.0, "result row: negative distance");
  require(ber >= 0.0 && ber <= 1.0, "result row: BER outside [0, 1]");
  require(bler >= 0.0 && bler <= 1.0, "result row: BLER outside [0, 1]");
  if (system == "sbrnn") require(ber <= bler, "result row: BER exceeds BLER");
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.system, a.distance_km, a.eta, a.labeling, a.weights, a.seed) <
           std::tie(b.system, b.distance_km, b.eta, b.labeling, b.weights, b.seed);
  });
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultHeader) + "\n";
  for (const auto& r : rows) {
    out += r.system + "," + format_double(r.distance_km) + "," + std::to_string(r.eta) + "," + format_double(r.bler) +
           "," + format_double(r.ber) + "," + (r.ber_lower_bound ? format_double(*r.ber_lower_bound) : "") + "," +
           r.labeling + "," + r.weights + "," + format_double(r.flops_pdb) + "," + std::to_string(r.seed) + "," +
           r.config_hash + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && trim(line) == kResultHeader, "results: missing CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    require(f.size() == 11, "results: expected 11 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.system = f[0];
    r.distance_km = parse_double(f[1]);
    r.eta = static_cast<int>(parse_integer(f[2]));
    r.bler = parse_double(f[3]);
    r.ber = parse_double(f[4]);
    if (!f[5].empty()) r.ber_lower_bound = parse_double(f[5]);
    r.labeling = f[6];
    r.weights = f[7];
    r.flops_pdb = parse_double(f[8]);
    r.seed = parse_unsigned(f[9]);
    r.config_hash = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_svg(const std::vector<ResultRow>& rows, std::optional<double> hd_fec) {
  require(!rows.empty(), "plot: no results");
  // (system, eta) -> distance -> best row
  std::map<std::pair<std::string, int>, std::map<double, const ResultRow*>> series;
  for (const auto& r : rows) {
    auto& slot = series[{r.system, r.eta}][r.distance_km];
    if (!slot || std::tuple(labeling_rank(r.labeling), weights_rank(r.weights)) <
                     std::tuple(labeling_rank(slot->labeling), weights_rank(slot->weights)))
      slot = &r;
  }

  double d_min = rows.front().distance_km, d_max = d_min;
  double lo = 0.0;
  for (const auto& r : rows) {
    d_min = std::min(d_min, r.distance_km);
    d_max = std::max(d_max, r.distance_km);
    lo = std::min(lo, std::floor(std::log10(std::max(r.ber, kBerFloor))));
  }
  if (hd_fec) lo = std::min(lo, std::floor(std::log10(*hd_fec)));
  if (lo == 0.0) lo = -1.0;
  if (d_max == d_min) d_max = d_min + 1.0;

  const double w = 640, h = 420, left = 70, right = 170, top = 20, bottom = 50;
  auto px = [&](double d) { return left + (d - d_min) / (d_max - d_min) * (w - left - right); };
  auto py = [&](double ber) {
    const double l = std::log10(std::max(ber, kBerFloor));
    return top + (0.0 - l) / (0.0 - lo) * (h - top - bottom);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
    << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(lo); e <= 0; ++e)
    s << "<text x=\"" << left - 8 << "\" y=\"" << py(std::pow(10.0, e)) + 4
      << "\" font-size=\"11\" text-anchor=\"end\">1e" << e << "</text>\n";
  s << "<text x=\"" << left << "\" y=\"" << h - 15 << "\" font-size=\"11\">" << format_double(d_min) << " km</text>\n";
  s << "<text x=\"" << w - right << "\" y=\"" << h - 15 << "\" font-size=\"11\" text-anchor=\"end\">"
    << format_double(d_max) << " km</text>\n";

  std::size_t k = 0;
  for (const auto& [key, points] : series) {
    const char* color = colors[k % std::size(colors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [d, r] : points) {
      s << (first ? "" : " ") << format_double(px(d)) << "," << format_double(py(r->ber));
      first = false;
    }
    s << "\"/>\n";
    s << "<text x=\"" << w - right + 10 << "\" y=\"" << top + 16 * (k + 1) << "\" font-size=\"11\" fill=\"" << color
      << "\">" << key.first << " eta=" << key.second << "</text>\n";
    ++k;
  }
  if (hd_fec) {
    const double y = py(*hd_fec);
    s << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << w - right << "\" y2=\"" << y
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    s << "<text x=\"" << w - right + 10 << "\" y=\"" << y + 4 << "\" font-size=\"11\" fill=\"gray\">HD-FEC "
      << format_double(*hd_fec) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace sbrnn
