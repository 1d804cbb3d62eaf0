#include "bhasha/bias.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bhasha/kernels.hpp"

namespace bhasha {

std::uint64_t ChoiceDistribution::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::array<double, kPositions> ChoiceDistribution::frequencies() const {
  std::array<double, kPositions> f{};
  const auto n = total();
  if (n == 0) return f;
  for (std::size_t p = 0; p < kPositions; ++p)
    f[p] = static_cast<double>(counts[p]) / static_cast<double>(n);
  return f;
}

std::array<double, kPositions> ChoiceDistribution::baseline() const {
  std::array<double, kPositions> b{};
  std::uint64_t items = 0;
  for (std::size_t n = 1; n <= kPositions; ++n) {
    items += items_by_options[n];
    const double share = static_cast<double>(items_by_options[n]) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) b[p] += share;
  }
  if (items == 0) return b;
  for (auto& v : b) v /= static_cast<double>(items);
  return b;
}

void ChoiceDistribution::add(int predicted_index, int n_options) {
  if (n_options < 1 || n_options > static_cast<int>(kPositions))
    throw DataError("n_options " + std::to_string(n_options) + " outside [1, 10]");
  if (predicted_index < 0 || predicted_index >= n_options)
    throw DataError("predicted index " + std::to_string(predicted_index) + " not below n_options " +
                    std::to_string(n_options));
  ++counts[static_cast<std::size_t>(predicted_index)];
  ++items_by_options[static_cast<std::size_t>(n_options)];
  for (int p = 0; p < n_options; ++p) ++availability[static_cast<std::size_t>(p)];
}

ChoiceDistribution& ChoiceDistribution::merge(const ChoiceDistribution& other) {
  for (std::size_t p = 0; p < kPositions; ++p) {
    counts[p] += other.counts[p];
    availability[p] += other.availability[p];
  }
  for (std::size_t n = 0; n <= kPositions; ++n) items_by_options[n] += other.items_by_options[n];
  return *this;
}

ChoiceDistribution choice_distribution(std::span<const Prediction> predictions) {
  return kernels::parallel::choice_counts(predictions);
}

ChoiceDistribution choice_distribution(std::span<const PredictionRecord> records) {
  std::vector<Prediction> preds;
  preds.reserve(records.size());
  for (const auto& r : records) preds.push_back({r.predicted_index, r.n_options});
  return choice_distribution(preds);
}

double bias_index(const ChoiceDistribution& d) {
  if (d.total() == 0) throw DataError("empty choice distribution");
  const auto f = d.frequencies();
  const auto b = d.baseline();
  double tv = 0.0;
  for (std::size_t p = 0; p < kPositions; ++p) tv += std::abs(f[p] - b[p]);
  return std::clamp(0.5 * tv, 0.0, 1.0);
}

std::map<std::string, ChoiceDistribution> per_domain(std::span<const PredictionRecord> records) {
  std::map<std::string, ChoiceDistribution> out;
  for (const auto& r : records)
    out[r.domain ? *r.domain : std::string(kUnlabeledDomain)].add(r.predicted_index, r.n_options);
  return out;
}

std::string render_csv(std::span<const DistributionSeries> series) {
  std::ostringstream os;
  os << "model,domain,position,count,availability,frequency,baseline\n";
  char buf[96];
  for (const auto& s : series) {
    const auto f = s.dist.frequencies();
    const auto b = s.dist.baseline();
    for (std::size_t p = 0; p < kPositions; ++p) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", f[p], b[p]);
      os << s.model << ',' << s.domain << ',' << static_cast<char>('A' + p) << ','
         << s.dist.counts[p] << ',' << s.dist.availability[p] << ',' << buf << '\n';
    }
  }
  return os.str();
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                              "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

}  // namespace

std::string render_svg(std::span<const DistributionSeries> series, std::string_view title) {
  constexpr int kWidth = 960, kHeight = 420, kLeft = 60, kRight = 180, kTop = 40, kBottom = 50;
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;

  double max_f = 0.0;
  for (const auto& s : series)
    for (double f : s.dist.frequencies()) max_f = std::max(max_f, f);
  const double y_max = max_f > 0 ? std::ceil(max_f * 10.0) / 10.0 : 1.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  char buf[32];
  for (int t = 0; t <= 5; ++t) {
    const double v = y_max * t / 5.0;
    const double y = kTop + plot_h - plot_h * t / 5.0;
    std::snprintf(buf, sizeof buf, "%.2f", v);
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << buf
       << "</text>\n";
  }

  const double group_w = static_cast<double>(plot_w) / kPositions;
  const double bar_w = series.empty() ? 0 : (group_w * 0.8) / static_cast<double>(series.size());
  for (std::size_t p = 0; p < kPositions; ++p) {
    const double gx = kLeft + group_w * static_cast<double>(p);
    os << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << kTop + plot_h + 18
       << "\" text-anchor=\"middle\">" << static_cast<char>('A' + p) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double f = series[s].dist.frequencies()[p];
      const double h = plot_h * f / y_max;
      std::snprintf(buf, sizeof buf, "%.4f", f);
      os << "<rect x=\"" << gx + group_w * 0.1 + bar_w * static_cast<double>(s) << "\" y=\""
         << kTop + plot_h - h << "\" width=\"" << bar_w << "\" height=\"" << h << "\" fill=\""
         << kPalette[s % kPalette.size()] << "\"><title>" << xml_escape(series[s].model) << " "
         << xml_escape(series[s].domain) << " " << static_cast<char>('A' + p) << ": " << buf
         << "</title></rect>\n";
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const int y = kTop + 16 * static_cast<int>(s);
    os << "<rect x=\"" << kLeft + plot_w + 16 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
       << kPalette[s % kPalette.size()] << "\"/>\n";
    os << "<text x=\"" << kLeft + plot_w + 32 << "\" y=\"" << y + 9 << "\">"
       << xml_escape(series[s].model) << (series[s].domain == "all" ? "" : " / " + xml_escape(series[s].domain))
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\">Predicted option</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace bhasha
