#include "aoisched/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoisched {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("comparison csv: missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out(1);
    for (char ch : line) {
        if (ch == ',')
            out.emplace_back();
        else
            out.back() += ch;
    }
    return out;
}

Table parse(std::string_view csv)
{
    Table t;
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("comparison csv: empty");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error("comparison csv: ragged row");
        t.rows.push_back(std::move(cells));
    }
    if (t.rows.empty())
        throw std::runtime_error("comparison csv: no rows");
    return t;
}

double number(const std::string& s)
{
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("comparison csv: bad number '" + s + "'");
    }
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

// Policies in order of first appearance.
std::vector<std::string> policies_of(const Table& t)
{
    const std::size_t col = t.column("policy");
    std::vector<std::string> out;
    for (const auto& r : t.rows)
        if (std::find(out.begin(), out.end(), r[col]) == out.end())
            out.push_back(r[col]);
    return out;
}

std::string open_svg(const std::string& title)
{
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" +
                    fmt("%.0f", kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt("%.1f", kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";
    return s;
}

std::string axes(double y_max, const std::string& x_label, const std::string& y_label)
{
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    std::string s;
    s += "<line x1=\"" + fmt("%.1f", x0) + "\" y1=\"" + fmt("%.1f", y0) + "\" x2=\"" + fmt("%.1f", x1) + "\" y2=\"" +
         fmt("%.1f", y0) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt("%.1f", x0) + "\" y1=\"" + fmt("%.1f", y0) + "\" x2=\"" + fmt("%.1f", x0) + "\" y2=\"" +
         fmt("%.1f", y1) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = y_max * k / 4.0;
        const double y = y0 - (y0 - y1) * k / 4.0;
        s += "<line x1=\"" + fmt("%.1f", x0 - 4) + "\" y1=\"" + fmt("%.1f", y) + "\" x2=\"" + fmt("%.1f", x0) +
             "\" y2=\"" + fmt("%.1f", y) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt("%.1f", x0 - 8) + "\" y=\"" + fmt("%.1f", y + 4) + "\" text-anchor=\"end\">" +
             fmt("%.4g", v) + "</text>\n";
    }
    s += "<text x=\"" + fmt("%.1f", (x0 + x1) / 2) + "\" y=\"" + fmt("%.1f", kHeight - 15) +
         "\" text-anchor=\"middle\">" + x_label + "</text>\n";
    s += "<text x=\"18\" y=\"" + fmt("%.1f", (y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt("%.1f", (y0 + y1) / 2) + ")\">" + y_label + "</text>\n";
    return s;
}

std::string legend(const std::vector<std::string>& names)
{
    std::string s;
    const double x = kWidth - kRight + 20;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kTop + 10 + 20.0 * static_cast<double>(i);
        s += "<rect x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", y - 9) + "\" width=\"12\" height=\"12\" fill=\"" +
             kColors[i % std::size(kColors)] + "\"/>\n";
        s += "<text x=\"" + fmt("%.1f", x + 18) + "\" y=\"" + fmt("%.1f", y + 1) + "\">" + names[i] + "</text>\n";
    }
    return s;
}

double nice_max(double v) { return v > 0 ? v * 1.1 : 1.0; }

}  // namespace

std::string exwsuoi_line_svg(std::string_view comparison_csv)
{
    const Table t = parse(comparison_csv);
    const std::size_t pc = t.column("policy"), hc = t.column("horizon"), vc = t.column("exwsuoi_mean");
    const auto names = policies_of(t);

    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double h_min = 1e300, h_max = -1e300, v_max = 0.0;
    for (const auto& r : t.rows) {
        const double h = number(r[hc]), v = number(r[vc]);
        series[r[pc]].emplace_back(h, v);
        h_min = std::min(h_min, h);
        h_max = std::max(h_max, h);
        v_max = std::max(v_max, v);
    }
    const double y_max = nice_max(v_max);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    auto px = [&](double h) { return h_max > h_min ? x0 + (x1 - x0) * (h - h_min) / (h_max - h_min) : (x0 + x1) / 2; };
    auto py = [&](double v) { return y0 - (y0 - y1) * v / y_max; };

    std::string s = open_svg("Mean EXWSUoI by horizon");
    s += axes(y_max, "horizon T (slots)", "EXWSUoI");
    std::vector<double> ticks;
    for (const auto& r : t.rows)
        ticks.push_back(number(r[hc]));
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    for (double h : ticks)
        s += "<text x=\"" + fmt("%.1f", px(h)) + "\" y=\"" + fmt("%.1f", y0 + 16) + "\" text-anchor=\"middle\">" +
             fmt("%.0f", h) + "</text>\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto pts = series[names[i]];
        std::sort(pts.begin(), pts.end());
        const char* color = kColors[i % std::size(kColors)];
        std::string poly;
        for (const auto& [h, v] : pts)
            poly += fmt("%.2f", px(h)) + "," + fmt("%.2f", py(v)) + " ";
        if (!poly.empty())
            poly.pop_back();
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + poly +
             "\"/>\n";
        for (const auto& [h, v] : pts)
            s += "<circle cx=\"" + fmt("%.2f", px(h)) + "\" cy=\"" + fmt("%.2f", py(v)) + "\" r=\"3\" fill=\"" +
                 color + "\"/>\n";
    }
    s += legend(names);
    s += "</svg>\n";
    return s;
}

std::string metrics_bars_svg(std::string_view comparison_csv)
{
    const Table t = parse(comparison_csv);
    const std::size_t pc = t.column("policy"), hc = t.column("horizon");
    const std::vector<std::pair<std::string, std::string>> metrics{
        {"mean_age_mean", "mean age"}, {"mean_latency_mean", "mean latency"}, {"rms_jitter_mean", "RMS jitter"}};
    std::vector<std::size_t> cols;
    for (const auto& m : metrics)
        cols.push_back(t.column(m.first));

    double h_max = -1e300;
    for (const auto& r : t.rows)
        h_max = std::max(h_max, number(r[hc]));
    const auto names = policies_of(t);
    std::map<std::string, std::vector<double>> values;
    double v_max = 0.0;
    for (const auto& r : t.rows) {
        if (number(r[hc]) != h_max)
            continue;
        auto& vs = values[r[pc]];
        for (std::size_t c : cols) {
            vs.push_back(number(r[c]));
            v_max = std::max(v_max, vs.back());
        }
    }

    const double y_max = nice_max(v_max);
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    const double group_w = (x1 - x0) / static_cast<double>(metrics.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, names.size()));

    std::string s = open_svg("Mean age, latency and jitter at T = " + fmt("%.0f", h_max));
    s += axes(y_max, "metric", "slots");
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const double gx = x0 + group_w * static_cast<double>(m) + group_w * 0.1;
        s += "<text x=\"" + fmt("%.1f", x0 + group_w * (static_cast<double>(m) + 0.5)) + "\" y=\"" +
             fmt("%.1f", y0 + 16) + "\" text-anchor=\"middle\">" + metrics[m].second + "</text>\n";
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto it = values.find(names[i]);
            if (it == values.end())
                continue;
            const double v = it->second[m];
            const double top = y0 - (y0 - y1) * v / y_max;
            s += "<rect x=\"" + fmt("%.2f", gx + bar_w * static_cast<double>(i)) + "\" y=\"" + fmt("%.2f", top) +
                 "\" width=\"" + fmt("%.2f", bar_w * 0.9) + "\" height=\"" + fmt("%.2f", y0 - top) + "\" fill=\"" +
                 kColors[i % std::size(kColors)] + "\"/>\n";
        }
    }
    s += legend(names);
    s += "</svg>\n";
    return s;
}

}  // namespace aoisched
