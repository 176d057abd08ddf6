#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ihs/bifurcation.hpp"

namespace ihs {

namespace {

std::string num(double x)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

nlohmann::ordered_json vec(const Eigen::VectorXd& v)
{
    auto out = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::string css_class(ArcLabel label)
{
    switch (label) {
    case ArcLabel::elliptic_family: return "elliptic";
    case ArcLabel::hyperbolic_family: return "hyperbolic";
    case ArcLabel::unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace

std::string export_svg(const BifurcationDiagram& d)
{
    const double width = 800, height = 600, margin = 40;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](const Eigen::VectorXd& v) {
        if (v.size() < 2) return;
        x0 = std::min(x0, v[0]);
        x1 = std::max(x1, v[0]);
        y0 = std::min(y0, v[1]);
        y1 = std::max(y1, v[1]);
    };
    for (const auto& a : d.arcs)
        for (const auto& v : a.values) grow(v);
    for (const auto& v : d.vertices) grow(v.value);
    if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<style>\n"
           "polyline { fill: none; stroke-width: 1.5; }\n"
           ".elliptic { stroke: #1f5fbf; }\n"
           ".hyperbolic { stroke: #c0392b; }\n"
           ".unknown { stroke: #888888; stroke-dasharray: 4 3; }\n"
           ".vertex { fill: #000000; }\n"
           "</style>\n";
    for (const auto& a : d.arcs) {
        out << "<polyline class=\"" << css_class(a.label) << "\" data-arc=\"" << a.id << "\" points=\"";
        for (std::size_t i = 0; i < a.values.size(); ++i)
            out << (i ? " " : "") << num(sx(a.values[i][0])) << "," << num(sy(a.values[i][1]));
        out << "\"/>\n";
    }
    for (const auto& v : d.vertices)
        if (v.value.size() >= 2)
            out << "<circle class=\"vertex\" cx=\"" << num(sx(v.value[0])) << "\" cy=\"" << num(sy(v.value[1]))
                << "\" r=\"3\"/>\n";
    out << "</svg>\n";
    return out.str();
}

std::string export_csv(const BifurcationDiagram& d)
{
    std::ostringstream out;
    out << "arc_id,h,k\n";
    for (const auto& a : d.arcs)
        for (const auto& v : a.values) out << a.id << "," << num(v[0]) << "," << num(v.size() > 1 ? v[1] : 0.0) << "\n";
    return out.str();
}

std::string export_json(const BifurcationDiagram& d)
{
    nlohmann::ordered_json j;
    j["axes"] = d.axes;
    auto arcs = nlohmann::ordered_json::array();
    for (const auto& a : d.arcs) {
        nlohmann::ordered_json ja;
        ja["id"] = a.id;
        ja["label"] = to_string(a.label);
        ja["stop_reason"] = a.stop_reason;
        auto pts = nlohmann::ordered_json::array();
        for (const auto& v : a.values) pts.push_back(vec(v));
        ja["values"] = pts;
        arcs.push_back(ja);
    }
    j["arcs"] = arcs;
    auto vertices = nlohmann::ordered_json::array();
    for (const auto& v : d.vertices) {
        nlohmann::ordered_json jv;
        jv["point"] = vec(v.point.coords);
        jv["value"] = vec(v.value);
        jv["rank"] = v.rank;
        jv["verdict"] = v.verdict;
        if (v.type) jv["type"] = {v.type->elliptic, v.type->hyperbolic, v.type->focus};
        else jv["type"] = nullptr;
        vertices.push_back(jv);
    }
    j["vertices"] = vertices;
    auto cusps = nlohmann::ordered_json::array();
    for (const auto& c : d.cusps) cusps.push_back({{"arc", c.arc}, {"value", vec(c.value)}});
    j["cusps"] = cusps;
    j["failures"] = d.failures;
    return j.dump(2) + "\n";
}

void export_diagram(const BifurcationDiagram& d, ExportFormat format, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    switch (format) {
    case ExportFormat::svg: f << export_svg(d); break;
    case ExportFormat::csv: f << export_csv(d); break;
    case ExportFormat::json: f << export_json(d); break;
    }
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ihs
