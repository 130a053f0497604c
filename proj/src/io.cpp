/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "anytime/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace anytime::io {

namespace {

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double x, int digits = 1)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

std::string tick_label(double x)
{
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

}  // namespace

std::string format(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t columns;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : impl_(new Impl{std::ofstream(path, std::ios::binary), header.size()})
{
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("cannot write " + path.string());
    }
    row(header);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (cells.size() != impl_->columns)
        throw std::invalid_argument("CsvWriter: wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            impl_->out << ',';
        impl_->out << cells[i];
    }
    impl_->out << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileRecord>& records)
{
    CsvWriter w(path, {"processor", "step", "phase", "start", "end"});
    for (const auto& r : records)
        w.row({std::to_string(r.processor), std::to_string(r.step), to_string(r.phase), format(r.start),
               format(r.end)});
}

std::vector<ProfileRecord> read_profile_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "processor,step,phase,start,end")
        throw std::invalid_argument("profile CSV: unexpected header");
    std::vector<ProfileRecord> out;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string p, v, ph, s, e;
        if (!std::getline(ss, p, ',') || !std::getline(ss, v, ',') || !std::getline(ss, ph, ',') ||
            !std::getline(ss, s, ',') || !std::getline(ss, e, ','))
            throw std::invalid_argument("profile CSV: malformed line: " + line);
        out.push_back({std::stoul(p), std::stoul(v), parse_phase(ph), std::stod(s), std::stod(e)});
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string svg_lines(const std::vector<Series>& series, const PlotOptions& opt)
{
    const double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double y) { return opt.logy ? std::log10(y) : y; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opt.logy && !(s.y[i] > 0.0))
                continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0)
        y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
       << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 + (y1 - y0) * i / 4.0;
        const double yv = opt.logy ? std::pow(10.0, fy) : fy;
        os << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">"
           << tick_label(fx) << "</text>\n";
        os << "<text x=\"" << L - 5 << "\" y=\"" << fixed(H - B - (fy - y0) / (y1 - y0) * (H - T - B) + 4)
           << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
       << escape(opt.xlabel) << "</text>\n"
       << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
       << (T + H - B) / 2 << ")\">" << escape(opt.ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % 8];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opt.logy && !(s.y[i] > 0.0))
                continue;
            os << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        const double ly = T + 15 + 16.0 * static_cast<double>(k);
        os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_gantt(const std::vector<ProfileRecord>& records, const std::string& title)
{
    std::size_t P = 0;
    double end = 0.0;
    for (const auto& r : records) {
        P = std::max(P, r.processor + 1);
        end = std::max(end, r.end);
    }
    if (end <= 0.0)
        end = 1.0;
    const double W = 800, L = 60, R = 20, T = 40, row = 22;
    const double H = T + row * static_cast<double>(P) + 40;
    auto px = [&](double t) { return L + t / end * (W - L - R); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    for (std::size_t p = 0; p < P; ++p)
        os << "<text x=\"" << L - 5 << "\" y=\"" << fixed(T + row * p + 15) << "\" text-anchor=\"end\">p"
           << p + 1 << "</text>\n";
    for (const auto& r : records) {
        const char* fill = r.phase == Phase::wait ? "#404040" : (r.phase == Phase::move ? "#c8c8c8" : "#9ecae1");
        os << "<rect x=\"" << fixed(px(r.start), 2) << "\" y=\"" << fixed(T + row * r.processor + 2)
           << "\" width=\"" << fixed(std::max(0.0, px(r.end) - px(r.start)), 2) << "\" height=\"" << row - 4
           << "\" fill=\"" << fill << "\"/>\n";
    }
    os << "<text x=\"" << L << "\" y=\"" << fixed(H - 12) << "\">0</text>\n"
       << "<text x=\"" << W - R << "\" y=\"" << fixed(H - 12) << "\" text-anchor=\"end\">" << tick_label(end)
       << " (virtual s)</text>\n"
       << "<text x=\"" << W / 2 << "\" y=\"" << fixed(H - 12)
       << "\" text-anchor=\"middle\">light: move, blue: weight/resample, dark: wait</text>\n"
       << "</svg>\n";
    return os.str();
}

}  // namespace anytime::io
