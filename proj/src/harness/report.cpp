#include "ibfsi/errors.hpp"
#include "ibfsi/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ibfsi {

void write_csv(const TimeSeries& series, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    for (size_t c = 0; c < series.columns.size(); ++c)
        std::fprintf(fp, "%s%s", series.columns[c].c_str(),
                     c + 1 == series.columns.size() ? "\r\n" : ",");
    for (const auto& row : series.rows)
        for (size_t c = 0; c < row.size(); ++c)
            std::fprintf(fp, "%.17g%s", row[c], c + 1 == row.size() ? "\r\n" : ",");
    std::fclose(fp);
}

namespace {

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

double tx(double x, double x0, double x1, double w0, double w1) {
    return w0 + (x - x0) / (x1 - x0 + 1e-300) * (w1 - w0);
}

} // namespace

void write_plot_svg(const TimeSeries& series, const std::vector<std::string>& ys,
                    const std::string& title, bool log_y, const std::string& path) {
    const int tcol = series.column("t");
    if (tcol < 0 || series.rows.empty()) {
        std::ofstream(path) << "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
        return;
    }
    auto value = [&](double v) {
        return log_y ? std::log10(std::max(std::fabs(v), 1e-18)) : v;
    };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& row : series.rows) {
        x0 = std::min(x0, row[tcol]);
        x1 = std::max(x1, row[tcol]);
        for (const auto& name : ys) {
            const int c = series.column(name);
            if (c < 0) continue;
            y0 = std::min(y0, value(row[c]));
            y1 = std::max(y1, value(row[c]));
        }
    }
    if (y1 <= y0) y1 = y0 + 1.0;

    const double W = 720, H = 440, mL = 70, mR = 20, mT = 40, mB = 45;
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open " + path + " for writing");
    std::fprintf(fp,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                 "viewBox=\"0 0 %g %g\" font-family=\"sans-serif\" font-size=\"12\">\n",
                 W, H, W, H);
    std::fprintf(fp, "<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", W, H);
    std::fprintf(fp, "<text x=\"%g\" y=\"22\" text-anchor=\"middle\">%s</text>\n", W / 2,
                 title.c_str());
    std::fprintf(fp,
                 "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                 "stroke=\"black\"/>\n",
                 mL, mT, W - mL - mR, H - mT - mB);
    std::fprintf(fp, "<text x=\"%g\" y=\"%g\">%.6g</text>\n", mL, H - mB + 16, x0);
    std::fprintf(fp, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.6g</text>\n", W - mR,
                 H - mB + 16, x1);
    std::fprintf(fp, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s%.6g</text>\n", mL - 4,
                 H - mB, log_y ? "1e" : "", y0);
    std::fprintf(fp, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s%.6g</text>\n", mL - 4,
                 mT + 12, log_y ? "1e" : "", y1);
    std::fprintf(fp, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">t</text>\n", W / 2,
                 H - 10.0);

    int color = 0;
    double legend_y = mT + 16;
    for (const auto& name : ys) {
        const int c = series.column(name);
        if (c < 0) continue;
        std::fprintf(fp, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"",
                     kPalette[color % 6]);
        for (const auto& row : series.rows)
            std::fprintf(fp, "%.2f,%.2f ", tx(row[tcol], x0, x1, mL, W - mR),
                         tx(value(row[c]), y0, y1, H - mB, mT));
        std::fprintf(fp, "\"/>\n");
        std::fprintf(fp, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - mR - 130,
                     legend_y, kPalette[color % 6], name.c_str());
        legend_y += 16;
        ++color;
    }
    std::fprintf(fp, "</svg>\n");
    std::fclose(fp);
}

void emit_report(const RunResult& result, const BenchmarkConfig& cfg, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);

    write_csv(result.series, dir + "/series.csv");

    std::vector<std::string> plot_cols;
    bool log_y = false;
    switch (cfg.kind) {
    case BenchmarkKind::Membrane:
        plot_cols = {"dA"};
        log_y = true;
        break;
    case BenchmarkKind::Band: plot_cols = {"dx_max", "j_l2"}; break;
    case BenchmarkKind::Block:
    case BenchmarkKind::Cook: plot_cols = {"dy_probe", "j_l2"}; break;
    case BenchmarkKind::Channel: plot_cols = {"profile_err"}; break;
    case BenchmarkKind::TurekHron: plot_cols = {"dy_a"}; break;
    }
    write_plot_svg(result.series, plot_cols, cfg.name + " (" + cfg.kernel + ")", log_y,
                   dir + "/series.svg");

    write_field(result.final_field, dir + "/field.txt");

    for (size_t s = 0; s < result.structures.size(); ++s) {
        const Structure& st = result.structures[s];
        const std::string base = dir + "/" + st.label + "_" + std::to_string(s);
        std::FILE* fp = std::fopen((base + "_positions.csv").c_str(), "wb");
        if (!fp) throw IoError("cannot write structure positions");
        std::fprintf(fp, "X,Y,x,y\r\n");
        for (int l = 0; l < st.mesh.node_count(); ++l)
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\r\n", st.mesh.nodes[l].x,
                         st.mesh.nodes[l].y, st.state.positions[l].x, st.state.positions[l].y);
        std::fclose(fp);
        if (st.mesh.type == ElementType::Quad4) {
            const std::vector<double> J = element_jacobians(st.mesh, st.state);
            fp = std::fopen((base + "_jacobians.csv").c_str(), "wb");
            if (!fp) throw IoError("cannot write element jacobians");
            std::fprintf(fp, "element,J\r\n");
            for (size_t e = 0; e < J.size(); ++e)
                std::fprintf(fp, "%zu,%.17g\r\n", e, J[e]);
            std::fclose(fp);
        }
    }

    if (cfg.kind == BenchmarkKind::Channel) {
        const auto prof = channel_profile(cfg, result);
        std::FILE* fp = std::fopen((dir + "/profile.csv").c_str(), "wb");
        if (!fp) throw IoError("cannot write channel profile");
        std::fprintf(fp, "y,d,wall_distance,speed,speed_exact\r\n");
        for (const auto& p : prof)
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\r\n", p.y, p.d, p.wall_distance,
                         p.speed_num, p.speed_exact);
        std::fclose(fp);
    }

    nlohmann::json meta;
    meta["benchmark"] = cfg.name;
    meta["kernel"] = cfg.kernel;
    meta["mfac"] = cfg.mfac;
    meta["completed"] = result.completed;
    meta["failed"] = result.failed;
    meta["failure_reason"] = result.failure_reason;
    meta["failure_time"] = result.failure_time;
    meta["reached_steady"] = result.reached_steady;
    meta["end_time"] = result.end_time;
    std::ofstream(dir + "/run_summary.json") << meta.dump(2) << "\n";
}

} // namespace ibfsi
