#include "overton/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace overton {

namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    return out;
}

json clusters_to_json(const std::vector<Cluster>& clusters) {
    json arr = json::array();
    for (const auto& c : clusters) {
        arr.push_back({{"center", c.center}, {"size", c.size}});
    }
    return arr;
}

json summary_json(const StateSummary& s) {
    return json{{"t", s.time},
                {"mean", s.mean},
                {"std", s.stddev},
                {"n_clusters", s.clusters.size()},
                {"clusters", clusters_to_json(s.clusters)},
                {"center", s.center},
                {"amplitude", s.amplitude},
                {"n_primary", s.n_primary},
                {"effective_weights", s.effective_weights}};
}

}  // namespace

StateSummary summarize_state(const std::vector<double>& x, std::int64_t time,
                             double epsilon, const MetricParams& params) {
    StateSummary s;
    s.time = time;
    const auto [mean, sd] = mean_std(x);
    s.mean = mean;
    s.stddev = sd;
    s.clusters = detect_clusters(x, params.gap_tolerance).clusters;
    const PrimaryClusterReport report =
        primary_interval(x, epsilon, params.delta, params.h, params.alpha);
    s.center = report.center;
    s.amplitude = report.amplitude;
    s.n_primary = report.surviving.size();
    s.effective_weights = report.effective_weights;
    return s;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string summary_to_json(const StateSummary& summary, StopReason reason,
                            std::int64_t stop_time) {
    json j = summary_json(summary);
    j["stop_reason"] = stop_reason_name(reason);
    j["stop_time"] = stop_time;
    return j.dump(2);
}

void write_trajectory_jsonl(const std::string& path, const Trajectory& traj,
                            const ManipulatorGroup& group) {
    auto out = open_for_write(path);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        json record{{"t", traj.snapshots[i].time},
                    {"opinions", traj.snapshots[i].opinions}};
        if (group.k > 0) {
            record["manipulator"] = traj.manipulator_opinions[i];
        } else {
            record["manipulator"] = nullptr;
        }
        out << record.dump() << '\n';
    }
}

void write_summary_json(const std::string& path, const StateSummary& summary,
                        StopReason reason, std::int64_t stop_time) {
    auto out = open_for_write(path);
    out << summary_to_json(summary, reason, stop_time) << '\n';
}

std::vector<StateSummary> analyze_jsonl(const std::string& path,
                                        double epsilon,
                                        const MetricParams& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::vector<StateSummary> summaries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": " + e.what());
        }
        if (!record.contains("opinions") || !record["opinions"].is_array()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": record has no 'opinions' array");
        }
        const std::vector<double> x =
            record["opinions"].get<std::vector<double>>();
        const std::int64_t t =
            record.contains("t") ? record["t"].get<std::int64_t>() : 0;
        summaries.push_back(summarize_state(x, t, epsilon, params));
    }
    return summaries;
}

std::string sweep_csv_text(const std::vector<CellResult>& cells) {
    std::ostringstream out;
    out << "K,t_delta,snapshot,mean_of_means,mean_of_stds,mean_n_clusters,"
           "mean_center,mean_amplitude,mean_n_primary\n";
    for (const auto& cell : cells) {
        for (const auto& snap : cell.snapshots) {
            out << cell.k << ',' << cell.t_delta << ',' << snap.label << ','
                << format_double(snap.mean_of_means) << ','
                << format_double(snap.mean_of_stds) << ','
                << format_double(snap.mean_n_clusters) << ','
                << format_double(snap.mean_center) << ','
                << format_double(snap.mean_amplitude) << ','
                << format_double(snap.mean_n_primary) << '\n';
        }
    }
    return out.str();
}

void write_sweep_csv(const std::string& path,
                     const std::vector<CellResult>& cells) {
    auto out = open_for_write(path);
    out << sweep_csv_text(cells);
}

void write_weights_csv(const std::string& path,
                       const std::vector<CellResult>& cells) {
    constexpr double kBinWidth = 0.1;
    constexpr std::size_t kBins = 20;  // [0, 2) plus a catch-all above

    // label -> counts, in first-seen order
    std::vector<std::string> labels;
    std::map<std::string, std::vector<std::size_t>> counts;
    for (const auto& cell : cells) {
        for (const auto& snap : cell.snapshots) {
            auto it = counts.find(snap.label);
            if (it == counts.end()) {
                labels.push_back(snap.label);
                it = counts.emplace(snap.label,
                                    std::vector<std::size_t>(kBins + 1, 0))
                         .first;
            }
            for (double w : snap.effective_weights) {
                const auto bin = static_cast<std::size_t>(
                    std::max(0.0, std::floor(w / kBinWidth)));
                it->second[std::min(bin, kBins)]++;
            }
        }
    }

    auto out = open_for_write(path);
    out << "snapshot,bin_low,bin_high,count\n";
    for (const auto& label : labels) {
        const auto& c = counts.at(label);
        for (std::size_t b = 0; b <= kBins; ++b) {
            const double lo = static_cast<double>(b) * kBinWidth;
            out << label << ',' << format_double(lo) << ',';
            if (b == kBins) {
                out << "inf";
            } else {
                out << format_double(lo + kBinWidth);
            }
            out << ',' << c[b] << '\n';
        }
    }
}

namespace {

double svg_x(std::int64_t t, std::int64_t t_max, double width) {
    const double span = t_max > 0 ? static_cast<double>(t_max) : 1.0;
    return 50.0 + (width - 70.0) * static_cast<double>(t) / span;
}

double svg_y(double opinion, double height) {
    return 20.0 + (height - 50.0) * (1.0 - opinion) / 2.0;
}

// Dark blue (-1) through grey (0) to yellow (+1).
std::string heat_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const auto lerp = [](double a, double b, double u) {
        return a + (b - a) * u;
    };
    double r, g, b;
    if (v < 0.0) {
        const double u = v + 1.0;  // 0 at -1, 1 at 0
        r = lerp(20, 128, u);
        g = lerp(40, 128, u);
        b = lerp(120, 128, u);
    } else {
        r = lerp(128, 245, v);
        g = lerp(128, 225, v);
        b = lerp(128, 40, v);
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r),
                  static_cast<int>(g), static_cast<int>(b));
    return buf;
}

}  // namespace

void write_trajectory_svg(const std::string& path, const Trajectory& traj,
                          const ManipulatorGroup& group) {
    const double width = 800.0;
    const double height = 500.0;
    const std::int64_t t_max = traj.stop_time;

    auto out = open_for_write(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"50\" y1=\"" << svg_y(0.0, height) << "\" x2=\""
        << width - 20 << "\" y2=\"" << svg_y(0.0, height)
        << "\" stroke=\"#cccccc\"/>\n";
    out << "<line x1=\"50\" y1=\"" << svg_y(1.0, height) << "\" x2=\"50\" y2=\""
        << svg_y(-1.0, height) << "\" stroke=\"#333333\"/>\n";
    for (double tick : {-1.0, 0.0, 1.0}) {
        out << "<text x=\"8\" y=\"" << svg_y(tick, height) + 4
            << "\" font-size=\"12\">" << tick << "</text>\n";
    }

    const std::size_t n = traj.snapshots.empty() ? 0 : traj.snapshots[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        out << "<polyline fill=\"none\" stroke=\"#2266aa\" stroke-width=\"0.6\" "
               "points=\"";
        for (const auto& snap : traj.snapshots) {
            out << svg_x(snap.time, t_max, width) << ','
                << svg_y(snap.opinions[i], height) << ' ';
        }
        out << "\"/>\n";
    }
    if (group.k > 0) {
        out << "<polyline fill=\"none\" stroke=\"#cc3333\" stroke-width=\"1.5\" "
               "stroke-dasharray=\"6 4\" points=\"";
        for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
            out << svg_x(traj.snapshots[s].time, t_max, width) << ','
                << svg_y(traj.manipulator_opinions[s], height) << ' ';
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

void write_heatmap_svgs(const std::string& base_path,
                        const std::vector<CellResult>& cells) {
    if (cells.empty()) {
        return;
    }
    // recover the axes from the cell list
    std::vector<std::size_t> ks;
    std::vector<std::int64_t> tds;
    for (const auto& cell : cells) {
        if (std::find(ks.begin(), ks.end(), cell.k) == ks.end()) {
            ks.push_back(cell.k);
        }
        if (std::find(tds.begin(), tds.end(), cell.t_delta) == tds.end()) {
            tds.push_back(cell.t_delta);
        }
    }

    std::vector<std::string> labels;
    for (const auto& snap : cells.front().snapshots) {
        labels.push_back(snap.label);
    }

    const std::string stem =
        base_path.size() > 4 && base_path.substr(base_path.size() - 4) == ".svg"
            ? base_path.substr(0, base_path.size() - 4)
            : base_path;

    for (std::size_t li = 0; li < labels.size(); ++li) {
        const double cell_px = 14.0;
        const double width = 70.0 + cell_px * static_cast<double>(tds.size());
        const double height = 50.0 + cell_px * static_cast<double>(ks.size());
        auto out = open_for_write(stem + "-" + labels[li] + ".svg");
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"10\" y=\"16\" font-size=\"12\">mean opinion ("
            << labels[li] << "), K rows / t_delta columns</text>\n";
        for (const auto& cell : cells) {
            const auto kr = static_cast<double>(
                std::find(ks.begin(), ks.end(), cell.k) - ks.begin());
            const auto tc = static_cast<double>(
                std::find(tds.begin(), tds.end(), cell.t_delta) - tds.begin());
            out << "<rect x=\"" << 50.0 + tc * cell_px << "\" y=\""
                << 30.0 + kr * cell_px << "\" width=\"" << cell_px
                << "\" height=\"" << cell_px << "\" fill=\""
                << heat_color(cell.snapshots[li].mean_of_means) << "\"/>\n";
        }
        out << "</svg>\n";
    }
}

}  // namespace overton
