#include "climbtrace/cli.hpp"

#include <sys/stat.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "climbtrace/error.hpp"
#include "climbtrace/graph.hpp"
#include "climbtrace/ingest.hpp"
#include "climbtrace/report.hpp"
#include "climbtrace/service.hpp"
#include "climbtrace/store.hpp"
#include "climbtrace/videosync.hpp"

namespace climbtrace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDefaultDir = "climbs";

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageReadFailure, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::StorageWriteFailure, "cannot write " + path.string());
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::int64_t file_mtime_ms(const fs::path& path) {
    struct stat st {};
    if (::stat(path.c_str(), &st) != 0) return 0;
    return static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000 + st.st_mtim.tv_nsec / 1000000;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

void print_report(std::ostream& out, const ClimbRecord& record, const SmoothnessReport& report) {
    out << "climb          " << record.id << "\n";
    out << "title          " << record.title << "\n";
    out << "recorded       " << default_title(record.recorded_at_ms) << " UTC\n";
    out << "duration       " << fixed(report.duration_s, 2) << " s\n";
    out << "min            " << fixed(report.min, 4) << " g\n";
    out << "max            " << fixed(report.max, 4) << " g\n";
    out << "mean           " << fixed(report.mean, 6) << " g\n";
    out << "variance       " << fixed(report.variance, 6) << " g^2\n";
    out << "mean_sq_diff   " << fixed(report.mean_sq_diff, 6) << " g^2\n";
    out << "lag1_autocorr  "
        << (report.lag1_autocorr ? fixed(*report.lag1_autocorr, 6) : std::string("n/a")) << "\n";
    out << "score          " << report.display_score << "\n";
    out << "per-second    ";
    for (const WindowScore& w : report.per_second_scores) out << ' ' << w.score;
    out << "\n";
}

json analyze_json(const ClimbRecord& record) {
    json doc = report_json(analyze(record));
    doc["id"] = record.id;
    doc["title"] = record.title;
    return doc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Climbing accelerometer trace analysis and review"};
    app.name("climbtrace");
    app.require_subcommand(1);

    std::string dir;
    app.add_option("--dir", dir, "Climb storage directory")->envname("CLIMBTRACE_DIR");
    bool as_json = false;
    app.add_flag("--json", as_json, "Machine-readable output");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Import an accelerometer CSV as a new climb");
    std::string csv_path;
    std::string title;
    std::optional<std::int64_t> recorded_at;
    double trim_lead_s = 0.0;
    ingest->add_option("csv", csv_path, "CSV with t,ax,ay,az or t,mag columns")->required();
    ingest->add_option("--title", title, "Climb title");
    ingest->add_option("--recorded-at-ms", recorded_at, "Recording start, epoch milliseconds");
    ingest->add_option("--trim-lead", trim_lead_s, "Seconds dropped from the start")
        ->check(CLI::NonNegativeNumber);

    auto* list = app.add_subcommand("list", "List stored climbs, newest first");

    std::string id;
    auto* analyze_cmd = app.add_subcommand("analyze", "Smoothness report for a climb");
    analyze_cmd->add_option("id", id, "Climb id or unique prefix")->required();

    auto* crop = app.add_subcommand("crop", "Drop everything after a point in time");
    double cut_s = 0.0;
    crop->add_option("id", id)->required();
    crop->add_option("--at", cut_s, "Cut time in seconds")->required();

    auto* rename = app.add_subcommand("rename", "Change a climb's title");
    rename->add_option("id", id)->required();
    rename->add_option("--title", title)->required();

    auto* remove = app.add_subcommand("delete", "Delete a climb");
    remove->add_option("id", id)->required();

    auto* attach = app.add_subcommand("attach-video", "Link a video file to a climb");
    std::string video_file;
    double fps = 30.0;
    std::optional<std::int64_t> offset_ms;
    attach->add_option("id", id)->required();
    attach->add_option("--file", video_file, "Video filename")->required();
    attach->add_option("--fps", fps, "Video frame rate")->check(CLI::PositiveNumber);
    attach->add_option("--offset-ms", offset_ms, "Video time minus trace time, ms");

    auto* export_cmd = app.add_subcommand("export", "Write a climb file");
    std::string out_path;
    export_cmd->add_option("id", id)->required();
    export_cmd->add_option("--out", out_path, "Output path (stdout when omitted)");

    auto* import_cmd = app.add_subcommand("import", "Import a climb file");
    std::string in_path;
    import_cmd->add_option("--file", in_path, "Climb JSON file")->required();

    auto* graph = app.add_subcommand("graph", "Render a climb as SVG");
    std::string mode = "detail";
    Box box;
    bool labels = false;
    graph->add_option("id", id)->required();
    graph->add_option("--mode", mode)->check(CLI::IsMember({"detail", "thumbnail"}));
    graph->add_option("--out", out_path, "SVG output path")->required();
    graph->add_option("--box-width", box.width, "Thumbnail width, px")->check(CLI::PositiveNumber);
    graph->add_option("--box-height", box.height, "Graph height, px")->check(CLI::PositiveNumber);
    graph->add_flag("--labels", labels, "Print per-second scores");

    auto* synth = app.add_subcommand("synth", "Write a synthetic climb CSV");
    SynthParams params;
    synth->add_option("--out", out_path, "CSV output path")->required();
    synth->add_option("--duration", params.duration_s)->check(CLI::PositiveNumber);
    synth->add_option("--jerk-rate", params.jerk_rate)->check(CLI::NonNegativeNumber);
    synth->add_option("--amplitude", params.jerk_amplitude)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", params.seed);

    auto* serve = app.add_subcommand("serve", "Run the local review service");
    ServiceOptions service_options;
    std::string ui_dir;
    serve->add_option("--port", service_options.port)->check(CLI::Range(0, 65535));
    serve->add_option("--host", service_options.host);
    serve->add_option("--ui", ui_dir, "Directory of browser UI assets");

    for (auto* sub : app.get_subcommands({})) {
        sub->add_option("--dir", dir, "Climb storage directory")->envname("CLIMBTRACE_DIR");
        sub->add_flag("--json", as_json, "Machine-readable output");
    }

    std::vector<std::string> argv_storage{"climbtrace"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    if (dir.empty()) dir = kDefaultDir;
    ClimbStore store{fs::path(dir)};

    try {
        if (*ingest) {
            const fs::path path(csv_path);
            RawSampleLog log = parse_csv(read_text(path));
            if (!recorded_at) {
                recorded_at = parse_filename_epoch(path.filename().string());
                if (!recorded_at) recorded_at = file_mtime_ms(path);
            }
            log.source_epoch_ms = *recorded_at;
            log = trim_lead(log, trim_lead_s);
            ClimbTrace trace = resample(log);
            if (trace.size() < 2) {
                throw Error(ErrorCode::TooFewSamples, "recording is shorter than one sample step");
            }
            ClimbRecord record = make_record(std::move(trace), title);
            const SmoothnessReport report = analyze(record);
            const fs::path file = store.save(record);
            if (as_json) {
                json doc = summary_json(record);
                doc["file"] = file.string();
                doc["gap_flags"] = record.trace.gap_flags.size();
                out << doc.dump() << "\n";
            } else {
                out << record.id << "\n";
                out << "time elapsed " << fixed(report.duration_s, 2) << " s\n";
                out << "score " << report.display_score << "\n";
                if (!record.trace.gap_flags.empty()) {
                    err << "warning: " << record.trace.gap_flags.size()
                        << " sampling gap(s) longer than " << kGapThresholdS << " s\n";
                }
            }
        } else if (*list) {
            const auto records = store.list();
            if (as_json) {
                json doc = json::array();
                for (const auto& r : records) doc.push_back(summary_json(r));
                out << doc.dump() << "\n";
            } else {
                out << pad("ID", 10) << pad("TITLE", 28) << pad("DATE", 21) << pad("DURATION", 10)
                    << "SCORE\n";
                for (const auto& r : records) {
                    out << pad(r.id.substr(0, 8), 10) << pad(r.title, 28)
                        << pad(default_title(r.recorded_at_ms), 21)
                        << pad(fixed(r.trace.duration_s(), 2) + "s", 10)
                        << analyze(r).display_score << "\n";
                }
            }
        } else if (*analyze_cmd) {
            const ClimbRecord record = store.get(id);
            if (as_json) {
                out << analyze_json(record).dump() << "\n";
            } else {
                print_report(out, record, analyze(record));
            }
        } else if (*crop) {
            const std::string previous = store.resolve(id);
            const ClimbRecord record = store.crop(previous, cut_s);
            if (as_json) {
                json doc = summary_json(record);
                doc["previous_id"] = previous;
                out << doc.dump() << "\n";
            } else {
                out << record.id << "\n";
                out << "time elapsed " << fixed(record.trace.duration_s(), 2) << " s\n";
                out << "score " << analyze(record).display_score << "\n";
            }
        } else if (*rename) {
            const ClimbRecord record = store.rename(id, title);
            if (as_json) {
                out << summary_json(record).dump() << "\n";
            } else {
                out << record.id << " " << record.title << "\n";
            }
        } else if (*remove) {
            const std::string full = store.resolve(id);
            store.remove(full);
            if (as_json) {
                out << json{{"deleted", full}}.dump() << "\n";
            } else {
                out << "deleted " << full << "\n";
            }
        } else if (*attach) {
            const ClimbRecord record = attach_video(store, id, video_file, fps, offset_ms);
            if (as_json) {
                json doc = video_json(*record.video);
                doc["id"] = record.id;
                out << doc.dump() << "\n";
            } else {
                out << record.video->filename << " offset " << record.video->offset_ms
                    << " ms fps " << record.video->fps << "\n";
            }
        } else if (*export_cmd) {
            const std::string bytes = store.export_climb(id);
            if (out_path.empty()) {
                out << bytes;
            } else {
                write_text(out_path, bytes);
            }
        } else if (*import_cmd) {
            const ImportResult result = store.import_climb(read_text(in_path));
            if (as_json) {
                json doc = summary_json(result.record);
                doc["created"] = result.created;
                out << doc.dump() << "\n";
            } else {
                out << result.record.id << (result.created ? " imported" : " already present")
                    << "\n";
            }
        } else if (*graph) {
            const ClimbRecord record = store.get(id);
            const GraphSpec spec = layout(record.trace, parse_graph_mode(mode), box);
            write_text(out_path, render_svg(spec, {labels}));
            if (as_json) {
                out << json{{"file", out_path}, {"width", spec.width}, {"height", spec.height}}
                           .dump()
                    << "\n";
            } else {
                out << out_path << " " << spec.width << "x" << spec.height << "\n";
            }
        } else if (*synth) {
            const RawSampleLog log = synth_climb(params);
            std::string csv = "t,ax,ay,az\n";
            char line[128];
            for (const RawSample& s : log.samples) {
                std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f\n", s.t, (*s.axes)[0],
                              (*s.axes)[1], (*s.axes)[2]);
                csv += line;
            }
            write_text(out_path, csv);
            out << out_path << " " << log.samples.size() << " samples\n";
        } else if (*serve) {
            if (!ui_dir.empty()) service_options.ui_dir = fs::path(ui_dir);
            const auto loaded = store.load_all();
            for (const auto& skip : loaded.skipped) {
                err << "skipped " << skip.file.string() << ": " << skip.reason << "\n";
            }
            ReviewService service(store, service_options);
            const int port = service.bind();
            err << "serving " << loaded.records.size() << " climb(s) from " << dir << " on http://"
                << service_options.host << ":" << port << "\n";
            service.run();
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace climbtrace
