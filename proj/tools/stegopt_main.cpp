// Command-line front door: histogram extraction, coding optimization
// (exhaustive and iterative MILP), payload-distortion curves, and the
// reversible embed/extract pipeline on binary PGM images.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stegopt/brute.hpp"
#include "stegopt/codec.hpp"
#include "stegopt/imaging.hpp"
#include "stegopt/milp.hpp"
#include "stegopt/model.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 5;

bool debug_log_enabled() {
    const char* level = std::getenv("STEGOPT_LOG");
    return level != nullptr && std::string(level) == "debug";
}

void debug_log(const std::string& msg) {
    if (debug_log_enabled()) std::cerr << "[stegopt] " << msg << "\n";
}

stegopt::AbsErrorHistogram load_histogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw stegopt::IoError("cannot open " + path);
    return stegopt::read_histogram_csv(in);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw stegopt::IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw stegopt::IoError("short write to " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw stegopt::IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

stegopt::MessageBits message_from_bytes(const std::vector<std::uint8_t>& bytes) {
    stegopt::MessageBits m;
    m.bytes = bytes;
    m.bit_count = bytes.size() * 8;
    return m;
}

json link_vector_json(const stegopt::LinkVector& x) { return json(x); }

stegopt::LinkVector link_vector_from_json(const json& j) {
    if (!j.contains("x") || !j["x"].is_array())
        throw stegopt::IoError("link vector JSON needs an \"x\" array");
    return j["x"].get<stegopt::LinkVector>();
}

struct GridSpec {
    double start = 0, stop = 0, step = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' ||
        g.step <= 0 || g.stop < g.start)
        throw CLI::ValidationError("--grid", "expected start:stop:step with step > 0");
    return g;
}

int resolve_n(const std::optional<int>& flag_n, const stegopt::AbsErrorHistogram& hist,
              int theta) {
    if (flag_n) return *flag_n;
    const int n = stegopt::choose_n(hist, theta);
    debug_log("auto-selected n = " + std::to_string(n));
    return n;
}

json solve_brute_json(const stegopt::ProblemSpec& spec) {
    const auto res = stegopt::brute_force_optimize(spec);
    return json{{"x", link_vector_json(res.x)},
                {"capacity_bits", res.eval.capacity},
                {"distortion", res.eval.distortion},
                {"evaluated_count", res.evaluated_count}};
}

json solve_milp_json(const stegopt::ProblemSpec& spec, int max_iter) {
    stegopt::IterateOptions opts;
    opts.max_iter = max_iter;
    const auto res = stegopt::iterate_optimize(spec, opts);
    json trace = json::array();
    for (const auto& rec : res.trace)
        trace.push_back(json{{"x", link_vector_json(rec.x)},
                             {"milp_objective", rec.milp_objective},
                             {"true_distortion", rec.true_distortion},
                             {"feasible", rec.feasible}});
    return json{{"x", link_vector_json(res.x)},
                {"capacity_bits", res.eval.capacity},
                {"distortion", res.eval.distortion},
                {"iterations", res.iterations},
                {"converged", res.converged},
                {"per_iteration_trace", trace}};
}

std::string format_x_field(const stegopt::LinkVector& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(x[i]);
    }
    return s;
}

int run_curve(const stegopt::AbsErrorHistogram& hist, int n, int theta, const GridSpec& grid,
              const std::string& method, int max_iter, const std::string& out_path) {
    std::vector<double> payloads;
    for (double p = grid.start; p <= grid.stop + 1e-9; p += grid.step) payloads.push_back(p);

    struct Row {
        double payload;
        std::string status;
        stegopt::LinkVector x;
        stegopt::EvalResult eval;
    };
    auto solve_point = [&](double payload) {
        stegopt::ProblemSpec spec{n, theta, payload, hist};
        Row row{payload, "ok", {}, {}};
        try {
            if (method == "brute") {
                const auto res = stegopt::brute_force_optimize(spec);
                row.x = res.x;
                row.eval = res.eval;
            } else {
                stegopt::IterateOptions opts;
                opts.max_iter = max_iter;
                const auto res = stegopt::iterate_optimize(spec, opts);
                row.x = res.x;
                row.eval = res.eval;
            }
        } catch (const stegopt::InfeasibleError&) {
            row.status = "infeasible";
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        return row;
    };

    std::vector<std::future<Row>> futures;
    futures.reserve(payloads.size());
    for (double p : payloads)
        futures.push_back(std::async(std::launch::async, solve_point, p));

    const double query_count = static_cast<double>(hist.total());
    std::ostringstream csv;
    csv << "payload_bits,method,status,distortion,distortion_per_query,capacity_bits,x\n";
    bool all_infeasible = true;
    for (auto& f : futures) {
        const Row row = f.get();
        csv << row.payload << ',' << method << ',' << row.status << ',';
        if (row.status == "ok") {
            all_infeasible = false;
            csv << row.eval.distortion << ',' << row.eval.distortion / query_count << ','
                << row.eval.capacity << ',' << format_x_field(row.x);
        } else {
            csv << ",,,";
        }
        csv << '\n';
    }
    write_text(out_path, csv.str());
    return all_infeasible && !payloads.empty() ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal reversible steganographic coding on prediction-error histograms"};
    app.require_subcommand(1);

    // --- histogram ---
    auto* cmd_hist = app.add_subcommand("histogram", "extract the absolute error histogram CSV");
    std::string hist_image, hist_out;
    cmd_hist->add_option("--image", hist_image, "cover image (binary PGM)")->required();
    cmd_hist->add_option("--out", hist_out, "output CSV path (default stdout)");

    // --- brute ---
    auto* cmd_brute = app.add_subcommand("brute", "exhaustive minimum-distortion coding search");
    std::string brute_hist, brute_out;
    std::optional<int> brute_n;
    int brute_theta = 1;
    double brute_payload = 0;
    cmd_brute->add_option("--histogram", brute_hist, "histogram CSV")->required();
    cmd_brute->add_option("--n", brute_n, "max carrier magnitude (default: auto)");
    cmd_brute->add_option("--theta", brute_theta, "link quota")->required();
    cmd_brute->add_option("--payload", brute_payload, "required capacity in bits")->required();
    cmd_brute->add_option("--out", brute_out, "output JSON path (default stdout)");

    // --- optimize ---
    auto* cmd_opt = app.add_subcommand("optimize", "iterative linearized MILP coding search");
    std::string opt_hist, opt_out;
    std::optional<int> opt_n;
    int opt_theta = 1, opt_max_iter = 20;
    double opt_payload = 0;
    cmd_opt->add_option("--histogram", opt_hist, "histogram CSV")->required();
    cmd_opt->add_option("--n", opt_n, "max carrier magnitude (default: auto)");
    cmd_opt->add_option("--theta", opt_theta, "link quota")->required();
    cmd_opt->add_option("--payload", opt_payload, "required capacity in bits")->required();
    cmd_opt->add_option("--max-iter", opt_max_iter, "iteration cap");
    cmd_opt->add_option("--out", opt_out, "output JSON path (default stdout)");

    // --- curve ---
    auto* cmd_curve = app.add_subcommand("curve", "payload-distortion curve over a payload grid");
    std::string curve_hist, curve_grid, curve_method = "milp", curve_out;
    std::optional<int> curve_n;
    int curve_theta = 1, curve_max_iter = 20;
    cmd_curve->add_option("--histogram", curve_hist, "histogram CSV")->required();
    cmd_curve->add_option("--n", curve_n, "max carrier magnitude (default: auto)");
    cmd_curve->add_option("--theta", curve_theta, "link quota")->required();
    cmd_curve->add_option("--grid", curve_grid, "payload grid start:stop:step in bits")->required();
    cmd_curve->add_option("--method", curve_method, "brute or milp")
        ->check(CLI::IsMember({"brute", "milp"}));
    cmd_curve->add_option("--max-iter", curve_max_iter, "iteration cap (milp)");
    cmd_curve->add_option("--out", curve_out, "output CSV path (default stdout)");

    // --- embed ---
    auto* cmd_embed = app.add_subcommand("embed", "embed a message reversibly into a PGM image");
    std::string embed_image, embed_message, embed_x_file, embed_out, embed_x_out, embed_report;
    bool embed_auto = false;
    std::optional<int> embed_n;
    int embed_theta = 1, embed_max_iter = 20;
    std::optional<double> embed_payload;
    std::optional<std::size_t> embed_random_bits;
    std::uint64_t embed_seed = 0;
    cmd_embed->add_option("--image", embed_image, "cover image (binary PGM)")->required();
    cmd_embed->add_option("--message", embed_message, "message file (raw bytes)");
    cmd_embed->add_option("--random-bits", embed_random_bits, "generate a random message of this many bits");
    cmd_embed->add_option("--seed", embed_seed, "seed for --random-bits");
    cmd_embed->add_option("--x", embed_x_file, "link vector JSON sidecar");
    cmd_embed->add_flag("--auto", embed_auto, "derive x by optimizing on the image's own histogram");
    cmd_embed->add_option("--n", embed_n, "max carrier magnitude for --auto (default: auto)");
    cmd_embed->add_option("--theta", embed_theta, "link quota for --auto");
    cmd_embed->add_option("--payload", embed_payload, "payload bits for --auto (default: framed message length)");
    cmd_embed->add_option("--max-iter", embed_max_iter, "iteration cap for --auto");
    cmd_embed->add_option("--out", embed_out, "stego image output path")->required();
    cmd_embed->add_option("--x-out", embed_x_out, "write the used link vector as a JSON sidecar");
    cmd_embed->add_option("--report", embed_report, "embedding report JSON (default stdout)");

    // --- extract ---
    auto* cmd_extract = app.add_subcommand("extract", "recover the cover image and message");
    std::string ext_image, ext_x_file, ext_out_image, ext_out_message, ext_report;
    cmd_extract->add_option("--image", ext_image, "stego image (binary PGM)")->required();
    cmd_extract->add_option("--x", ext_x_file, "link vector JSON sidecar")->required();
    cmd_extract->add_option("--out-image", ext_out_image, "recovered cover output path")->required();
    cmd_extract->add_option("--out-message", ext_out_message, "recovered message output path");
    cmd_extract->add_option("--report", ext_report, "extraction report JSON (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_hist->parsed()) {
            const auto image = stegopt::read_pgm_file(hist_image);
            const auto hist = stegopt::abs_error_histogram(image);
            std::ostringstream csv;
            stegopt::write_histogram_csv(hist, csv);
            write_text(hist_out, csv.str());
            return kExitOk;
        }

        if (cmd_brute->parsed()) {
            const auto hist = load_histogram(brute_hist);
            const int n = resolve_n(brute_n, hist, brute_theta);
            const json out = solve_brute_json({n, brute_theta, brute_payload, hist});
            write_text(brute_out, out.dump(2) + "\n");
            return kExitOk;
        }

        if (cmd_opt->parsed()) {
            const auto hist = load_histogram(opt_hist);
            const int n = resolve_n(opt_n, hist, opt_theta);
            const json out = solve_milp_json({n, opt_theta, opt_payload, hist}, opt_max_iter);
            write_text(opt_out, out.dump(2) + "\n");
            return kExitOk;
        }

        if (cmd_curve->parsed()) {
            const auto hist = load_histogram(curve_hist);
            const int n = resolve_n(curve_n, hist, curve_theta);
            return run_curve(hist, n, curve_theta, parse_grid(curve_grid), curve_method,
                             curve_max_iter, curve_out);
        }

        if (cmd_embed->parsed()) {
            const auto cover = stegopt::read_pgm_file(embed_image);

            stegopt::MessageBits message;
            if (!embed_message.empty() && embed_random_bits)
                throw CLI::ValidationError("--message", "use either --message or --random-bits");
            if (!embed_message.empty())
                message = message_from_bytes(read_bytes(embed_message));
            else if (embed_random_bits)
                message = stegopt::random_message(*embed_random_bits, embed_seed);
            else
                throw CLI::ValidationError("--message", "one of --message or --random-bits is required");

            stegopt::LinkVector x;
            const auto hist = stegopt::abs_error_histogram(cover);
            int used_n = -1;
            if (embed_auto) {
                used_n = resolve_n(embed_n, hist, embed_theta);
                const double payload = embed_payload
                                           ? *embed_payload
                                           : static_cast<double>(message.bit_count) + 32.0;
                stegopt::IterateOptions opts;
                opts.max_iter = embed_max_iter;
                x = stegopt::iterate_optimize({used_n, embed_theta, payload, hist}, opts).x;
            } else if (!embed_x_file.empty()) {
                x = link_vector_from_json(json::parse(read_bytes(embed_x_file)));
                used_n = static_cast<int>(x.size()) - 1;
            } else {
                throw CLI::ValidationError("--x", "one of --x or --auto is required");
            }

            const auto stego = stegopt::encode(cover, x, message);
            stegopt::write_pgm_file(stego, embed_out);
            if (!embed_x_out.empty()) {
                const json sidecar{{"n", used_n}, {"x", link_vector_json(x)}};
                write_text(embed_x_out, sidecar.dump(2) + "\n");
            }
            const auto metrics = stegopt::mse_psnr(cover, stego);
            const auto map = stegopt::build_coding_map(x);
            const json report{{"bits_embedded", message.bit_count},
                              {"psnr_db", metrics.psnr},
                              {"mse", metrics.mse},
                              {"n", used_n},
                              {"capacity_bits", stegopt::exact_capacity_bits(map, hist)},
                              {"x", link_vector_json(x)},
                              {"stego", embed_out}};
            write_text(embed_report, report.dump(2) + "\n");
            return kExitOk;
        }

        if (cmd_extract->parsed()) {
            const auto stego = stegopt::read_pgm_file(ext_image);
            const auto x = link_vector_from_json(json::parse(read_bytes(ext_x_file)));
            auto [cover, message] = stegopt::decode(stego, x);
            stegopt::write_pgm_file(cover, ext_out_image);
            if (!ext_out_message.empty()) {
                std::ofstream out(ext_out_message, std::ios::binary);
                if (!out) throw stegopt::IoError("cannot open " + ext_out_message + " for writing");
                out.write(reinterpret_cast<const char*>(message.bytes.data()),
                          static_cast<std::streamsize>(message.bytes.size()));
            }
            const json report{{"bits_extracted", message.bit_count},
                              {"cover", ext_out_image},
                              {"message_file", ext_out_message}};
            write_text(ext_report, report.dump(2) + "\n");
            return kExitOk;
        }
    } catch (const stegopt::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const stegopt::CapacityExceededError& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const stegopt::EmbeddingOverflowError& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const stegopt::NonEmptyReservedBinsError& e) {
        std::cerr << "reserved bins: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const stegopt::CorruptStreamError& e) {
        std::cerr << "corrupt stream: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const stegopt::ImageFormatError& e) {
        std::cerr << "image: " << e.what() << "\n";
        return kExitIo;
    } catch (const stegopt::CsvFormatError& e) {
        std::cerr << "csv: " << e.what() << "\n";
        return kExitIo;
    } catch (const stegopt::IoError& e) {
        std::cerr << "io: " << e.what() << "\n";
        return kExitIo;
    } catch (const json::exception& e) {
        std::cerr << "json: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
