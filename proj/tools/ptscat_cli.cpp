// Command-line front end: resonance search, scattering tables, branch
// predictions, Hadamard reconstruction, and the self-verification suite, all
// driven by a single JSON config. Outputs are CSV/JSON with 17-significant-
// digit floats; identical config + cache state yields byte-identical files.
//
// Exit codes: 0 success, 1 compute failure, 2 config error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptscat/asymptotics.hpp"
#include "ptscat/hadamard.hpp"
#include "ptscat/perturbed.hpp"
#include "ptscat/resonances.hpp"
#include "ptscat/serialize.hpp"
#include "ptscat/verify.hpp"

namespace fs = std::filesystem;
using ptscat::complex;
using ptscat::json;

namespace {

struct RunConfig {
    ptscat::PerturbationSpec q;
    double lambda = 0.0;
    int grid_n = 256;
    double tol = 1e-11;
    json raw;
};

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ptscat::config_error("cannot open config file: " + path);
    RunConfig cfg;
    try {
        cfg.raw = json::parse(f);
    } catch (const json::exception& e) {
        throw ptscat::config_error(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (!cfg.raw.contains("lambda"))
            throw ptscat::config_error("config: missing required field 'lambda'");
        cfg.lambda = cfg.raw.at("lambda").get<double>();
        if (cfg.lambda == 0.0)
            throw ptscat::config_error("config: lambda = 0 removes the background potential; "
                                       "this operating point is not supported");
        if (cfg.raw.contains("q") && !cfg.raw.at("q").is_null())
            cfg.q = ptscat::perturbation_from_json(cfg.raw.at("q"));
        cfg.grid_n = cfg.raw.value("grid_n", 256);
        cfg.tol = cfg.raw.value("tol", 1e-11);
        if (cfg.grid_n < 8 || cfg.grid_n % 2 != 0)
            throw ptscat::config_error("config: grid_n must be an even integer >= 8");
        if (!(cfg.tol > 0.0) || cfg.tol > 1e-3)
            throw ptscat::config_error("config: tol must lie in (0, 1e-3]");
    } catch (const json::exception& e) {
        throw ptscat::config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

// FNV-1a over the numbers that determine a kernel solve; the hex digest keys
// the cache file name.
std::string cache_key(const ptscat::PerturbationSpec& q, double lambda, int n, double tol,
                      ptscat::Side side) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_bytes = [&](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    auto mix_d = [&](double x) { mix_bytes(&x, sizeof x); };
    for (double b : q.breakpoints) mix_d(b);
    mix_d(1e308); // separator between breakpoint and coefficient streams
    for (const auto& piece : q.coefficients) {
        for (double c : piece) mix_d(c);
        mix_d(-1e308);
    }
    mix_d(lambda);
    mix_d(tol);
    std::int64_t meta = (std::int64_t(n) << 1) | (side == ptscat::Side::plus ? 1 : 0);
    mix_bytes(&meta, sizeof meta);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ptscat::KernelGrid load_or_solve_kernel(const ptscat::PerturbationSpec& q, double lambda,
                                        ptscat::Side side, int n, double tol,
                                        const std::string& cache_dir) {
    if (cache_dir.empty()) return ptscat::solve_kernel(q, lambda, side, n, tol);
    fs::path path = fs::path(cache_dir) /
                    ("kernel_" + cache_key(q, lambda, n, tol, side) + ".json");
    if (fs::exists(path)) {
        std::ifstream f(path);
        json j = json::parse(f);
        return ptscat::kernel_from_json(j);
    }
    ptscat::KernelGrid K = ptscat::solve_kernel(q, lambda, side, n, tol);
    fs::create_directories(path.parent_path());
    // Write via a temp file + rename so a crash never leaves a torn cache entry.
    fs::path tmp = path;
    tmp += ".tmp";
    ptscat::write_text_file(tmp.string(), ptscat::kernel_to_json(K).dump());
    fs::rename(tmp, path);
    return K;
}

ptscat::PerturbedModel build_model(const RunConfig& cfg, const std::string& cache_dir) {
    using ptscat::Side;
    auto Kp = load_or_solve_kernel(cfg.q, cfg.lambda, Side::plus, cfg.grid_n, cfg.tol, cache_dir);
    auto Km = load_or_solve_kernel(cfg.q, cfg.lambda, Side::minus, cfg.grid_n, cfg.tol, cache_dir);
    auto Kp2 =
        load_or_solve_kernel(cfg.q, cfg.lambda, Side::plus, cfg.grid_n / 2, cfg.tol, cache_dir);
    auto Km2 =
        load_or_solve_kernel(cfg.q, cfg.lambda, Side::minus, cfg.grid_n / 2, cfg.tol, cache_dir);
    return ptscat::PerturbedModel(cfg.q, cfg.lambda, cfg.grid_n, cfg.tol, std::move(Kp),
                                  std::move(Km), std::move(Kp2), std::move(Km2));
}

// Tracks files created by the current command so a failure can remove
// partial outputs.
struct OutputTracker {
    std::vector<fs::path> written;
    void write(const fs::path& path, const std::string& content) {
        if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
        ptscat::write_text_file(path.string(), content);
        written.push_back(path);
    }
    void remove_all() {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

ptscat::SearchRegion region_from_json(const json& j) {
    ptscat::SearchRegion r;
    r.re_min = j.at("re_min").get<double>();
    r.re_max = j.at("re_max").get<double>();
    r.im_min = j.at("im_min").get<double>();
    r.im_max = j.at("im_max").get<double>();
    if (j.contains("eta")) r.eta = j.at("eta").get<double>();
    if (j.contains("delta")) r.delta = j.at("delta").get<double>();
    if (j.contains("contour_points")) r.contour_points = j.at("contour_points").get<int>();
    if (j.contains("newton_tol")) r.newton_tol = j.at("newton_tol").get<double>();
    return r;
}

int cmd_resonances(const RunConfig& cfg, const fs::path& out_dir, const std::string& cache_dir,
                   OutputTracker& track) {
    if (!cfg.raw.contains("resonances"))
        throw ptscat::config_error("config: missing 'resonances' section");
    ptscat::SearchRegion region = region_from_json(cfg.raw.at("resonances"));
    ptscat::PerturbedModel model = build_model(cfg, cache_dir);
    auto zeros = ptscat::find_zeros([&](complex z) { return model.W(z); }, region);
    track.write(out_dir / "resonances.csv", ptscat::zeros_to_csv(zeros));
    std::printf("resonances: %zu zero(s) written to %s\n", zeros.size(),
                (out_dir / "resonances.csv").string().c_str());
    return 0;
}

int cmd_scattering(const RunConfig& cfg, const fs::path& out_dir, const std::string& cache_dir,
                   int threads, OutputTracker& track) {
    if (!cfg.raw.contains("scattering"))
        throw ptscat::config_error("config: missing 'scattering' section");
    const json& sc = cfg.raw.at("scattering");
    std::vector<complex> zs;
    if (sc.contains("z")) {
        for (const auto& pair : sc.at("z")) {
            if (!pair.is_array() || pair.size() != 2)
                throw ptscat::config_error("config: scattering.z entries must be [re, im] pairs");
            zs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
    } else if (sc.contains("re_range")) {
        auto rr = sc.at("re_range");
        double a = rr.at(0).get<double>(), b = rr.at(1).get<double>();
        int n = sc.value("count", 101);
        double im = sc.value("im", 0.0);
        if (n < 2 || b <= a)
            throw ptscat::config_error("config: scattering.re_range needs count >= 2, b > a");
        for (int k = 0; k < n; ++k) zs.emplace_back(a + (b - a) * k / (n - 1), im);
    } else {
        throw ptscat::config_error("config: scattering needs 'z' or 're_range'");
    }
    ptscat::PerturbedModel model = build_model(cfg, cache_dir);
    std::vector<ptscat::ScatteringData> rows(zs.size());
    std::vector<std::string> errors(zs.size());
    int nthreads = std::max(1, threads);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                rows[i] = model.scattering(zs[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (nthreads == 1 || zs.size() < 2) {
        worker(0, zs.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (zs.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            std::size_t b = std::min(zs.size(), std::size_t(t) * chunk);
            std::size_t e = std::min(zs.size(), b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < zs.size(); ++i)
        if (!errors[i].empty())
            throw ptscat::convergence_error("scattering at z index " + std::to_string(i) + ": " +
                                            errors[i]);
    std::ostringstream out;
    out << ptscat::scattering_csv_header();
    for (std::size_t i = 0; i < zs.size(); ++i) ptscat::append_scattering_csv(out, zs[i], rows[i]);
    track.write(out_dir / "scattering.csv", out.str());
    std::printf("scattering: %zu row(s) written to %s\n", zs.size(),
                (out_dir / "scattering.csv").string().c_str());
    return 0;
}

int cmd_branches(const RunConfig& cfg, const fs::path& out_dir, OutputTracker& track) {
    if (!cfg.raw.contains("branches"))
        throw ptscat::config_error("config: missing 'branches' section");
    const json& br = cfg.raw.at("branches");
    std::string kind = br.value("kind", "log");
    int j_lo = br.value("j_lo", 1);
    int j_hi = br.value("j_hi", 20);
    if (j_hi < j_lo) throw ptscat::config_error("config: branches needs j_hi >= j_lo");
    ptscat::BranchPrediction pred;
    if (kind == "log") {
        if (cfg.q.empty())
            throw ptscat::config_error("config: log-branch prediction needs a nonempty q");
        pred = ptscat::predict_log_branch(cfg.q, j_lo, j_hi);
    } else if (kind == "vertical") {
        pred = ptscat::predict_vertical_branch(cfg.lambda, j_lo, j_hi);
    } else {
        throw ptscat::config_error("config: branches.kind must be 'log' or 'vertical'");
    }
    std::ostringstream out;
    out << "index,re,im\n";
    for (std::size_t i = 0; i < pred.points.size(); ++i)
        out << pred.indices[i] << ',' << ptscat::fmt17(pred.points[i].real()) << ','
            << ptscat::fmt17(pred.points[i].imag()) << '\n';
    track.write(out_dir / "branches.csv", out.str());
    std::printf("branches: %zu point(s) written to %s\n", pred.points.size(),
                (out_dir / "branches.csv").string().c_str());
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const fs::path& out_dir, const std::string& cache_dir,
                    OutputTracker& track) {
    if (!cfg.raw.contains("reconstruct"))
        throw ptscat::config_error("config: missing 'reconstruct' section");
    const json& rc = cfg.raw.at("reconstruct");
    std::string target = rc.value("target", "W");
    ptscat::HadamardModel model;
    if (target == "W") {
        std::vector<ptscat::ZeroRecord> zeros;
        if (rc.contains("region")) {
            ptscat::PerturbedModel pm = build_model(cfg, cache_dir);
            zeros = ptscat::find_zeros([&](complex z) { return pm.W(z); },
                                       region_from_json(rc.at("region")));
        } else if (cfg.q.empty()) {
            int n_max = rc.value("n_max", 200);
            zeros = ptscat::resonances_closed_form(ptscat::PTParams(cfg.lambda), n_max);
        } else {
            throw ptscat::config_error(
                "config: reconstruct of W for nonempty q needs a 'region' to search");
        }
        std::vector<double> probes = rc.value("probe_ts", std::vector<double>{5, 10, 20, 40});
        model = ptscat::fit_W(zeros, probes);
    } else if (target == "S_plus" || target == "S_minus") {
        if (!rc.contains("region"))
            throw ptscat::config_error("config: reconstruct of S needs a 'region' to search");
        ptscat::PerturbedModel pm = build_model(cfg, cache_dir);
        auto side = target == "S_plus" ? ptscat::HadamardTarget::S_plus
                                       : ptscat::HadamardTarget::S_minus;
        auto eval = [&](complex z) {
            return side == ptscat::HadamardTarget::S_plus ? pm.scattering(z).S_plus
                                                          : pm.scattering(z).S_minus;
        };
        auto zeros = ptscat::find_zeros(eval, region_from_json(rc.at("region")));
        std::string hint_name = rc.value("support_hint", "origin_inside");
        ptscat::SupportHint hint = hint_name == "R_plus"    ? ptscat::SupportHint::R_plus
                                   : hint_name == "R_minus" ? ptscat::SupportHint::R_minus
                                                            : ptscat::SupportHint::origin_inside;
        int p_sign = rc.value("p_sign", 0);
        model = ptscat::fit_S(zeros, side, hint, [&](complex z) { return pm.W(z); },
                              ptscat::PTParams(cfg.lambda), p_sign);
    } else {
        throw ptscat::config_error("config: reconstruct.target must be W, S_plus, or S_minus");
    }
    track.write(out_dir / "reconstruct.json", ptscat::hadamard_to_json(model).dump(2) + "\n");
    std::printf("reconstruct: N=%d fit_residual=%g written to %s\n", model.truncation_N,
                model.fit_residual, (out_dir / "reconstruct.json").string().c_str());
    return 0;
}

int cmd_verify(const RunConfig& cfg, unsigned seed) {
    auto results = ptscat::verify_suite(cfg.q, cfg.lambda, cfg.grid_n, cfg.tol, seed);
    int fails = 0;
    for (const auto& c : results) {
        std::printf("%-60s %s  worst=%.3e %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.worst, c.detail.c_str());
        if (!c.pass) ++fails;
    }
    std::printf("verify: %d check(s) failed\n", fails);
    return fails == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D Schrodinger scattering toolkit (Poschl-Teller background + compactly "
                 "supported piecewise-polynomial perturbation)"};
    app.require_subcommand(1);

    std::string config_path, out_path = ".", cache_dir;
    int threads = 1;
    unsigned seed = 12345;
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_path, "output directory (default .)");
    app.add_option("--threads", threads, "worker threads for batch evaluation");
    app.add_option("--cache", cache_dir, "kernel cache directory");
    app.add_option("--seed", seed, "RNG seed for the verification suite");

    auto* sub_res = app.add_subcommand("resonances", "find zeros of W in a region");
    auto* sub_sca = app.add_subcommand("scattering", "tabulate T, R, W, S on a z list");
    auto* sub_bra = app.add_subcommand("branches", "predicted resonance branch points");
    auto* sub_rec = app.add_subcommand("reconstruct", "Hadamard fit from a zero set");
    auto* sub_ver = app.add_subcommand("verify", "run the self-check suite");
    // Global options may appear after the subcommand name.
    for (auto* s : {sub_res, sub_sca, sub_bra, sub_rec, sub_ver}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // command-line misuse is a config error
    }

    OutputTracker track;
    try {
        RunConfig cfg = load_config(config_path);
        fs::path out_dir(out_path);
        if (sub_res->parsed()) return cmd_resonances(cfg, out_dir, cache_dir, track);
        if (sub_sca->parsed()) return cmd_scattering(cfg, out_dir, cache_dir, threads, track);
        if (sub_bra->parsed()) return cmd_branches(cfg, out_dir, track);
        if (sub_rec->parsed()) return cmd_reconstruct(cfg, out_dir, cache_dir, track);
        if (sub_ver->parsed()) return cmd_verify(cfg, seed);
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 2;
    } catch (const ptscat::config_error& e) {
        track.remove_all();
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "compute error: %s\n", e.what());
        return 1;
    }
}
