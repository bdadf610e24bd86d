#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fec/pcm.hpp"
#include "fec/polar.hpp"
#include "fec/sim.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw fec::sim::ArtifactError("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polar-code FEC decoding and simulation"};
    app.require_subcommand(1);

    // build-pcm
    auto* build = app.add_subcommand("build-pcm", "Construct a code and write the pruned-PCM artifact");
    int n = 0, k = 0, degree_cap = 0;
    double design_eps = 0.5;
    std::string crc_poly = "0x43";
    std::string out_path, code_spec_out, code_spec_in;
    build->add_option("--n", n, "log2 blocklength");
    build->add_option("--k", k, "code dimension (CRC bits included)");
    build->add_option("--design-eps", design_eps, "Bhattacharyya design erasure probability");
    build->add_option("--crc-poly", crc_poly, "CRC generator polynomial in hex (0 = no CRC)");
    build->add_option("--degree-cap", degree_cap, "optional cap on merged check degrees (0 = off)");
    build->add_option("--code-spec", code_spec_in, "read code from a code-spec JSON file instead");
    build->add_option("--emit-code-spec", code_spec_out, "also write the code-spec JSON here");
    build->add_option("--out", out_path, "artifact output path")->required();

    // run
    auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
    std::vector<std::string> cfg_paths;
    std::string out_run, format = "csv";
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int workers_override = 0;
    run->add_option("--config", cfg_paths, "experiment config JSON")->required();
    run->add_option("--seed", seed_override, "master seed override")->each([&](const std::string&) { seed_set = true; });
    run->add_option("--workers", workers_override, "worker thread override");
    run->add_option("--out", out_run, "output path (default stdout)");
    run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    // compare
    auto* cmp = app.add_subcommand("compare", "Paired comparison of two configs on shared noise");
    std::vector<std::string> cmp_paths;
    std::string out_cmp;
    std::uint64_t cmp_seed = 0;
    bool cmp_seed_set = false;
    int cmp_workers = 0;
    cmp->add_option("--config", cmp_paths, "two experiment config JSON files")->required()->expected(2);
    cmp->add_option("--seed", cmp_seed, "master seed override")->each([&](const std::string&) { cmp_seed_set = true; });
    cmp->add_option("--workers", cmp_workers, "worker thread override (per run)");
    cmp->add_option("--out", out_cmp, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            fec::polar::PolarCodeSpec spec;
            std::uint64_t poly = 0;
            if (!code_spec_in.empty()) {
                fec::polar::code_spec_from_json(slurp(code_spec_in), spec, poly);
            } else {
                if (n < 1 || k < 0 || k > (1 << n)) {
                    std::cerr << "invalid --n/--k\n";
                    return 2;
                }
                spec = fec::polar::construct_frozen_set(n, k, design_eps);
                poly = std::stoull(crc_poly, nullptr, 0);
            }
            fec::pcm::FactorGraphPcm fg = fec::pcm::build_standard_fg_pcm(spec);
            std::optional<int> cap;
            if (degree_cap > 0) cap = degree_cap;
            fec::pcm::PrunedPcm p = fec::pcm::prune(fg, cap);
            if (poly != 0) {
                auto aug = fec::polar::make_augmented(spec, poly);
                p = fec::pcm::append_crc_rows(p, aug.crc, fec::polar::full_generator(spec.n), spec);
            }
            fec::pcm::save_artifact(p, out_path);
            if (!code_spec_out.empty())
                write_out(code_spec_out, fec::polar::code_spec_to_json(spec, poly));
            std::cout << "N=" << p.block_length << " K=" << p.code_k << " N'=" << p.n_prime()
                      << " rows=" << p.matrix.n_rows << " crc_rows=" << p.crc_rows
                      << " density=" << p.matrix.density() * 100.0 << "%\n";
            return 0;
        }
        if (*run) {
            auto cfg = fec::sim::config_from_json(slurp(cfg_paths.at(0)));
            if (seed_set) cfg.master_seed = seed_override;
            if (workers_override > 0) cfg.workers = workers_override;
            auto result = fec::sim::run_experiment(cfg);
            write_out(out_run, format == "csv" ? fec::sim::emit_csv(result) : fec::sim::emit_json(result));
            return 0;
        }
        if (*cmp) {
            auto a = fec::sim::config_from_json(slurp(cmp_paths.at(0)));
            auto b = fec::sim::config_from_json(slurp(cmp_paths.at(1)));
            if (cmp_seed_set) {
                a.master_seed = cmp_seed;
                b.master_seed = cmp_seed;
            }
            if (cmp_workers > 0) {
                a.workers = cmp_workers;
                b.workers = cmp_workers;
            }
            auto rep = fec::sim::paired_compare(a, b);
            write_out(out_cmp, fec::sim::emit_paired_json(rep));
            return 0;
        }
    } catch (const fec::sim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fec::sim::ArtifactError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return 3;
    } catch (const fec::pcm::ParseError& e) {
        std::cerr << "artifact error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
