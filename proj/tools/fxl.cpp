// fxl: analysis workbench for nonlinear filter generators over GF(2^7).
//
// Subcommands: analyze, estimate, keystream, attack, table1, selftest.
// Exit codes: 0 success/recovery, 1 usage, 2 analysis failure, 3 resource.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fxl/fxl.hpp"

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct GlobalOpts {
    unsigned threads = 0; // 0 = hardware concurrency
    std::size_t memory_cap = std::size_t{4} << 30;
    bool json_out = false;
};

fxl::CipherSpec load_cipher(const std::string& name_or_path) {
    if (name_or_path == "wg-prng" || name_or_path == "toy3" || name_or_path == "toy5")
        return fxl::CipherSpec::builtin(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw fxl::usage_error("cannot open cipher spec file '" + name_or_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return fxl::CipherSpec::parse_config(ss.str(), name_or_path);
}

json report_envelope(const std::string& command, const json& config, double wall_seconds) {
    return json{{"tool", "fxl"},
                {"version", fxl::kVersion},
                {"command", command},
                {"config", config},
                {"wall_seconds", wall_seconds}};
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string feasibility_str(fxl::Feasibility f) { return fxl::to_string(f); }

void write_bits_file(const std::string& path, const std::vector<bool>& bits) {
    std::ofstream out(path);
    if (!out) throw fxl::usage_error("cannot write '" + path + "'");
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out << (bits[i] ? '1' : '0');
        if ((i + 1) % 64 == 0) out << '\n';
    }
    if (bits.size() % 64) out << '\n';
}

std::vector<bool> read_bits_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fxl::usage_error("cannot open keystream file '" + path + "'");
    std::vector<bool> bits;
    char c;
    while (in.get(c)) {
        if (c == '0')
            bits.push_back(false);
        else if (c == '1')
            bits.push_back(true);
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw fxl::usage_error("keystream file '" + path + "': unexpected character '" + std::string(1, c) + "'");
    }
    return bits;
}

json histogram_json(const std::map<int, std::size_t>& hist) {
    json j = json::object();
    for (const auto& [deg, count] : hist) j[std::to_string(deg)] = count;
    return j;
}

json estimate_json(const fxl::EstimateReport& r) {
    return json{{"cipher", r.cipher},
                {"D", r.D},
                {"n", r.n},
                {"m", r.m},
                {"k0", r.k0.str()},
                {"k1", r.k1.str()},
                {"t", r.t.str()},
                {"T", r.T.str()},
                {"N", r.N.str()},
                {"log2_t", r.log2_t},
                {"log2_complexity", r.complexity_log2},
                {"max_keystream", r.max_keystream},
                {"feasibility", feasibility_str(r.feasibility)}};
}

int cmd_analyze(const GlobalOpts& g, const std::string& cipher, unsigned D) {
    auto t0 = Clock::now();
    fxl::CipherSpec spec = load_cipher(cipher);
    fxl::FilterAnalysis fa = fxl::analyze_filter(spec.filter, static_cast<int>(D));
    fxl::EstimateReport rep = fxl::build_estimate(spec, D, {}, &fa);

    std::map<int, std::size_t> gb_hist0, gb_hist1;
    for (const auto& p : fa.basis0.gb_prime) ++gb_hist0[p.degree()];
    for (const auto& p : fa.basis1.gb_prime) ++gb_hist1[p.degree()];
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    if (g.json_out) {
        json j = report_envelope("analyze", {{"cipher", cipher}, {"D", D}}, wall);
        j["filter_anf"] = spec.filter.to_string();
        j["filter_terms"] = spec.filter.support().size();
        j["algebraic_immunity"] = fa.ai;
        j["gb"] = {{"side0", {{"count", fa.basis0.gb_prime.size()}, {"degrees", histogram_json(gb_hist0)}}},
                   {"side1", {{"count", fa.basis1.gb_prime.size()}, {"degrees", histogram_json(gb_hist1)}}}};
        j["independent_set"] = {
            {"side0", {{"count", fa.s0.polys.size()}, {"degrees", histogram_json(fa.s0.degree_histogram)}}},
            {"side1", {{"count", fa.s1.polys.size()}, {"degrees", histogram_json(fa.s1.degree_histogram)}}}};
        j["estimate"] = estimate_json(rep);
        emit(j);
        return 0;
    }
    std::cout << "cipher           " << spec.name << "  (n = " << spec.nbits() << ", D = " << D << ")\n";
    std::cout << "filter ANF       " << spec.filter.support().size() << " terms, degree " << spec.filter.degree()
              << "\n";
    std::cout << "algebraic imm.   " << fa.ai << "\n";
    auto hist_str = [](const std::map<int, std::size_t>& h) {
        std::string s;
        for (const auto& [d, c] : h) s += std::to_string(d) + ":" + std::to_string(c) + " ";
        return s;
    };
    std::cout << "G' (side 0/1)    " << fa.basis0.gb_prime.size() << " / " << fa.basis1.gb_prime.size()
              << "  degrees " << hist_str(gb_hist0) << "\n";
    std::cout << "S' (side 0/1)    " << fa.s0.polys.size() << " / " << fa.s1.polys.size() << "  degrees "
              << hist_str(fa.s0.degree_histogram) << "\n";
    std::cout << "k'0, k'1         " << rep.k0.str() << ", " << rep.k1.str() << "\n";
    std::cout << "t (keystream)    " << rep.t.str() << "  (log2 = " << std::fixed << std::setprecision(2)
              << rep.log2_t << ")\n";
    std::cout << "T (monomials)    " << rep.T.str() << "\n";
    std::cout << "complexity       2^" << std::setprecision(2) << rep.complexity_log2 << "\n";
    std::cout << "verdict          " << feasibility_str(rep.feasibility) << "\n";
    std::cout << "wall time        " << std::setprecision(3) << wall << " s\n";
    return 0;
}

int cmd_estimate(const GlobalOpts& g, const std::string& cipher, unsigned dmin, unsigned dmax, bool csv,
                 const fxl::EstimatorParams& params) {
    auto t0 = Clock::now();
    fxl::CipherSpec spec = load_cipher(cipher);
    std::vector<fxl::EstimateReport> rows;
    for (unsigned D = dmin; D <= dmax; ++D) rows.push_back(fxl::build_estimate(spec, D, params));
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    if (g.json_out) {
        json j = report_envelope("estimate", {{"cipher", cipher}, {"D_min", dmin}, {"D_max", dmax}}, wall);
        j["rows"] = json::array();
        for (const auto& r : rows) j["rows"].push_back(estimate_json(r));
        emit(j);
        return 0;
    }
    if (csv) {
        std::cout << "D,k0,k1,t,log2_t,log2_complexity,feasible\n";
        for (const auto& r : rows)
            std::cout << r.D << "," << r.k0.str() << "," << r.k1.str() << "," << r.t.str() << "," << std::fixed
                      << std::setprecision(2) << r.log2_t << "," << r.complexity_log2 << ","
                      << (r.feasibility == fxl::Feasibility::kFeasible ? "yes" : "no") << "\n";
        return 0;
    }
    std::cout << "cipher " << spec.name << " (n = " << spec.nbits() << ")\n";
    std::cout << std::left << std::setw(4) << "D" << std::setw(14) << "k'0" << std::setw(14) << "k'1"
              << std::setw(12) << "t" << std::setw(10) << "log2 t" << std::setw(12) << "log2 cx"
              << "verdict\n";
    for (const auto& r : rows)
        std::cout << std::left << std::setw(4) << r.D << std::setw(14) << r.k0.str() << std::setw(14)
                  << r.k1.str() << std::setw(12) << r.t.str() << std::setw(10) << std::fixed
                  << std::setprecision(2) << r.log2_t << std::setw(12) << r.complexity_log2
                  << feasibility_str(r.feasibility) << "\n";
    std::cout << "# fxl " << fxl::kVersion << ", " << std::fixed << std::setprecision(3) << wall << " s\n";
    return 0;
}

int cmd_keystream(const GlobalOpts& g, const std::string& cipher, std::uint64_t seed, std::uint64_t t,
                  const std::string& out_path, const std::string& state_path, bool enforce) {
    auto t0 = Clock::now();
    fxl::CipherSpec spec = load_cipher(cipher);
    // Seed expansion: std::mt19937_64 seeded directly; 7 low bits per word.
    std::mt19937_64 rng(seed);
    fxl::WordState init;
    do {
        init.words.clear();
        for (int i = 0; i < spec.a; ++i) init.words.push_back(fxl::Gf128(static_cast<std::uint8_t>(rng() & 0x7f)));
    } while (fxl::state_bits(init).popcount() == 0);

    fxl::WordState target = spec.has_init_phase ? fxl::init_phase(spec, init) : init;
    std::vector<bool> bits = fxl::keystream(spec, target, t, enforce);
    write_bits_file(out_path, bits);

    json state_file{{"tool", "fxl"},
                    {"version", fxl::kVersion},
                    {"cipher", spec.name},
                    {"a", spec.a},
                    {"seed", seed},
                    {"state_hex", target.to_hex()}};
    std::ofstream st(state_path);
    if (!st) throw fxl::usage_error("cannot write '" + state_path + "'");
    st << state_file.dump(2) << "\n";

    double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    if (g.json_out) {
        json j = report_envelope("keystream",
                                 {{"cipher", cipher}, {"seed", seed}, {"t", t}, {"enforce_limit", enforce}}, wall);
        j["keystream_file"] = out_path;
        j["state_file"] = state_path;
        j["bits"] = bits.size();
        emit(j);
    } else {
        std::cout << "wrote " << bits.size() << " bits to " << out_path << ", sealed state to " << state_path
                  << " (" << std::fixed << std::setprecision(3) << wall << " s)\n";
    }
    return 0;
}

int cmd_attack(const GlobalOpts& g, const std::string& cipher, const std::string& ks_path, unsigned D,
               const std::string& expect_path, bool streaming, std::size_t enum_cap) {
    auto t0 = Clock::now();
    fxl::CipherSpec spec = load_cipher(cipher);
    std::vector<bool> ks = read_bits_file(ks_path);

    fxl::FilterAnalysis fa = fxl::analyze_filter(spec.filter, static_cast<int>(D));
    fxl::EstimateReport rep = fxl::build_estimate(spec, D, {}, &fa);
    if (fxl::BigInt(ks.size()) < rep.t)
        std::cerr << "warning: keystream has " << ks.size() << " bits, below the estimated requirement t = "
                  << rep.t.str() << "; proceeding\n";

    // Size the linearized matrix before composing anything.
    {
        fxl::BigInt worst_rows = 0;
        for (const auto& gp : {fa.basis0.gb_prime, fa.basis1.gb_prime}) {
            fxl::BigInt per_clock = 0;
            for (const auto& p : gp)
                per_clock += fxl::monomial_count(static_cast<unsigned>(spec.nbits()),
                                                 D - static_cast<unsigned>(p.degree()));
            worst_rows = std::max(worst_rows, per_clock);
        }
        worst_rows *= ks.size();
        fxl::BigInt row_words = (rep.T + 63) / 64;
        fxl::BigInt bytes = (streaming ? std::min(worst_rows, rep.T) : worst_rows) * row_words * 8;
        if (bytes > g.memory_cap)
            throw fxl::resource_error(
                "attack needs about " + bytes.str() + " bytes for the " +
                    (streaming ? std::string("pivot store") : std::string("linearized matrix")) + " (" +
                    worst_rows.str() + " rows x " + rep.T.str() +
                    " columns); raise --memory-cap, lower --D, or use --streaming",
                0);
    }

    fxl::AttackOptions opts;
    opts.D = static_cast<int>(D);
    opts.enum_cap = enum_cap;
    opts.streaming = streaming;
    opts.pool = &fxl::ThreadPool::global();
    fxl::RecoveryResult res = fxl::run_attack(spec, fa.basis0, fa.basis1, ks, opts);
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();

    bool matches_sealed = true;
    if (!expect_path.empty()) {
        std::ifstream ef(expect_path);
        if (!ef) throw fxl::usage_error("cannot open state file '" + expect_path + "'");
        json sealed = json::parse(ef, nullptr, true, true);
        fxl::WordState want = fxl::WordState::from_hex(sealed.at("state_hex").get<std::string>());
        matches_sealed = res.recovered() && res.state == want;
    }

    fxl::BigInt estimated = rep.t * std::min(rep.k0, rep.k1);
    double ratio = estimated > 0 ? static_cast<double>(res.rank) / static_cast<double>(estimated) : 0.0;
    const char* status = res.status == fxl::RecoveryResult::Status::kUnique        ? "unique"
                         : res.status == fxl::RecoveryResult::Status::kEnumerated ? "enumerated"
                                                                                  : "failed";
    if (g.json_out) {
        json j = report_envelope("attack",
                                 {{"cipher", cipher},
                                  {"keystream", ks_path},
                                  {"D", D},
                                  {"streaming", streaming},
                                  {"enum_cap", enum_cap}},
                                 wall);
        j["status"] = status;
        j["rank"] = res.rank;
        j["rows_generated"] = res.rows_generated;
        j["rows_kept"] = res.rows_kept;
        j["monomials"] = res.monomial_count;
        j["estimated_independent"] = estimated.str();
        j["measured_over_estimated"] = ratio;
        j["residual_dimension"] = res.residual_dimension;
        j["candidates_enumerated"] = res.candidates_enumerated;
        if (res.recovered()) j["state_hex"] = res.state.to_hex();
        if (!expect_path.empty()) j["recovery_matches_sealed"] = matches_sealed;
        if (!res.message.empty()) j["message"] = res.message;
        emit(j);
    } else {
        std::cout << "status      " << status << "\n";
        if (res.recovered()) std::cout << "state       " << res.state.to_hex() << "\n";
        std::cout << "rank        " << res.rank << "  (t*k' = " << estimated.str() << ", ratio " << std::fixed
                  << std::setprecision(3) << ratio << ")\n";
        std::cout << "rows        " << res.rows_kept << " kept of " << res.rows_generated << " generated, "
                  << res.monomial_count << " monomials\n";
        if (!expect_path.empty())
            std::cout << "sealed      " << (matches_sealed ? "match" : "MISMATCH") << "\n";
        if (!res.message.empty()) std::cout << "note        " << res.message << "\n";
        std::cout << "wall time   " << std::setprecision(3) << wall << " s\n";
    }
    if (!res.recovered() || !matches_sealed) return 2;
    return 0;
}

int cmd_table1(const GlobalOpts& g, bool pretty) {
    auto t0 = Clock::now();
    fxl::CipherSpec spec = fxl::CipherSpec::wg_prng();
    fxl::FilterAnalysis fa = fxl::analyze_filter(spec.filter, 7);
    std::vector<fxl::EstimateReport> rows;
    for (unsigned D = 4; D <= 7; ++D) {
        fxl::FilterAnalysis faD = fxl::analyze_filter(spec.filter, static_cast<int>(D));
        rows.push_back(fxl::build_estimate(spec, D, {}, &faD));
    }
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    if (g.json_out) {
        json j = report_envelope("table1", json::object(), wall);
        j["rows"] = json::array();
        for (const auto& r : rows) j["rows"].push_back(estimate_json(r));
        emit(j);
        return 0;
    }
    if (pretty) {
        std::cout << std::left << std::setw(4) << "D" << std::setw(10) << "log2 t" << std::setw(12)
                  << "log2 cx" << std::setw(14) << "k'" << std::setw(10) << "t"
                  << "verdict\n";
        for (const auto& r : rows)
            std::cout << std::left << std::setw(4) << r.D << std::setw(10) << std::fixed << std::setprecision(2)
                      << r.log2_t << std::setw(12) << r.complexity_log2 << std::setw(14) << r.k0.str()
                      << std::setw(10) << r.t.str() << feasibility_str(r.feasibility) << "\n";
        std::cout << "# fxl " << fxl::kVersion << ", " << std::fixed << std::setprecision(3) << wall << " s\n";
        return 0;
    }
    std::cout << "D,log2_t,log2_complexity,k_prime,t,T,feasible\n";
    for (const auto& r : rows)
        std::cout << r.D << "," << std::fixed << std::setprecision(2) << r.log2_t << "," << r.complexity_log2
                  << "," << r.k0.str() << "," << r.t.str() << "," << r.T.str() << ","
                  << (r.feasibility == fxl::Feasibility::kFeasible ? "yes" : "no") << "\n";
    return 0;
}

int cmd_selftest(const GlobalOpts& g) {
    auto t0 = Clock::now();
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };
    const fxl::BoolPoly& F = fxl::wgt_anf();
    check("filter ANF has 56 terms of degree 6", F.support().size() == 56 && F.degree() == 6);
    check("filter is balanced", fxl::to_truth_table(F).popcount() == 64);
    check("algebraic immunity 3 on both sides",
          fxl::algebraic_immunity(F) == 3 && fxl::algebraic_immunity(F.plus_one()) == 3);
    auto b0 = fxl::reduced_gb_of_annihilator_ideal(F, 0);
    auto b1 = fxl::reduced_gb_of_annihilator_ideal(F, 1);
    check("reduced bases have 31 members each", b0.gb_prime.size() == 31 && b1.gb_prime.size() == 31);
    auto s0 = fxl::independent_subset(fxl::expand_to_degree(b0, 7));
    check("independent expansion reaches 64 polynomials", s0.polys.size() == 64);
    check("k' at D = 5 is 40502", fxl::k_prime(s0, 259, 7, 5) == 40502);
    check("baseline keystream bound C(259,3) = 2862209", fxl::baseline_cm_keystream(259, 3) == 2862209);
    bool builtins_ok = true;
    try {
        fxl::CipherSpec::wg_prng();
        fxl::CipherSpec::toy3();
        fxl::CipherSpec::toy5();
    } catch (const std::exception&) {
        builtins_ok = false;
    }
    check("builtin ciphers validate (irreducible/primitive feedback)", builtins_ok);
    double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    std::cout << (failures ? "SELFTEST FAILED" : "selftest ok") << " (" << std::fixed << std::setprecision(2)
              << wall << " s)\n";
    (void)g;
    return failures ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fxl: algebraic analysis workbench for nonlinear filter generators"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--threads", g.threads, "worker thread cap (0 = hardware)");
    app.add_option("--memory-cap", g.memory_cap, "matrix memory cap in bytes")
        ->transform(CLI::AsSizeValue(false));
    app.add_flag("--json", g.json_out, "machine-readable JSON output");

    std::string cipher, ks_path = "keystream.txt", state_path = "state.json", expect_path;
    unsigned D = 5, dmin = 4, dmax = 7;
    std::uint64_t seed = 1, t = 64;
    bool enforce = false, streaming = false, csv = false, pretty = false;
    std::size_t enum_cap = 20;

    auto* analyze = app.add_subcommand("analyze", "annihilator bases, S', k', t for one (cipher, D)");
    analyze->add_option("cipher", cipher, "builtin name or spec file")->required();
    analyze->add_option("--D", D, "XL degree bound");

    fxl::EstimatorParams eparams;
    auto* estimate = app.add_subcommand("estimate", "estimate table over a range of D");
    estimate->add_option("cipher", cipher, "builtin name or spec file")->required();
    estimate->add_option("--D-min", dmin, "first D");
    estimate->add_option("--D-max", dmax, "last D");
    estimate->add_flag("--csv", csv, "CSV output");
    estimate->add_option("--omega", eparams.omega, "elimination exponent (default log2 7)");
    estimate->add_option("--security-level", eparams.security_level_bits,
                         "claimed security in bits for the brute-force comparison");

    auto* keystream = app.add_subcommand("keystream", "generate keystream + sealed state from a seed");
    keystream->add_option("cipher", cipher, "builtin name or spec file")->required();
    keystream->add_option("--seed", seed, "64-bit PRNG seed (std::mt19937_64)");
    keystream->add_option("--t", t, "number of bits");
    keystream->add_option("--out", ks_path, "keystream output file");
    keystream->add_option("--state-out", state_path, "sealed state output file");
    keystream->add_flag("--enforce-limit", enforce, "refuse t above the designer limit");

    auto* attack = app.add_subcommand("attack", "recover the initial state from keystream");
    attack->add_option("cipher", cipher, "builtin name or spec file")->required();
    attack->add_option("--keystream", ks_path, "keystream file")->required();
    attack->add_option("--D", D, "XL degree bound");
    attack->add_option("--expect", expect_path, "sealed state file to compare against");
    attack->add_option("--enum-cap", enum_cap, "max residual dimension to enumerate");
    attack->add_flag("--streaming", streaming, "reduce rows as generated (lower memory)");

    auto* table1 = app.add_subcommand("table1", "keystream/complexity table for wg-prng, D = 4..7");
    table1->add_flag("--pretty", pretty, "aligned text instead of CSV");

    app.add_subcommand("selftest", "quick internal consistency checks");

    CLI11_PARSE(app, argc, argv);

    fxl::ThreadPool::set_global_threads(g.threads);
    fxl::BitMatrix::memory_cap() = g.memory_cap;

    try {
        if (app.got_subcommand("analyze")) return cmd_analyze(g, cipher, D);
        if (app.got_subcommand("estimate")) return cmd_estimate(g, cipher, dmin, dmax, csv, eparams);
        if (app.got_subcommand("keystream")) return cmd_keystream(g, cipher, seed, t, ks_path, state_path, enforce);
        if (app.got_subcommand("attack")) return cmd_attack(g, cipher, ks_path, D, expect_path, streaming, enum_cap);
        if (app.got_subcommand("table1")) return cmd_table1(g, pretty);
        if (app.got_subcommand("selftest")) return cmd_selftest(g);
    } catch (const fxl::resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const fxl::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const fxl::analysis_error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
