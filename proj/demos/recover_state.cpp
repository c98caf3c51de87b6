// Walks the whole pipeline on the 21-bit toy cipher: pick a random state,
// observe the estimated number of keystream bits, and recover the state.

#include <cstdio>
#include <random>

#include "fxl/fxl.hpp"

int main() {
    using namespace fxl;

    CipherSpec spec = CipherSpec::toy3();
    int D = 4; // D = 5 matches the larger experiment but takes minutes

    FilterAnalysis fa = analyze_filter(spec.filter, D);
    EstimateReport rep = build_estimate(spec, static_cast<unsigned>(D), {}, &fa);
    std::printf("cipher %s: n = %d, AI = %d, |G'| = %zu per side\n", spec.name.c_str(), spec.nbits(), fa.ai,
                fa.basis0.gb_prime.size());
    std::printf("D = %d: k' = %s, need t = %s keystream bits (T = %s monomials)\n", D, rep.k0.str().c_str(),
                rep.t.str().c_str(), rep.T.str().c_str());

    std::mt19937_64 rng(std::random_device{}());
    WordState secret;
    do {
        secret.words.clear();
        for (int i = 0; i < spec.a; ++i) secret.words.push_back(Gf128(static_cast<std::uint8_t>(rng() & 0x7f)));
    } while (state_bits(secret).popcount() == 0);
    std::vector<bool> ks = keystream(spec, secret, static_cast<std::uint64_t>(rep.t));
    std::printf("secret state %s, observed %zu bits\n", secret.to_hex().c_str(), ks.size());

    ThreadPool pool(std::thread::hardware_concurrency());
    AttackOptions opts;
    opts.D = D;
    opts.pool = &pool;
    RecoveryResult res = run_attack(spec, fa.basis0, fa.basis1, ks, opts);

    std::printf("linearized: %zu rows kept of %zu, rank %zu of %llu monomial columns\n", res.rows_kept,
                res.rows_generated, res.rank, static_cast<unsigned long long>(res.monomial_count));
    if (res.recovered()) {
        std::printf("recovered   %s (%s)\n", res.state.to_hex().c_str(),
                    res.state == secret ? "matches the secret" : "MISMATCH");
        return res.state == secret ? 0 : 1;
    }
    std::printf("failed: %s\n", res.message.c_str());
    return 1;
}
