#pragma once

#include "delicate/arith.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace delicate::covering {

// One accepted prime p for base a, with q = the large prime divisor of
// a^p - 1 that carries the covering congruence. certified_maximal records
// whether q is known to be the largest prime factor (factorization finished)
// or merely the largest proven prime divisor found within budget.
struct CoveringPrime {
    uint32_t a = 2;
    uint64_t p = 0;
    mpz_class q;
    bool certified_maximal = true;
};

// Index of one cell of the partition of P_a.
struct FamilyKey {
    uint32_t a = 2;
    int32_t j = 1;       // 1 <= |j| <= K
    uint32_t k = 1;      // 1 <= k <= K
    uint32_t s_index = 0;

    auto operator<=>(const FamilyKey&) const = default;
    std::string label() const;
};

// Which of the two candidate classes was negated into b for a given p:
// j_plus_s covers exponents i == 0 (mod p), ja_plus_s covers i == 1 (mod p).
enum class ClassChoice { j_plus_s, ja_plus_s };

const char* to_string(ClassChoice c);

struct Choice {
    ClassChoice cls = ClassChoice::j_plus_s;
    mpz_class b_p;   // the residue k^{-1}(...) mod q_p that was negated
};

enum class PartitionMode { proportional, strict };

struct BuildOptions {
    arith::FactorEffort effort;
    uint64_t prime_cap = 10000;       // scan p up to this bound before giving up
    PartitionMode partition = PartitionMode::proportional;
    double epsilon = 0.5;             // strict-mode per-cell mass slack
};

struct CoveringSystem {
    uint32_t K = 2;
    double M = 0.0;
    std::vector<int64_t> S;
    std::vector<CoveringPrime> primes;                  // ordered by (a, p)
    std::map<FamilyKey, std::vector<size_t>> partition; // indices into `primes`
    std::map<uint64_t, Choice> choices;                 // keyed by p (globally unique)
    mpz_class W = 1;
    mpz_class b = 0;

    const CoveringPrime& by_p(uint64_t p) const;
    std::vector<const CoveringPrime*> for_base(uint32_t a) const;
    double harmonic_mass(uint32_t a) const;   // sum of 1/p over P_a
};

// Inductive scan over a = 2..K: consecutive primes p > K+1 are tested with
// q = largest prime factor of a^p - 1; p is accepted when q > K, both p and q
// are new across everything accepted so far, q == 1 (mod p), and the order of
// a mod q is exactly p. Each P_a stops once sum 1/p >= M.
std::vector<std::vector<CoveringPrime>> build_p_sets(uint32_t K, double M,
                                                     const BuildOptions& opts = {});

// Deals each P_a round-robin (ascending p, i.e. descending 1/p) across the
// cells (j, k, s_index) in their canonical order. strict mode additionally
// requires total mass >= M * 2K^2|S| per base and per-cell mass
// >= M/(2K^2|S|) * (1 - epsilon).
std::map<FamilyKey, std::vector<size_t>> partition_sets(
    const std::vector<CoveringPrime>& primes, uint32_t K, const std::vector<int64_t>& S,
    double M, PartitionMode mode, double epsilon);

// For each p in its cell (j, k, s): picks the first invertible residue among
// k^{-1}(j+s) and k^{-1}(ja+s) mod q_p (preferring the former), then solves
// b == -b_p (mod q_p) for all p at once. Fills choices, W, b.
void choose_b(CoveringSystem& sys);

// Convenience: build_p_sets + partition_sets + choose_b.
CoveringSystem build_system(uint32_t K, double M, const std::vector<int64_t>& S,
                            const BuildOptions& opts = {});

struct CoverageAudit {
    FamilyKey family;
    uint32_t i_max = 0;
    uint64_t covered = 0;
    uint64_t uncovered = 0;           // #I
    uint64_t family_size = 0;
    mpq_class density;                // prod (1 - 1/p) over the family
    mpq_class predicted_bound;        // density * (i_max + 1)
    double empirical_exponent = 0.0;  // -ln(density) / M
    uint64_t checked_congruences = 0; // individual divisibility checks done
};

// Verifies, for every p in the family and every i <= i_max in its designated
// class, that q_p divides k*b + j*a^i + s; throws on any violation. Then
// counts the exponents no prime covers.
CoverageAudit audit_coverage(const CoveringSystem& sys, const FamilyKey& family,
                             uint32_t i_max);

std::vector<CoverageAudit> audit_all(const CoveringSystem& sys, uint32_t i_max,
                                     unsigned threads = 1);

struct Qo1Result {
    double sum_inv_q = 0.0;       // sum of 1/q_p
    double sum_inv_plogp = 0.0;   // sum of 1/(p ln p), for scale
};

Qo1Result qo1_check(const CoveringSystem& sys);

std::string to_json(const CoveringSystem& sys);
CoveringSystem system_from_json(const std::string& text);

}   // namespace delicate::covering
