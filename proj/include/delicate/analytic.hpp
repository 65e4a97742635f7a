#pragma once

#include "delicate/arith.hpp"

#include <string>
#include <vector>

namespace delicate::analytic {

// 256-bit working precision for all series accumulation.
inline constexpr mp_bitcnt_t series_precision = 256;

struct SeriesEstimate {
    std::string label;
    uint64_t X = 0;
    mpf_class partial_sum{0, series_precision};
    mpf_class last_block{0, series_precision};   // contribution of n in (X/2, X]
};

// Sum of S^omega(n) / (n * ord_A(n)) over n <= X with gcd(n, A) = 1.
// Conventions: ord_A(1) = 1, omega(1) = 0. Chunked with a fixed fold order,
// so the result is bit-identical for any thread count.
SeriesEstimate romanoff_partial_sum(uint64_t A, uint64_t S, uint64_t X, unsigned threads = 1);

struct MertensResult {
    uint64_t x = 0;
    mpf_class product{0, series_precision};   // prod_{p <= x} (1 - 1/p)^{-1}
    double reference = 0.0;                   // e^gamma * ln x
};

MertensResult mertens_product(uint64_t x);

struct SquareIdentity {
    mpq_class lhs;   // (1 - 1/p)^{-2}
    mpq_class rhs;   // (1 + 2/p)(1 + (3p-2)/(p^3 - 3p + 2))
    bool equal = false;
};

SquareIdentity square_identity_check(uint64_t p);

struct SmoothSum {
    mpq_class enumerated;       // sum of 2^omega(d)/d over squarefree y-smooth d
    mpq_class product;          // prod_{p <= y} (1 + 2/p)
    mpq_class mertens_squared;  // (prod_{p <= y} (1 - 1/p)^{-1})^2
    bool equal = false;
    bool bounded = false;       // product <= mertens_squared
};

// Exact; enumeration is exponential in pi(y), so y <= 30.
SmoothSum smooth_squarefree_sum(uint32_t y);

struct SmoothBoundScan {
    uint64_t limit = 0;
    double log_product = 0.0;      // log prod (1 + 2/p)
    double log_mertens_sq = 0.0;   // 2 * log prod (1 - 1/p)^{-1}
    bool bounded_throughout = false;
};

// Running check of prod(1+2/p) <= (prod(1-1/p)^{-1})^2 at every prime <= limit.
SmoothBoundScan smooth_product_bound_scan(uint64_t limit);

struct TailSample {
    mpz_class v;
    double product = 1.0;   // prod_{p | v, p > y} (1 + 2/p)
    double bound = 1.0;     // exp(2 ln v / (y ln y))
};

struct TailReport {
    uint64_t samples = 0;   // samples with complete factorization
    uint64_t skipped = 0;   // factorization budget ran out
    double max_product = 1.0;
    double max_ratio = 0.0;   // product/bound, maximum over samples
    bool all_ok = true;
    TailSample worst;
};

// Draws n_sample values v uniformly from [2, Z] (deterministic in seed) and
// checks the large-prime-part product against exp(2 ln v / (y ln y)).
TailReport truncation_tail_bound(const mpz_class& Z, uint32_t y, uint64_t n_sample,
                                 uint64_t seed);

struct ResidueClassResult {
    uint64_t B_d = 1;       // gcd(d, j*a)
    uint64_t d_prime = 1;   // d / B_d
    uint64_t ell = 1;       // ord of a mod d_prime
    bool has_solution = false;
    uint64_t i0 = 0;        // solutions i >= 1 are exactly i == i0 (mod ell)
    bool gcd_chain_ok = true;   // gcd(d,s) == gcd(d,j*a^i) == gcd(d,j*a) at witnesses
};

// Solutions i >= 1 of d | j*a^i + s for squarefree d form a single residue
// class mod ord_a(d / gcd(d, ja)), or are empty; verified by scanning three
// full periods.
ResidueClassResult residue_class_of_i(uint64_t d, uint64_t a, int64_t j, int64_t s);

struct SieveRatioPoint {
    uint64_t x = 0;
    mpz_class W;
    mpz_class b;
    int64_t k = 1;
    int64_t h = 2;
    uint64_t count = 0;        // primes m <= x, m == b (mod W), |k*m + h| prime
    double normalized = 0.0;   // count * W * (ln x)^2 / x
    double product_factor = 1.0;
};

std::vector<SieveRatioPoint> sieve_ratio_experiment(const std::vector<uint64_t>& x_grid,
                                                    const mpz_class& W, const mpz_class& b,
                                                    int64_t k, int64_t h,
                                                    unsigned threads = 1);

}   // namespace delicate::analytic
