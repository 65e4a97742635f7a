#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace delicate::arith {

// ---------------------------------------------------------------------------
// 64-bit modular primitives
// ---------------------------------------------------------------------------

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t mod);

/// Deterministic primality for the full 64-bit range (tiered witness sets).
bool is_prime_u64(uint64_t n);

/// Exact below 2^64; strong probable-prime + strong Lucas above.
enum class Primality { composite, prime, probable_prime };

Primality classify_prime(const mpz_class& n);

inline bool is_prime(const mpz_class& n) {
    return classify_prime(n) != Primality::composite;
}

const char* to_string(Primality p);

// ---------------------------------------------------------------------------
// Sieving
// ---------------------------------------------------------------------------

/// Primality flags for the half-open interval [lo, hi), one bit per integer.
/// Immutable once built; safe to share across threads.
class PrimeSieve {
public:
    PrimeSieve(uint64_t lo, uint64_t hi);

    uint64_t lo() const { return lo_; }
    uint64_t hi() const { return hi_; }

    bool is_prime(uint64_t n) const {
        uint64_t t = n - lo_;
        return (bits_[t >> 6] >> (t & 63)) & 1u;
    }

    uint64_t count() const;

    template <class F>
    void for_each_prime(F&& f) const {
        for (uint64_t n = lo_; n < hi_; ++n)
            if (is_prime(n)) f(n);
    }

private:
    uint64_t lo_, hi_;
    std::vector<uint64_t> bits_;
};

/// Rejects hi <= lo.
PrimeSieve segmented_sieve(uint64_t lo, uint64_t hi);

/// All primes p < n, via a simple sieve.
std::vector<uint64_t> primes_below(uint64_t n);

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

struct FactorEffort {
    uint64_t trial_bound = 1'000'000;   // trial-divide by primes below this
    uint64_t rho_steps = 10'000'000;    // total iteration budget for rho
    bool fresh_randomness = false;      // default: rho seeded from n
    uint64_t seed = 0;                  // mixed in when fresh_randomness
};

struct FactorEntry {
    mpz_class prime;
    unsigned exponent;
    Primality status;   // prime, or probable_prime for wide factors
};

struct Factorization {
    mpz_class n;
    std::vector<FactorEntry> factors;   // primes strictly increasing
    mpz_class unresolved{1};            // composite cofactor left unfactored

    bool complete() const { return unresolved == 1; }
    mpz_class recompose() const;
};

/// Trial division below effort.trial_bound, then Brent rho within
/// effort.rho_steps. Never guesses: whatever cannot be resolved within the
/// budget is returned in `unresolved`.
Factorization factorize(const mpz_class& n, const FactorEffort& effort = {});

/// P(n): largest prime factor. nullopt when the factorization stayed partial.
std::optional<mpz_class> largest_prime_factor(const mpz_class& n,
                                              const FactorEffort& effort = {});

/// Number of distinct prime factors; omega(1) = 0. Throws if the
/// factorization cannot be completed within the effort budget.
unsigned omega(const mpz_class& n, const FactorEffort& effort = {});

// ---------------------------------------------------------------------------
// Multiplicative order
// ---------------------------------------------------------------------------

/// Least t >= 1 with a^t = 1 (mod d). Requires gcd(a, d) = 1 (domain_error)
/// and d >= 1 (invalid_argument for d = 0).
uint64_t multiplicative_order(uint64_t a, uint64_t d);

mpz_class multiplicative_order(const mpz_class& a, const mpz_class& d,
                               const FactorEffort& effort = {});

// ---------------------------------------------------------------------------
// Chinese remainder theorem
// ---------------------------------------------------------------------------

struct Congruence {
    mpz_class residue;
    mpz_class modulus;
};

/// Solves x = r_i (mod m_i) for pairwise coprime moduli; result residue is
/// the minimal nonnegative one. Rejects non-coprime moduli, naming the pair.
Congruence crt_combine(const std::vector<Congruence>& congruences);

namespace detail {
// Exposed for direct testing; classify_prime composes these.
bool strong_prp_base(const mpz_class& n, unsigned long base);
bool strong_lucas_prp(const mpz_class& n);
}   // namespace detail

}   // namespace delicate::arith
