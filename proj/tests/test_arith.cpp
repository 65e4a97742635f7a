#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "delicate/arith.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"

using namespace delicate::arith;

TEST_CASE("is_prime_u64 agrees with trial division exhaustively below 20000") {
    for (uint64_t n = 0; n < 20000; ++n) CHECK(is_prime_u64(n) == oracle::is_prime_slow(n));
}

TEST_CASE("is_prime_u64 handles strong pseudoprimes and Carmichael numbers") {
    // composite despite fooling small Fermat / Miller-Rabin bases
    for (uint64_t n : {561ull, 41041ull, 825265ull, 3215031751ull, 3825123056546413051ull})
        CHECK_FALSE(is_prime_u64(n));
    CHECK(is_prime_u64((1ull << 61) - 1));   // Mersenne prime
    CHECK(is_prime_u64(18446744073709551557ull));   // largest 64-bit prime
    CHECK_FALSE(is_prime_u64((1ull << 61) + 1));
}

TEST_CASE("classify_prime on wide values matches Lucas-Lehmer certificates") {
    mpz_class m89 = (mpz_class(1) << 89) - 1;
    mpz_class m97 = (mpz_class(1) << 97) - 1;
    REQUIRE(oracle::lucas_lehmer(89));
    REQUIRE_FALSE(oracle::lucas_lehmer(97));
    CHECK(classify_prime(m89) == Primality::probable_prime);
    CHECK(classify_prime(m97) == Primality::composite);
    CHECK(classify_prime(m89 * m89) == Primality::composite);   // perfect square path
    CHECK(classify_prime(mpz_class(static_cast<unsigned long>((1ull << 61) - 1))) ==
          Primality::prime);   // u64 route
}

TEST_CASE("PrimeSieve window matches trial division and known prime counts") {
    PrimeSieve s(1000000, 1003000);
    for (uint64_t n = 1000000; n < 1003000; ++n)
        CHECK(s.is_prime(n) == oracle::is_prime_slow(n));
    CHECK(primes_below(100).size() == 25);
    CHECK(primes_below(1000000).size() == 78498);
    PrimeSieve tiny(0, 3);
    CHECK(tiny.count() == 1);   // just 2
}

TEST_CASE("segmented_sieve equals a flat sieve restarted mid-range") {
    std::vector<uint64_t> all = primes_below(20000);
    PrimeSieve window = segmented_sieve(7919, 20000);
    std::vector<uint64_t> seg;
    window.for_each_prime([&](uint64_t p) { seg.push_back(p); });
    std::vector<uint64_t> tail(all.begin() + (1000 - 1), all.end());   // 7919 = prime #1000
    CHECK(seg == tail);
}

TEST_CASE("factorize recovers known factorizations") {
    Factorization f = factorize(600851475143);
    REQUIRE(f.complete());
    REQUIRE(f.factors.size() == 4);
    CHECK(f.factors[0].prime == 71);
    CHECK(f.factors[1].prime == 839);
    CHECK(f.factors[2].prime == 1471);
    CHECK(f.factors[3].prime == 6857);
    CHECK(f.recompose() == 600851475143);

    mpz_class n = mpz_class(2) * 2 * 2 * 3 * 3 * 5 * 10007;
    Factorization g = factorize(n);
    REQUIRE(g.complete());
    CHECK(g.factors[0].exponent == 3);
    CHECK(g.factors[1].exponent == 2);
    CHECK(omega(n) == 4);
}

TEST_CASE("factorize splits semiprimes beyond the trial bound via rho") {
    mpz_class p31 = (mpz_class(1) << 31) - 1;
    mpz_class p61 = (mpz_class(1) << 61) - 1;
    Factorization f = factorize(p31 * p61);
    REQUIRE(f.complete());
    REQUIRE(f.factors.size() == 2);
    CHECK(f.factors[0].prime == p31);
    CHECK(f.factors[1].prime == p61);

    mpz_class n("1000000016000000063");   // 1000000007 * 1000000009
    Factorization g = factorize(n);
    REQUIRE(g.complete());
    CHECK(g.factors[0].prime == 1000000007);
    CHECK(g.factors[1].prime == 1000000009);
}

TEST_CASE("factorize reports honest incompleteness when the budget is too small") {
    mpz_class p("618970019642690137449562111");      // 2^89 - 1
    mpz_class q("162259276829213363391578010288127");  // 2^107 - 1
    FactorEffort effort;
    effort.trial_bound = 100;
    effort.rho_steps = 50;
    Factorization f = factorize(p * q, effort);
    CHECK_FALSE(f.complete());
    CHECK(f.unresolved == p * q);
    CHECK(f.recompose() == p * q);
    CHECK_THROWS_AS(omega(p * q, effort), std::runtime_error);
}

TEST_CASE("factorize with fresh_randomness still factors correctly") {
    FactorEffort effort;
    effort.fresh_randomness = true;
    mpz_class n("1000000016000000063");
    Factorization f = factorize(n, effort);
    REQUIRE(f.complete());
    CHECK(f.factors[0].prime == 1000000007);
}

TEST_CASE("multiplicative_order matches stepping on random moduli") {
    std::mt19937_64 rng(12345);
    int done = 0;
    while (done < 500) {
        uint64_t m = rng() % 5000 + 2;
        uint64_t a = rng() % m;
        if (std::gcd(a, m) != 1) continue;
        CHECK(multiplicative_order(a, m) == oracle::order_slow(a, m));
        ++done;
    }
    CHECK(multiplicative_order(10, 7) == 6);
    CHECK(multiplicative_order(2, 31) == 5);
    CHECK(multiplicative_order(2, 127) == 7);
    CHECK(multiplicative_order(2, 89) == 11);
    CHECK(multiplicative_order(2, 8191) == 13);
    CHECK_THROWS_AS(multiplicative_order(6, 33), std::domain_error);
}

TEST_CASE("multiplicative_order on mpz handles moduli past 64 bits") {
    mpz_class m = ((mpz_class(1) << 89) - 1) * 23;
    mpz_class ell = multiplicative_order(mpz_class(2), m);
    // order of 2 mod M89 is 89, mod 23 is 11
    CHECK(ell == 89 * 11);
    CHECK(multiplicative_order(mpz_class(3), mpz_class(797161)) == 13);
}

TEST_CASE("crt_combine agrees with brute-force scan and rejects bad systems") {
    std::mt19937_64 rng(999);
    const uint64_t mods[] = {3, 5, 7, 11, 13, 16, 9};
    for (int t = 0; t < 200; ++t) {
        uint64_t m1 = mods[rng() % 7], m2 = mods[rng() % 7];
        if (std::gcd(m1, m2) != 1) continue;
        uint64_t r1 = rng() % m1, r2 = rng() % m2;
        std::vector<Congruence> sys{{mpz_class(static_cast<unsigned long>(r1)), mpz_class(static_cast<unsigned long>(m1))},
                                    {mpz_class(static_cast<unsigned long>(r2)), mpz_class(static_cast<unsigned long>(m2))}};
        Congruence got = crt_combine(sys);
        CHECK(got.modulus == m1 * m2);
        CHECK(got.residue == oracle::crt_slow(r1, m1, r2, m2));
    }
    std::vector<Congruence> bad{{mpz_class(1), mpz_class(6)}, {mpz_class(2), mpz_class(10)}};
    CHECK_THROWS_AS(crt_combine(bad), std::invalid_argument);
}
