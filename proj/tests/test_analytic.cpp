#include "delicate/analytic.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

using namespace delicate::analytic;

namespace {

mpf_class abs_diff(const mpf_class& a, const mpf_class& b) {
    mpf_class d = a - b;
    return d < 0 ? mpf_class(-d) : d;
}

uint64_t omega_slow(uint64_t n) {
    uint64_t w = 0;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        ++w;
        while (n % p == 0) n /= p;
    }
    return w + (n > 1 ? 1 : 0);
}

}   // namespace

TEST_CASE("romanoff partial sum matches an exact rational recomputation") {
    SeriesEstimate est = romanoff_partial_sum(10, 2, 20);
    mpq_class sum = 0, block = 0;
    for (uint64_t n = 1; n <= 20; ++n) {
        if (std::gcd(n, uint64_t(10)) != 1) continue;
        uint64_t ell = n == 1 ? 1 : oracle::order_slow(10, n);
        mpq_class term(1, 1);
        for (uint64_t w = omega_slow(n); w > 0; --w) term *= 2;
        term /= mpq_class(static_cast<unsigned long>(n)) * static_cast<unsigned long>(ell);
        term.canonicalize();
        sum += term;
        if (2 * n > 20) block += term;
    }
    mpf_class want(sum, series_precision);
    mpf_class want_block(block, series_precision);
    CHECK(abs_diff(est.partial_sum, want) < mpf_class(1e-50, 64));
    CHECK(abs_diff(est.last_block, want_block) < mpf_class(1e-50, 64));
    CHECK(est.X == 20);
}

TEST_CASE("romanoff partial sums grow while block increments shrink") {
    SeriesEstimate a = romanoff_partial_sum(10, 2, 500);
    SeriesEstimate b = romanoff_partial_sum(10, 2, 5000);
    SeriesEstimate c = romanoff_partial_sum(10, 2, 50000);
    CHECK(a.partial_sum < b.partial_sum);
    CHECK(b.partial_sum < c.partial_sum);
    CHECK(a.last_block > b.last_block);
    CHECK(b.last_block > c.last_block);
}

TEST_CASE("romanoff is thread-count invariant and validates input") {
    SeriesEstimate one = romanoff_partial_sum(2, 3, 30000, 1);
    SeriesEstimate six = romanoff_partial_sum(2, 3, 30000, 6);
    CHECK(one.partial_sum == six.partial_sum);   // identical fold order by design
    CHECK(one.last_block == six.last_block);
    CHECK_THROWS_AS(romanoff_partial_sum(1, 2, 100), std::invalid_argument);
    CHECK_THROWS_AS(romanoff_partial_sum(10, 0, 100), std::invalid_argument);
}

TEST_CASE("mertens product matches exact rational product and tracks e^gamma ln x") {
    MertensResult r = mertens_product(100);
    mpq_class prod = 1;
    for (uint64_t p = 2; p <= 100; ++p) {
        if (!oracle::is_prime_slow(p)) continue;
        mpq_class f(static_cast<unsigned long>(p), static_cast<unsigned long>(p - 1));
        f.canonicalize();
        prod *= f;
    }
    mpf_class want(prod, series_precision);
    CHECK(abs_diff(r.product, want) < mpf_class(1e-50, 64));
    double ratio = mpf_class(r.product / r.reference).get_d();
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
}

TEST_CASE("square identity holds exactly for primes and rejects composites") {
    for (uint64_t p : {2, 3, 5, 7, 97, 7919}) {
        SquareIdentity r = square_identity_check(p);
        CHECK(r.equal);
        CHECK(r.lhs == r.rhs);
        mpq_class lhs(static_cast<unsigned long>(p * p),
                      static_cast<unsigned long>((p - 1) * (p - 1)));
        lhs.canonicalize();
        CHECK(r.lhs == lhs);
    }
    CHECK_THROWS_AS(square_identity_check(15), std::invalid_argument);
}

TEST_CASE("smooth squarefree sum telescopes to a clean product") {
    SmoothSum six = smooth_squarefree_sum(6);
    CHECK(six.enumerated == mpq_class(14, 3));
    CHECK(six.equal);
    SmoothSum ten = smooth_squarefree_sum(10);
    CHECK(ten.enumerated == 6);
    CHECK(ten.product == 6);
    for (uint32_t y = 2; y <= 30; ++y) {
        SmoothSum r = smooth_squarefree_sum(y);
        CHECK(r.equal);
        CHECK(r.bounded);
        CHECK(r.product <= r.mertens_squared);
    }
    CHECK_THROWS_AS(smooth_squarefree_sum(31), std::invalid_argument);
}

TEST_CASE("smooth product stays below the squared mertens product as primes accrue") {
    SmoothBoundScan scan = smooth_product_bound_scan(300);
    double lp = 0, lm = 0;
    for (uint64_t p = 2; p <= 300; ++p) {
        if (!oracle::is_prime_slow(p)) continue;
        lp += std::log1p(2.0 / static_cast<double>(p));
        lm += 2.0 * std::log(static_cast<double>(p) / static_cast<double>(p - 1));
    }
    CHECK(scan.log_product == doctest::Approx(lp).epsilon(1e-12));
    CHECK(scan.log_mertens_sq == doctest::Approx(lm).epsilon(1e-12));
    CHECK(scan.bounded_throughout);
}

TEST_CASE("truncation tail samples obey the exponential bound") {
    TailReport r = truncation_tail_bound(mpz_class(1000000000), 10, 100, 3);
    CHECK(r.samples + r.skipped == 100);
    CHECK(r.skipped == 0);
    CHECK(r.all_ok);
    CHECK(r.max_ratio <= 1.0 + 1e-12);
    CHECK(r.max_product >= 1.0);
    CHECK(r.worst.v >= 2);
    // same seed, same draw
    TailReport again = truncation_tail_bound(mpz_class(1000000000), 10, 100, 3);
    CHECK(again.max_ratio == r.max_ratio);
    CHECK(again.worst.v == r.worst.v);
    CHECK_THROWS_AS(truncation_tail_bound(mpz_class(100), 2, 10, 0), std::invalid_argument);
}

TEST_CASE("residue classes of solvable i form a single class mod ell") {
    ResidueClassResult none = residue_class_of_i(7, 10, 1, 0);
    CHECK_FALSE(none.has_solution);
    CHECK(none.ell == 6);

    ResidueClassResult neg = residue_class_of_i(7, 10, 1, -3);
    CHECK(neg.has_solution);
    CHECK(neg.i0 == 1);
    CHECK(neg.ell == 6);
    CHECK(neg.gcd_chain_ok);

    ResidueClassResult pos = residue_class_of_i(7, 10, 1, 3);
    CHECK(pos.has_solution);
    CHECK(pos.i0 == 4);

    // gcd(42, 10) = 2 does not divide s = -3, so no exponent works
    ResidueClassResult blocked = residue_class_of_i(42, 10, 1, -3);
    CHECK_FALSE(blocked.has_solution);
    CHECK(blocked.B_d == 2);
    CHECK(blocked.d_prime == 21);

    // B_d = 2 divides s = -4: solutions exist, governed by d' = 3
    ResidueClassResult split = residue_class_of_i(6, 10, 1, -4);
    CHECK(split.has_solution);
    CHECK(split.B_d == 2);
    CHECK(split.d_prime == 3);
    CHECK(split.ell == 1);
    CHECK(split.i0 == 0);

    ResidueClassResult unit = residue_class_of_i(1, 10, 1, 0);
    CHECK(unit.has_solution);
    CHECK(unit.ell == 1);

    CHECK_THROWS_AS(residue_class_of_i(45, 10, 1, 0), std::invalid_argument);   // 45 = 9*5
}

TEST_CASE("sieve ratio counts match direct enumeration on small grids") {
    struct Case {
        uint64_t W, b;
        int64_t k, h;
    };
    for (const Case& c : {Case{1, 0, 1, 2}, Case{6, 5, 1, 2}, Case{1, 0, 3, -7},
                          Case{2, 1, -1, 5}, Case{5, 2, 2, 9}}) {
        auto pts = sieve_ratio_experiment({10000}, mpz_class(static_cast<unsigned long>(c.W)),
                                          mpz_class(static_cast<unsigned long>(c.b)), c.k, c.h);
        REQUIRE(pts.size() == 1);
        uint64_t want = oracle::paired_prime_count_slow(10000, c.W, c.b, c.k, c.h);
        CHECK(pts[0].count == want);
        double expect_norm = static_cast<double>(want) * static_cast<double>(c.W) *
                             std::log(10000.0) * std::log(10000.0) / 10000.0;
        CHECK(pts[0].normalized == doctest::Approx(expect_norm).epsilon(1e-12));
    }
}

TEST_CASE("sieve ratio product factors multiply over W and h primes") {
    auto w1 = sieve_ratio_experiment({1000}, mpz_class(1), mpz_class(0), 1, 2);
    CHECK(w1[0].product_factor == doctest::Approx(2.0));
    auto w6 = sieve_ratio_experiment({1000}, mpz_class(6), mpz_class(5), 1, 2);
    CHECK(w6[0].product_factor == doctest::Approx(9.0));
    auto w30 = sieve_ratio_experiment({1000}, mpz_class(30), mpz_class(29), 1, 2);
    CHECK(w30[0].product_factor == doctest::Approx(14.0625));
    // h = 15 contributes 3 and 5 only when they do not already divide W
    auto h15 = sieve_ratio_experiment({1000}, mpz_class(2), mpz_class(1), 1, 15);
    CHECK(h15[0].product_factor == doctest::Approx(7.5));
    auto h15w30 = sieve_ratio_experiment({1000}, mpz_class(30), mpz_class(29), 1, 15);
    CHECK(h15w30[0].product_factor == doctest::Approx(14.0625));
}

TEST_CASE("sieve ratio validates its inputs") {
    CHECK_THROWS_AS(sieve_ratio_experiment({100}, mpz_class(1), mpz_class(0), 0, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(sieve_ratio_experiment({100}, mpz_class(6), mpz_class(2), 1, 2),
                    std::invalid_argument);   // gcd(b, W) != 1
    CHECK_THROWS_AS(sieve_ratio_experiment({100}, mpz_class(4), mpz_class(5), 1, 2),
                    std::invalid_argument);   // b >= W
}

TEST_CASE("sieve ratio is thread-count invariant at sieve-path sizes") {
    auto one = sieve_ratio_experiment({5000000}, mpz_class(6), mpz_class(5), 1, 2, 1);
    auto many = sieve_ratio_experiment({5000000}, mpz_class(6), mpz_class(5), 1, 2, 8);
    CHECK(one[0].count == many[0].count);
    CHECK(one[0].normalized == many[0].normalized);
}
