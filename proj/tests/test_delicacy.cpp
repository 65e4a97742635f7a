#include "delicate/delicacy.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "oracles.hpp"

using namespace delicate::delicacy;
using delicate::digits::Perturbation;
using delicate::digits::PerturbationBox;

namespace {

// direct box evaluation with trial division, mirroring the published rule
// rather than the library's loop structure
struct NaiveBoxVerdict {
    bool pass = true;
    std::optional<Perturbation> witness;
    std::optional<uint64_t> value;
};

NaiveBoxVerdict naive_box(uint64_t p, const PerturbationBox& box, Mode mode) {
    NaiveBoxVerdict out;
    box.for_each([&](const Perturbation& t) {
        __int128 pw = 1;
        for (uint32_t e = 0; e < t.i; ++e) pw *= t.a;
        __int128 v = static_cast<__int128>(t.k) * p + static_cast<__int128>(t.j) * pw + t.s;
        if (v < 0) v = -v;
        uint64_t vu = static_cast<uint64_t>(v);
        bool bad;
        if (vu <= 1) {
            bad = true;
        } else if (vu == p) {
            bad = mode == Mode::tao_box;
        } else {
            bad = oracle::is_prime_slow(vu);
        }
        if (bad) {
            out.pass = false;
            out.witness = t;
            out.value = vu;
            return false;
        }
        return true;
    });
    return out;
}

}   // namespace

TEST_CASE("digit-change verdicts and least-value witnesses on known cases") {
    DelicacyReport r = is_digitally_delicate(uint64_t(294001), 10);
    CHECK(r.pass);
    CHECK_FALSE(r.witness.has_value());

    DelicacyReport f = is_digitally_delicate(uint64_t(13), 10);
    CHECK_FALSE(f.pass);
    REQUIRE(f.witness.has_value());
    CHECK(f.witness->value == 3);
    CHECK(f.witness->tuple == Perturbation{10, 1, -1, 1, 0});
    CHECK(f.witness->status == ValueStatus::prime);

    DelicacyReport g = is_digitally_delicate(uint64_t(101), 10);
    REQUIRE(g.witness.has_value());
    CHECK(g.witness->value == 103);   // the unit variant 1 is acceptable, 103 is not
    CHECK(g.excluded_le1 == 1);

    CHECK_THROWS_AS(is_digitally_delicate(uint64_t(15), 10), std::invalid_argument);
}

TEST_CASE("digit-change agrees with direct enumeration on a whole interval") {
    for (uint64_t p = 2; p < 3000; ++p) {
        if (!oracle::is_prime_slow(p)) continue;
        CHECK(is_digitally_delicate(p, 10).pass == oracle::delicate_one_slow(p, 10));
        if (p < 500) CHECK(is_digitally_delicate(p, 2).pass == oracle::delicate_one_slow(p, 2));
    }
}

TEST_CASE("digit-change mpz path matches the u64 path") {
    for (uint64_t p : {294001ull, 971767ull, 982451653ull}) {
        if (!oracle::is_prime_slow(p)) continue;
        DelicacyReport a = is_digitally_delicate(p, 10);
        DelicacyReport b = is_digitally_delicate(mpz_class(static_cast<unsigned long>(p)), 10);
        CHECK(a.pass == b.pass);
        CHECK(a.witness.has_value() == b.witness.has_value());
        if (a.witness) CHECK(a.witness->value == b.witness->value);
    }
}

TEST_CASE("digit-change on a value past 64 bits cross-checks against gmp") {
    mpz_class m89 = (mpz_class(1) << 89) - 1;
    DelicacyReport r = is_digitally_delicate(m89, 10);
    if (r.pass) {
        for (const mpz_class& v : delicate::digits::single_digit_variants(m89, 10)) {
            if (v <= 1) continue;
            CHECK(mpz_probab_prime_p(v.get_mpz_t(), 40) == 0);
        }
    } else {
        REQUIRE(r.witness.has_value());
        CHECK(mpz_probab_prime_p(r.witness->value.get_mpz_t(), 40) >= 1);
        CHECK(r.used_probable);
    }
}

TEST_CASE("box modes agree with naive enumeration including first witness") {
    PerturbationBox box(2, 120, {0});
    PerturbationBox shifted(2, 120, {-1, 3});
    for (uint64_t p = 2; p < 1000; ++p) {
        if (!oracle::is_prime_slow(p)) continue;
        for (Mode mode : {Mode::tao_box, Mode::theorem2_box}) {
            for (const PerturbationBox* bx : {&box, &shifted}) {
                NaiveBoxVerdict want = naive_box(p, *bx, mode);
                DelicacyReport got = is_widely_delicate(mpz_class(static_cast<unsigned long>(p)), *bx, mode);
                CHECK(got.pass == want.pass);
                if (!want.pass) {
                    REQUIRE(got.witness.has_value());
                    CHECK(got.witness->tuple == *want.witness);
                    CHECK(got.witness->value == *want.value);
                }
            }
        }
    }
}

TEST_CASE("theorem2 box tolerates the value p itself where tao does not") {
    // with s = -1 the tuple (1, i, 1, 1, -1) evaluates to p exactly; p = 29 is
    // the first prime whose scan reaches it, so the two modes part ways there
    PerturbationBox box(2, 50, {-1});
    DelicacyReport tao = is_widely_delicate(mpz_class(29), box, Mode::tao_box);
    DelicacyReport th2 = is_widely_delicate(mpz_class(29), box, Mode::theorem2_box);
    CHECK_FALSE(tao.pass);
    REQUIRE(tao.witness.has_value());
    CHECK(tao.witness->tuple == Perturbation{1, 0, 1, 1, -1});
    CHECK(tao.witness->value == 29);
    CHECK_FALSE(th2.pass);
    REQUIRE(th2.witness.has_value());
    CHECK(th2.witness->tuple == Perturbation{1, 0, 2, 2, -1});
    CHECK(th2.witness->value == 59);
    CHECK(th2.equal_p >= 1);
}

TEST_CASE("the first failing tuple for p=5 in the K=2 box") {
    PerturbationBox box(2, 100, {0});
    DelicacyReport r = is_widely_delicate(mpz_class(5), box, Mode::theorem2_box);
    CHECK_FALSE(r.pass);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->tuple == Perturbation{1, 0, -2, 1, 0});
    CHECK(r.witness->value == 3);
}

TEST_CASE("search_interval digit-change matches per-prime checks and counts") {
    SearchParams params;
    params.lo = 2;
    params.hi = 10000;
    params.mode = Mode::digit_change;
    params.base = 10;
    SearchResult res = search_interval(params);
    CHECK(res.stats.tested == 1229);   // primes below 10^4
    CHECK(res.stats.passing == 0);     // first base-10 case is 294001
    CHECK(res.primes.empty());

    params.base = 2;
    SearchResult bin = search_interval(params);
    std::vector<uint64_t> naive = oracle::delicate_slow(2, 10000, 2);
    CHECK(bin.primes == naive);
}

TEST_CASE("search_interval respects a residue class restriction") {
    SearchParams params;
    params.lo = 2;
    params.hi = 20000;
    params.mode = Mode::theorem2_box;
    params.box.emplace(2, 2, std::vector<int64_t>{0});
    params.cls = ResidueClass{mpz_class(2), mpz_class(31)};
    SearchResult res = search_interval(params);
    uint64_t expect_tested = 0;
    for (uint64_t p = 2; p < 20000; ++p)
        if (oracle::is_prime_slow(p) && p % 31 == 2) ++expect_tested;
    CHECK(res.stats.tested == expect_tested);
    CHECK(res.stats.W == 31);
    CHECK(res.stats.b == 2);
    for (uint64_t p : res.primes) CHECK(p % 31 == 2);
}

TEST_CASE("search_interval rejects an invalid residue class") {
    SearchParams params;
    params.lo = 2;
    params.hi = 100;
    params.cls = ResidueClass{mpz_class(3), mpz_class(6)};   // gcd != 1
    CHECK_THROWS_AS(search_interval(params), std::invalid_argument);
}

TEST_CASE("search results are independent of the thread count") {
    for (Mode mode : {Mode::digit_change, Mode::theorem2_box}) {
        SearchParams params;
        params.lo = 2;
        params.hi = 50000;
        params.mode = mode;
        params.collect_reports = true;
        if (mode != Mode::digit_change) params.box.emplace(2, 2, std::vector<int64_t>{0});
        params.threads = 1;
        SearchResult one = search_interval(params);
        params.threads = 7;
        SearchResult many = search_interval(params);
        CHECK(one.primes == many.primes);
        CHECK(one.stats.tested == many.stats.tested);
        CHECK(one.stats.excluded_le1 == many.stats.excluded_le1);
        REQUIRE(one.reports.size() == many.reports.size());
        for (size_t i = 0; i < one.reports.size(); ++i) {
            CHECK(one.reports[i].p == many.reports[i].p);
            CHECK(one.reports[i].pass == many.reports[i].pass);
        }
    }
}

TEST_CASE("density_report computes N, counts, and the log-weighted ratio") {
    SearchParams params;
    params.lo = 1000;
    params.hi = 1501;
    params.mode = Mode::digit_change;
    params.base = 2;
    SearchResult res = search_interval(params);
    std::vector<DensityRow> rows = density_report({res.stats});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].N == 1000);
    CHECK(rows[0].Q_N == res.stats.tested);
    CHECK(rows[0].K_N == res.stats.passing);
    if (res.stats.passing > 0) {
        double expect = static_cast<double>(res.stats.passing) * std::log(1000.0) / 1000.0;
        CHECK(rows[0].ratio == doctest::Approx(expect).epsilon(1e-12));
    } else {
        CHECK(rows[0].ratio == 0.0);
    }
}
