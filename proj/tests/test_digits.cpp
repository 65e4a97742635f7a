#include "delicate/digits.hpp"

#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace delicate::digits;

TEST_CASE("digit conversion round trips and matches positional arithmetic") {
    DigitString d = to_digits(mpz_class(294001), 10);
    CHECK(d.length() == 6);
    CHECK(d.digits == std::vector<uint32_t>{1, 0, 0, 4, 9, 2});
    CHECK(d.value() == 294001);
    CHECK(from_digits(d) == 294001);

    DigitString b = to_digits(uint64_t(13), 2);
    CHECK(b.digits == std::vector<uint32_t>{1, 0, 1, 1});

    std::mt19937_64 rng(42);
    for (int t = 0; t < 100; ++t) {
        uint64_t n = rng() >> (rng() % 40);
        uint32_t base = 2 + rng() % 35;
        CHECK(from_digits(to_digits(n, base)) == n);
    }
    CHECK_THROWS_AS(to_digits(uint64_t(5), 1), std::invalid_argument);
}

TEST_CASE("single_digit_variants enumerates position-major, digit-minor") {
    std::vector<uint64_t> v = single_digit_variants(uint64_t(13), 10);
    std::vector<uint64_t> expect{
        10, 11, 12, 14, 15, 16, 17, 18, 19,              // ones digit 3 -> r
        3, 23, 33, 43, 53, 63, 73, 83, 93,               // tens digit 1 -> r
    };
    CHECK(v == expect);
    CHECK(v.size() == 2 * 9);

    // leading digit replaced by zero shortens the number, still a valid variant
    std::vector<uint64_t> w = single_digit_variants(uint64_t(101), 10);
    CHECK(w.size() == 27);
    CHECK(std::count(w.begin(), w.end(), 1) == 1);

    // mpz overload agrees with the u64 one
    std::vector<mpz_class> m = single_digit_variants(mpz_class(13), 10);
    REQUIRE(m.size() == v.size());
    for (size_t i = 0; i < v.size(); ++i) CHECK(m[i] == v[i]);
}

TEST_CASE("append and prepend variants match the worked example") {
    // p = 5, base 2, one digit each way: end gives 10 and 11, front gives 13
    std::vector<mpz_class> e = end_append_variants(mpz_class(5), 2, 1);
    CHECK(e == std::vector<mpz_class>{10, 11});
    std::vector<mpz_class> f = prepend_variants(mpz_class(5), 2, 1);
    CHECK(f == std::vector<mpz_class>{13});
    std::vector<mpz_class> a = append_variants(mpz_class(5), 2, 1);
    CHECK(a == std::vector<mpz_class>{10, 11, 13});
}

TEST_CASE("append variants are sorted and deduplicated across both ends") {
    std::vector<mpz_class> a = append_variants(mpz_class(7), 10, 2);
    std::set<mpz_class> seen(a.begin(), a.end());
    CHECK(seen.size() == a.size());
    CHECK(std::is_sorted(a.begin(), a.end()));
    // end-append with t=1: 70..79; t=2: 700..799; prepend v=1..99: 17,27,...,997
    CHECK(seen.count(70) == 1);
    CHECK(seen.count(717) == 1);
    CHECK(seen.count(177) == 1);
    CHECK(seen.count(907) == 1);
    CHECK(seen.count(7000) == 0);    // would need three appended digits
    CHECK(seen.count(1077) == 0);    // would need a three-digit prefix
}

TEST_CASE("perturbation evaluates |k p + j a^i + s|") {
    Perturbation t{10, 1, -1, 1, 0};
    CHECK(t.value_of(mpz_class(13)) == 3);
    Perturbation u{1, 0, -2, 1, 0};
    CHECK(u.value_of(mpz_class(5)) == 3);
    CHECK(u.value_of(mpz_class(2)) == 0);
    Perturbation w{2, 3, 2, 3, -5};   // |3p + 2*8 - 5|
    CHECK(w.value_of(mpz_class(7)) == 32);
    CHECK(w.value_of(mpz_class(-20)) == 49);
}

TEST_CASE("perturbation box enumerates the lex order (a, i, j, k, s)") {
    PerturbationBox box(2, 100, {0});
    CHECK(box.i_max() == 9);   // floor(2 ln 100)
    CHECK(box.tuple_count() == 2 * 10 * 4 * 2 * 1);

    Perturbation first = box.tuple_at(0);
    CHECK(first == Perturbation{1, 0, -2, 1, 0});
    Perturbation second = box.tuple_at(1);
    CHECK(second == Perturbation{1, 0, -2, 2, 0});
    Perturbation last = box.tuple_at(box.tuple_count() - 1);
    CHECK(last == Perturbation{2, 9, 2, 2, 0});

    // for_each visits tuple_at(idx) in order and stops when told to
    uint64_t idx = 0;
    box.for_each([&](const Perturbation& t) {
        CHECK(t == box.tuple_at(idx));
        ++idx;
        return true;
    });
    CHECK(idx == box.tuple_count());
    idx = 0;
    box.for_each([&](const Perturbation&) { return ++idx < 5; });
    CHECK(idx == 5);
}

TEST_CASE("perturbation box validates its parameters") {
    CHECK_THROWS_AS(PerturbationBox(1, 100, {0}), std::invalid_argument);     // K >= 2
    CHECK_THROWS_AS(PerturbationBox(2, 100, {0, 1, 2}), std::invalid_argument);   // |S| <= K
    CHECK_THROWS_AS(PerturbationBox(2, 100, {500}), std::invalid_argument);   // |s| <= K N
    PerturbationBox ok(2, 100, {17, -3});
    CHECK(ok.tuple_count() == 2 * 10 * 4 * 2 * 2);
    // shifts are kept sorted regardless of input order
    CHECK(ok.tuple_at(0).s == -3);
    CHECK(ok.tuple_at(1).s == 17);
}

TEST_CASE("box shifts deduplicate and the j axis skips zero") {
    PerturbationBox box(3, 50, {0, 0});
    CHECK(box.tuple_count() == 3 * (box.i_max() + 1) * 6 * 3 * 1);
    std::set<int32_t> js;
    box.for_each([&](const Perturbation& t) {
        js.insert(t.j);
        return true;
    });
    CHECK(js == std::set<int32_t>{-3, -2, -1, 1, 2, 3});
}
