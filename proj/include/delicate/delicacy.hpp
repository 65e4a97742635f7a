#pragma once

#include "delicate/arith.hpp"
#include "delicate/digits.hpp"

#include <optional>
#include <string>
#include <vector>

namespace delicate::delicacy {

// digit_change:  every single-digit variant must be composite or <= 1.
// tao_box:       every box value |k*p + j*a^i + s| must be composite;
//                0, 1, primes, and p itself all fail.
// theorem2_box:  every box value must be composite or equal to p;
//                0 and 1 fail.
enum class Mode { digit_change, tao_box, theorem2_box };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

enum class ValueStatus { prime, probable_prime, unit_or_zero };

const char* to_string(ValueStatus s);

struct Witness {
    digits::Perturbation tuple;
    mpz_class value;
    ValueStatus status = ValueStatus::prime;
};

struct DelicacyReport {
    mpz_class p;
    Mode mode = Mode::digit_change;
    bool pass = false;
    std::optional<Witness> witness;   // present iff !pass
    uint64_t tested = 0;              // variants / tuples evaluated
    uint64_t excluded_le1 = 0;        // values that came out 0 or 1
    uint64_t equal_p = 0;             // values equal to p
    arith::Primality p_status = arith::Primality::prime;
    bool used_probable = false;       // some decision rested on a probable-prime call
};

// Witness on failure is the least failing value. Throws if p is not prime.
DelicacyReport is_digitally_delicate(uint64_t p, uint32_t base);
DelicacyReport is_digitally_delicate(const mpz_class& p, uint32_t base);

// Witness on failure is the first failing tuple in box enumeration order.
// mode must be one of the box modes.
DelicacyReport is_widely_delicate(const mpz_class& p, const digits::PerturbationBox& box,
                                  Mode mode);

struct ResidueClass {
    mpz_class b = 0;
    mpz_class W = 1;
};

struct SearchParams {
    uint64_t lo = 0;
    uint64_t hi = 0;   // exclusive
    Mode mode = Mode::digit_change;
    uint32_t base = 10;                                   // digit_change
    std::optional<digits::PerturbationBox> box;           // box modes
    std::optional<ResidueClass> cls;
    bool collect_reports = false;
    unsigned threads = 1;
};

struct SearchStats {
    uint64_t lo = 0;
    uint64_t hi = 0;
    mpz_class W = 1;
    mpz_class b = 0;
    uint64_t tested = 0;         // primes examined (Q_N when a class is set)
    uint64_t excluded_le1 = 0;   // primes with some value <= 1
    uint64_t passing = 0;        // K_N
};

struct SearchResult {
    SearchStats stats;
    std::vector<uint64_t> primes;   // passing, ascending
    std::vector<DelicacyReport> reports;   // per tested prime, if requested
};

// Primes in [lo, hi), restricted to b mod W when given, run through the
// selected predicate. Chunked internally; identical output for any thread
// count.
SearchResult search_interval(const SearchParams& params);

struct DensityRow {
    uint64_t N = 0;
    uint64_t Q_N = 0;
    uint64_t K_N = 0;
    double ratio = 0.0;   // K_N * ln N / N
};

std::vector<DensityRow> density_report(const std::vector<SearchStats>& stats);

}   // namespace delicate::delicacy
