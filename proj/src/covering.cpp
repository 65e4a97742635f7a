#include "delicate/covering.hpp"

#include "delicate/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

namespace delicate::covering {

using ordered_json = nlohmann::ordered_json;

const char* to_string(ClassChoice c) {
    return c == ClassChoice::j_plus_s ? "j+s" : "ja+s";
}

std::string FamilyKey::label() const {
    std::ostringstream os;
    os << "(a=" << a << ", j=" << j << ", k=" << k << ", s_index=" << s_index << ")";
    return os.str();
}

const CoveringPrime& CoveringSystem::by_p(uint64_t p) const {
    for (const auto& cp : primes)
        if (cp.p == p) return cp;
    throw std::out_of_range("CoveringSystem: no such p");
}

std::vector<const CoveringPrime*> CoveringSystem::for_base(uint32_t a) const {
    std::vector<const CoveringPrime*> out;
    for (const auto& cp : primes)
        if (cp.a == a) out.push_back(&cp);
    return out;
}

double CoveringSystem::harmonic_mass(uint32_t a) const {
    double m = 0;
    for (const auto& cp : primes)
        if (cp.a == a) m += 1.0 / static_cast<double>(cp.p);
    return m;
}

std::vector<std::vector<CoveringPrime>> build_p_sets(uint32_t K, double M,
                                                     const BuildOptions& opts) {
    if (K < 2) throw std::invalid_argument("build_p_sets: K must be >= 2");
    if (M <= 0) throw std::invalid_argument("build_p_sets: M must be > 0");

    std::vector<uint64_t> candidates = arith::primes_below(opts.prime_cap + 1);
    std::set<uint64_t> used_p;
    std::set<mpz_class> used_q;
    std::vector<std::vector<CoveringPrime>> out;

    for (uint32_t a = 2; a <= K; ++a) {
        std::vector<CoveringPrime> pa;
        double mass = 0;
        for (uint64_t p : candidates) {
            if (mass >= M) break;
            if (p <= K + 1 || used_p.count(p)) continue;

            mpz_class apm1;
            mpz_ui_pow_ui(apm1.get_mpz_t(), a, p);
            apm1 -= 1;
            arith::Factorization f = arith::factorize(apm1, opts.effort);
            mpz_class q;
            bool certified = f.complete();
            bool found = false;
            // walk proven primes from the top
            for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
                if (it->status != arith::Primality::composite) {
                    q = it->prime;
                    found = true;
                    break;
                }
            }
            if (!found) {
                std::cerr << "build_p_sets: a=" << a << " p=" << p
                          << ": no proven prime factor of a^p-1 within budget, skipping\n";
                continue;
            }
            if (!certified)
                std::cerr << "build_p_sets: a=" << a << " p=" << p
                          << ": factorization incomplete, using largest proven prime factor "
                          << q.get_str() << "\n";

            if (q <= K) continue;
            if (used_q.count(q)) continue;
            if (mpz_fdiv_ui(q.get_mpz_t(), p) != 1) continue;
            // order of a mod q divides the prime p, so order == p iff a != 1 mod q
            mpz_class am = mpz_class(a) % q;
            if (am == 1) continue;
            mpz_class pw;
            mpz_powm_ui(pw.get_mpz_t(), mpz_class(a).get_mpz_t(), p, q.get_mpz_t());
            if (pw != 1) continue;

            pa.push_back({a, p, q, certified});
            used_p.insert(p);
            used_q.insert(q);
            mass += 1.0 / static_cast<double>(p);
        }
        if (mass < M) {
            std::ostringstream os;
            os << "build_p_sets: a=" << a << ": mass " << mass << " < M=" << M
               << " within prime cap " << opts.prime_cap;
            throw std::runtime_error(os.str());
        }
        out.push_back(std::move(pa));
    }
    return out;
}

std::map<FamilyKey, std::vector<size_t>> partition_sets(
    const std::vector<CoveringPrime>& primes, uint32_t K, const std::vector<int64_t>& S,
    double M, PartitionMode mode, double epsilon) {
    if (K < 2) throw std::invalid_argument("partition_sets: K must be >= 2");
    if (S.empty()) throw std::invalid_argument("partition_sets: S must be nonempty");

    // canonical cell order per base: j = -K..-1, 1..K; k = 1..K; s ascending
    std::vector<std::pair<int32_t, uint32_t>> jk;
    for (int32_t j = -static_cast<int32_t>(K); j <= static_cast<int32_t>(K); ++j) {
        if (j == 0) continue;
        for (uint32_t k = 1; k <= K; ++k) jk.push_back({j, k});
    }
    const size_t cells_per_a = jk.size() * S.size();
    const double cell_target = M / static_cast<double>(cells_per_a);

    std::map<FamilyKey, std::vector<size_t>> part;
    for (uint32_t a = 2; a <= K; ++a) {
        std::vector<size_t> mine;
        for (size_t idx = 0; idx < primes.size(); ++idx)
            if (primes[idx].a == a) mine.push_back(idx);
        if (mine.empty()) {
            std::ostringstream os;
            os << "partition_sets: P_" << a << " is empty but " << cells_per_a
               << " cells are required";
            throw std::invalid_argument(os.str());
        }
        if (mode == PartitionMode::strict) {
            double total = 0;
            for (size_t idx : mine) total += 1.0 / static_cast<double>(primes[idx].p);
            double required = M * static_cast<double>(cells_per_a);
            if (total < required) {
                std::ostringstream os;
                os << "partition_sets: a=" << a << ": total mass " << total
                   << " below required " << required;
                throw std::invalid_argument(os.str());
            }
        }

        std::vector<FamilyKey> cell_keys;
        for (size_t c = 0; c < jk.size(); ++c)
            for (uint32_t si = 0; si < S.size(); ++si)
                cell_keys.push_back({a, jk[c].first, jk[c].second, si});
        for (const auto& key : cell_keys) part[key] = {};

        // primes are ordered by ascending p, so this deals descending 1/p
        for (size_t t = 0; t < mine.size(); ++t)
            part[cell_keys[t % cell_keys.size()]].push_back(mine[t]);

        if (mode == PartitionMode::strict) {
            for (const auto& key : cell_keys) {
                double cm = 0;
                for (size_t idx : part[key]) cm += 1.0 / static_cast<double>(primes[idx].p);
                if (cm < cell_target * (1.0 - epsilon)) {
                    std::ostringstream os;
                    os << "partition_sets: cell " << key.label() << " mass " << cm
                       << " below target " << cell_target << " * (1 - " << epsilon << ")";
                    throw std::invalid_argument(os.str());
                }
            }
        }
    }
    return part;
}

void choose_b(CoveringSystem& sys) {
    if (sys.partition.empty()) throw std::invalid_argument("choose_b: partition not built");
    std::vector<arith::Congruence> congruences;
    sys.choices.clear();
    for (const auto& [key, cell] : sys.partition) {
        int64_t s = sys.S.at(key.s_index);
        for (size_t idx : cell) {
            const CoveringPrime& cp = sys.primes.at(idx);
            const mpz_class& q = cp.q;
            mpz_class kinv;
            if (mpz_invert(kinv.get_mpz_t(), mpz_class(key.k).get_mpz_t(), q.get_mpz_t()) == 0)
                throw std::runtime_error("choose_b: k not invertible mod q_p at " + key.label());
            auto reduce = [&](const mpz_class& x) {
                mpz_class r = x % q;
                if (r < 0) r += q;
                return r;
            };
            mpz_class c1 = reduce(kinv * (mpz_class(key.j) + s));
            mpz_class c2 = reduce(kinv * (mpz_class(key.j) * key.a + s));
            Choice ch;
            if (c1 != 0) {
                ch = {ClassChoice::j_plus_s, c1};
            } else if (c2 != 0) {
                ch = {ClassChoice::ja_plus_s, c2};
            } else {
                std::ostringstream os;
                os << "choose_b: both residue classes vanish mod q=" << q.get_str() << " for p="
                   << cp.p << " in cell " << key.label();
                throw std::runtime_error(os.str());
            }
            sys.choices[cp.p] = ch;
            congruences.push_back({reduce(-ch.b_p), q});
        }
    }
    arith::Congruence combined = arith::crt_combine(congruences);
    sys.b = combined.residue;
    sys.W = combined.modulus;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), sys.b.get_mpz_t(), sys.W.get_mpz_t());
    if (sys.W > 1 && g != 1)
        throw std::runtime_error("choose_b: gcd(b, W) = " + g.get_str() + " != 1");
}

CoveringSystem build_system(uint32_t K, double M, const std::vector<int64_t>& S,
                            const BuildOptions& opts) {
    CoveringSystem sys;
    sys.K = K;
    sys.M = M;
    sys.S = S;
    std::sort(sys.S.begin(), sys.S.end());
    sys.S.erase(std::unique(sys.S.begin(), sys.S.end()), sys.S.end());
    if (sys.S.empty()) throw std::invalid_argument("build_system: S must be nonempty");

    auto sets = build_p_sets(K, M, opts);
    for (auto& pa : sets)
        for (auto& cp : pa) sys.primes.push_back(cp);
    sys.partition = partition_sets(sys.primes, K, sys.S, M, opts.partition, opts.epsilon);
    choose_b(sys);
    return sys;
}

CoverageAudit audit_coverage(const CoveringSystem& sys, const FamilyKey& family,
                             uint32_t i_max) {
    if (family.a < 2 || family.a > sys.K)
        throw std::invalid_argument("audit_coverage: a out of range");
    if (family.j == 0 || std::abs(family.j) > static_cast<int32_t>(sys.K))
        throw std::invalid_argument("audit_coverage: j out of range");
    if (family.k < 1 || family.k > sys.K)
        throw std::invalid_argument("audit_coverage: k out of range");
    if (family.s_index >= sys.S.size())
        throw std::invalid_argument("audit_coverage: s_index out of range");

    CoverageAudit audit;
    audit.family = family;
    audit.i_max = i_max;
    audit.density = 1;

    const std::vector<size_t>* cell = nullptr;
    auto it = sys.partition.find(family);
    if (it != sys.partition.end()) cell = &it->second;

    int64_t s = sys.S.at(family.s_index);
    std::vector<uint8_t> covered(static_cast<size_t>(i_max) + 1, 0);

    if (cell) {
        audit.family_size = cell->size();
        for (size_t idx : *cell) {
            const CoveringPrime& cp = sys.primes.at(idx);
            const Choice& ch = sys.choices.at(cp.p);
            uint32_t r = ch.cls == ClassChoice::j_plus_s ? 0 : 1;
            const mpz_class& q = cp.q;

            // constant part k*b + s mod q, plus a^i stepped by a^p
            mpz_class base_term = (mpz_class(family.k) * sys.b + s) % q;
            mpz_class ai, step;
            mpz_powm_ui(ai.get_mpz_t(), mpz_class(family.a).get_mpz_t(), r, q.get_mpz_t());
            mpz_powm_ui(step.get_mpz_t(), mpz_class(family.a).get_mpz_t(),
                        static_cast<unsigned long>(cp.p), q.get_mpz_t());
            for (uint64_t i = r; i <= i_max; i += cp.p) {
                mpz_class v = (base_term + mpz_class(family.j) * ai) % q;
                if (v < 0) v += q;
                ++audit.checked_congruences;
                if (v != 0) {
                    std::ostringstream os;
                    os << "audit_coverage: violation in family " << family.label() << ": q="
                       << q.get_str() << " does not divide k*b + j*a^i + s at i=" << i
                       << " (claimed class i == " << r << " mod " << cp.p << ")";
                    throw std::runtime_error(os.str());
                }
                covered[i] = 1;
                ai = ai * step % q;
            }
            audit.density *= mpq_class(mpz_class(cp.p) - 1, mpz_class(cp.p));
        }
    }
    audit.density.canonicalize();
    for (uint8_t c : covered) audit.covered += c;
    audit.uncovered = i_max + 1 - audit.covered;
    audit.predicted_bound = audit.density * mpq_class(i_max + 1);
    audit.predicted_bound.canonicalize();
    double dens = audit.density.get_d();
    audit.empirical_exponent = (sys.M > 0 && dens < 1.0) ? -std::log(dens) / sys.M : 0.0;
    return audit;
}

std::vector<CoverageAudit> audit_all(const CoveringSystem& sys, uint32_t i_max,
                                     unsigned threads) {
    std::vector<FamilyKey> keys;
    for (const auto& [key, cell] : sys.partition) keys.push_back(key);
    std::vector<CoverageAudit> out(keys.size());
    par::run_chunks(keys.size(), threads, [&](uint64_t c) {
        out[c] = audit_coverage(sys, keys[c], i_max);
    });
    return out;
}

Qo1Result qo1_check(const CoveringSystem& sys) {
    Qo1Result r;
    for (const auto& cp : sys.primes) {
        r.sum_inv_q += 1.0 / cp.q.get_d();
        double p = static_cast<double>(cp.p);
        r.sum_inv_plogp += 1.0 / (p * std::log(p));
    }
    return r;
}

std::string to_json(const CoveringSystem& sys) {
    ordered_json doc;
    doc["K"] = sys.K;
    doc["M"] = sys.M;
    doc["S"] = sys.S;
    ordered_json plist = ordered_json::array();
    for (const auto& cp : sys.primes) {
        ordered_json e;
        e["a"] = cp.a;
        e["p"] = cp.p;
        e["q"] = cp.q.get_str();
        e["certified_maximal"] = cp.certified_maximal;
        plist.push_back(e);
    }
    doc["P"] = plist;
    ordered_json parts = ordered_json::array();
    for (const auto& [key, cell] : sys.partition) {
        ordered_json e;
        e["a"] = key.a;
        e["j"] = key.j;
        e["k"] = key.k;
        e["s_index"] = key.s_index;
        std::vector<uint64_t> ps;
        for (size_t idx : cell) ps.push_back(sys.primes.at(idx).p);
        e["p"] = ps;
        parts.push_back(e);
    }
    doc["partition"] = parts;
    ordered_json choices = ordered_json::array();
    for (const auto& [p, ch] : sys.choices) {
        ordered_json e;
        e["p"] = p;
        e["class"] = to_string(ch.cls);
        e["b_p"] = ch.b_p.get_str();
        choices.push_back(e);
    }
    doc["choices"] = choices;
    doc["W"] = sys.W.get_str();
    doc["b"] = sys.b.get_str();
    return doc.dump(2);
}

CoveringSystem system_from_json(const std::string& text) {
    ordered_json doc = ordered_json::parse(text);
    CoveringSystem sys;
    sys.K = doc.at("K").get<uint32_t>();
    sys.M = doc.at("M").get<double>();
    sys.S = doc.at("S").get<std::vector<int64_t>>();
    for (const auto& e : doc.at("P")) {
        CoveringPrime cp;
        cp.a = e.at("a").get<uint32_t>();
        cp.p = e.at("p").get<uint64_t>();
        cp.q = mpz_class(e.at("q").get<std::string>());
        cp.certified_maximal = e.at("certified_maximal").get<bool>();
        sys.primes.push_back(cp);
    }
    auto index_of_p = [&](uint64_t p) -> size_t {
        for (size_t i = 0; i < sys.primes.size(); ++i)
            if (sys.primes[i].p == p) return i;
        throw std::invalid_argument("system_from_json: partition references unknown p");
    };
    for (const auto& e : doc.at("partition")) {
        FamilyKey key{e.at("a").get<uint32_t>(), e.at("j").get<int32_t>(),
                      e.at("k").get<uint32_t>(), e.at("s_index").get<uint32_t>()};
        std::vector<size_t> cell;
        for (uint64_t p : e.at("p").get<std::vector<uint64_t>>()) cell.push_back(index_of_p(p));
        sys.partition[key] = cell;
    }
    for (const auto& e : doc.at("choices")) {
        Choice ch;
        std::string cls = e.at("class").get<std::string>();
        if (cls == "j+s") ch.cls = ClassChoice::j_plus_s;
        else if (cls == "ja+s") ch.cls = ClassChoice::ja_plus_s;
        else throw std::invalid_argument("system_from_json: unknown class tag " + cls);
        ch.b_p = mpz_class(e.at("b_p").get<std::string>());
        sys.choices[e.at("p").get<uint64_t>()] = ch;
    }
    sys.W = mpz_class(doc.at("W").get<std::string>());
    sys.b = mpz_class(doc.at("b").get<std::string>());

    mpz_class w_check = 1;
    for (const auto& cp : sys.primes) w_check *= cp.q;
    if (w_check != sys.W)
        throw std::invalid_argument("system_from_json: W does not match product of q_p");
    if (sys.b < 0 || sys.b >= sys.W)
        throw std::invalid_argument("system_from_json: b out of range");
    return sys;
}

}   // namespace delicate::covering
